// Copyright 2026 The Chimera Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chimera/recognizer/training.hpp"

#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "chimera/error.hpp"
#include "synthetic_hmm.hpp"
#include "test_util.hpp"

namespace chimera {
namespace {

using testing::SampleCorpus;
using testing::SyntheticHmm;

TrainUtterance SingleFeatureUtt(const std::vector<std::pair<std::string, std::size_t>>& phones,
                                double step = 1.0) {
  TrainUtterance u;
  u.id = "x";
  std::size_t t = 0;
  for (const auto& [p, n] : phones) {
    u.phones.push_back(p);
    u.spans.emplace_back(t, t + n);
    t += n;
  }
  u.features = FeatureMatrix(t, 1);
  for (std::size_t i = 0; i < t; ++i) u.features.at(i, 0) = step * double(i);
  return u;
}

TEST(TierToFrameSpans, CentreOwnership) {
  const auto tier = testing::MakeTier({{"h#", 800}, {"iy", 1600}, {"s", 1600}});
  // Frame t covers [160t, 160t+400); centre 160t+200.
  const auto spans = TierToFrameSpans(tier, FrameCount(4000, 400, 160), 160, 400);
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[0], (std::pair<std::size_t, std::size_t>{0, 4}));
  EXPECT_EQ(spans[1], (std::pair<std::size_t, std::size_t>{4, 14}));
  EXPECT_EQ(spans[2], (std::pair<std::size_t, std::size_t>{14, 23}));
}

TEST(FlatStart, UniformThreeWaySplit) {
  const auto u = SingleFeatureUtt({{"s", 300}});
  const auto m = FlatStart({u});
  ASSERT_EQ(m.num_phones(), 1u);
  // States see frames 0-99, 100-199, 200-299.
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& g = m.hmms[0].states[s];
    ASSERT_EQ(g.size(), 1u);
    EXPECT_NEAR(g.means()[0][0], 100.0 * double(s) + 49.5, 1e-9);
    EXPECT_NEAR(g.vars()[0][0], (100.0 * 100.0 - 1.0) / 12.0, 1e-6);
  }
}

TEST(FlatStart, UnseenPhoneUsesGlobalStats) {
  const auto u = SingleFeatureUtt({{"s", 30}, {"iy", 30}});
  FlatStartOptions opt;
  opt.extra_phones = {"h#"};
  const auto m = FlatStart({u}, opt);
  EXPECT_EQ(m.unseen_phones, (std::vector<std::string>{"h#"}));
  const auto& g = m.hmms[*m.PhoneIndex("h#")].states[1];
  EXPECT_NEAR(g.means()[0][0], 29.5, 1e-9);
  EXPECT_NEAR(g.vars()[0][0], (60.0 * 60.0 - 1.0) / 12.0, 1e-6);
  EXPECT_NEAR(m.var_floor[0], 1e-3 * (60.0 * 60.0 - 1.0) / 12.0, 1e-9);
}

TEST(FlatStart, Errors) {
  EXPECT_THROW(FlatStart({}), Error);
  auto u = SingleFeatureUtt({{"s", 30}});
  u.spans.clear();
  EXPECT_THROW(FlatStart({u}), Error);
  FlatStartOptions tight;
  tight.gaussian_budget = 2;
  EXPECT_THROW(FlatStart({SingleFeatureUtt({{"s", 30}})}, tight), Error);
}

// Exhaustive search over state durations for the strict topology.
double BruteForceAlign(const AcousticModel& m, const FeatureMatrix& f,
                       const std::vector<std::size_t>& ids) {
  const std::size_t S = 3 * ids.size();
  double best = -INFINITY;
  std::vector<std::size_t> dur(S);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t left) {
    if (k + 1 == S) {
      dur[k] = left;
      std::size_t t = 0;
      double score = 0.0;
      for (std::size_t j = 0; j < S; ++j) {
        const auto& h = m.hmms[ids[j / 3]];
        for (std::size_t r = 0; r < dur[j]; ++r, ++t) score += h.states[j % 3].LogLikelihood(f.row(t));
        score += double(dur[j] - 1) * std::log(h.self_loop[j % 3]) + std::log1p(-h.self_loop[j % 3]);
      }
      best = std::max(best, score);
      return;
    }
    for (std::size_t d = 1; d + (S - k - 1) <= left; ++d) {
      dur[k] = d;
      rec(k + 1, left - d);
    }
  };
  rec(0, f.rows);
  return best;
}

TEST(ForcedAlign, MatchesExhaustiveSearch) {
  SyntheticHmm hmm;
  const auto corpus = SampleCorpus(hmm, 3, 20);
  auto model = FlatStart(corpus);
  model.hmms[0].self_loop = {0.6, 0.8, 0.5};
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.Below(2);
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(rng.Below(2));
    const std::size_t T = 3 * n + rng.Below(5);
    FeatureMatrix f(T, 2);
    for (auto& v : f.data) v = rng.Uniform(-2, 14);
    const auto ali = ForcedAlign(model, f, ids);
    EXPECT_NEAR(ali.log_likelihood, BruteForceAlign(model, f, ids), 1e-8);
    EXPECT_EQ(ali.position.front(), 0u);
    EXPECT_EQ(ali.position.back(), 3 * n - 1);
    for (std::size_t t = 1; t < T; ++t) {
      EXPECT_LE(ali.position[t] - ali.position[t - 1], 1u);
    }
  }
}

TEST(ForcedAlign, ShortInputUsesEarlyExit) {
  SyntheticHmm hmm;
  const auto model = FlatStart(SampleCorpus(hmm, 3, 10));
  FeatureMatrix f(4, 2);
  const auto ali = ForcedAlign(model, f, {0, 1});
  EXPECT_TRUE(std::isfinite(ali.log_likelihood));
  EXPECT_EQ(ali.phone.front(), 0u);
  EXPECT_EQ(ali.phone.back(), 1u);
  EXPECT_THROW(ForcedAlign(model, FeatureMatrix(1, 2), {0, 1}), Error);
  EXPECT_THROW(ForcedAlign(model, FeatureMatrix(5, 3), {0}), Error);
}

TEST(TrainEm, ZeroIterationsIsIdentity) {
  SyntheticHmm hmm;
  const auto corpus = SampleCorpus(hmm, 3, 10);
  const auto model = FlatStart(corpus);
  TrainOptions opt;
  opt.iterations = 0;
  const auto out = TrainEm(model, corpus, opt);
  for (std::size_t p = 0; p < hmm.phones.size(); ++p) {
    for (std::size_t s = 0; s < 3; ++s) {
      EXPECT_EQ(out.hmms[p].states[s].means(), model.hmms[p].states[s].means());
    }
    EXPECT_EQ(out.hmms[p].self_loop, model.hmms[p].self_loop);
  }
}

TEST(TrainEm, RecoversGeneratingMeansAndIsMonotone) {
  SyntheticHmm hmm;
  const auto corpus = SampleCorpus(hmm, 42, 300);
  TrainOptions opt;
  opt.iterations = 10;
  TrainReport report;
  const auto model = TrainEm(FlatStart(corpus), corpus, opt, &report);
  ASSERT_EQ(report.trace.size(), 10u);
  for (std::size_t i = 1; i < report.trace.size(); ++i) {
    const double a = report.trace[i - 1].log_likelihood;
    const double b = report.trace[i].log_likelihood;
    EXPECT_GE(b, a - 1e-6 * std::abs(a)) << "iteration " << i + 1;
  }
  for (std::size_t p = 0; p < hmm.phones.size(); ++p) {
    const auto& h = model.hmms[*model.PhoneIndex(hmm.phones[p])];
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t d = 0; d < 2; ++d) {
        EXPECT_NEAR(h.states[s].means()[0][d], hmm.means[p][s][d], 0.1) << p << s << d;
      }
      EXPECT_NEAR(h.self_loop[s], hmm.self_loop, 0.05);
    }
  }
}

TEST(TrainEm, StochasticTransitionsAndFlooredVariances) {
  SyntheticHmm hmm;
  const auto corpus = SampleCorpus(hmm, 5, 60);
  TrainOptions opt;
  opt.iterations = 6;
  auto init = FlatStart(corpus, {.gaussian_budget = 24});
  opt.mixup = LinearMixupSchedule(opt.iterations, init.total_gaussians(), 24);
  const auto model = TrainEm(init, corpus, opt);
  EXPECT_LE(model.total_gaussians(), 24u);
  EXPECT_GT(model.total_gaussians(), 6u);
  for (const auto& h : model.hmms) {
    for (std::size_t s = 0; s < 3; ++s) {
      EXPECT_GT(h.self_loop[s], 0.0);
      EXPECT_LT(h.self_loop[s], 1.0);
      double wsum = 0.0;
      for (double w : h.states[s].weights()) wsum += w;
      EXPECT_NEAR(wsum, 1.0, 1e-9);
      for (const auto& v : h.states[s].vars()) {
        for (std::size_t d = 0; d < 2; ++d) EXPECT_GE(v[d], model.var_floor[d]);
      }
    }
  }
}

TEST(TrainEm, ParallelAccumulationMatchesSerial) {
  SyntheticHmm hmm;
  const auto corpus = SampleCorpus(hmm, 8, 80);
  const auto init = FlatStart(corpus);
  TrainOptions serial;
  serial.iterations = 3;
  TrainOptions parallel = serial;
  parallel.jobs = 4;
  TrainReport a, b;
  TrainEm(init, corpus, serial, &a);
  TrainEm(init, corpus, parallel, &b);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(a.trace[i].log_likelihood, b.trace[i].log_likelihood);
  }
}

TEST(LinearMixupSchedule, ReachesBudget) {
  const auto steps = LinearMixupSchedule(10, 150, 1000);
  ASSERT_FALSE(steps.empty());
  EXPECT_EQ(steps.back().target_total, 1000u);
  for (std::size_t i = 1; i < steps.size(); ++i) {
    EXPECT_GT(steps[i].after_iteration, steps[i - 1].after_iteration);
    EXPECT_GE(steps[i].target_total, steps[i - 1].target_total);
  }
  EXPECT_LT(steps.back().after_iteration, 10u);
  EXPECT_TRUE(LinearMixupSchedule(10, 1000, 1000).empty());
}

}  // namespace
}  // namespace chimera
