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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "chimera/error.hpp"
#include "chimera/parallel.hpp"

namespace chimera {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Penalty for leaving a phone before its last state (short-utterance topology).
constexpr double kEarlyExitLogPenalty = -4.6;  // log(0.01)
// Utterances are accumulated in fixed-size chunks so the floating-point
// reduction order does not depend on the number of worker threads.
constexpr std::size_t kAccumulatorChunk = 8;

struct StateStats {
  std::vector<double> occ;
  std::vector<std::vector<double>> sum;
  std::vector<std::vector<double>> sumsq;
  double self_count = 0.0;
  double advance_count = 0.0;

  void Resize(std::size_t comps, std::size_t dim) {
    occ.assign(comps, 0.0);
    sum.assign(comps, std::vector<double>(dim, 0.0));
    sumsq.assign(comps, std::vector<double>(dim, 0.0));
    self_count = advance_count = 0.0;
  }

  void Add(const StateStats& o) {
    for (std::size_t c = 0; c < occ.size(); ++c) {
      occ[c] += o.occ[c];
      for (std::size_t d = 0; d < sum[c].size(); ++d) {
        sum[c][d] += o.sum[c][d];
        sumsq[c][d] += o.sumsq[c][d];
      }
    }
    self_count += o.self_count;
    advance_count += o.advance_count;
  }
};

struct Accumulator {
  std::vector<StateStats> states;  // phone * 3 + state
  double log_likelihood = 0.0;
  std::size_t frames = 0;
  std::vector<std::string> warnings;

  explicit Accumulator(const AcousticModel& m) {
    states.resize(m.num_phones() * kStatesPerPhone);
    for (std::size_t p = 0; p < m.num_phones(); ++p) {
      for (std::size_t s = 0; s < kStatesPerPhone; ++s) {
        states[p * kStatesPerPhone + s].Resize(m.hmms[p].states[s].size(), m.feature_dim);
      }
    }
  }

  void Add(const Accumulator& o) {
    for (std::size_t k = 0; k < states.size(); ++k) states[k].Add(o.states[k]);
    log_likelihood += o.log_likelihood;
    frames += o.frames;
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
  }
};

double LogAdvance(double self_loop) { return std::log1p(-self_loop); }

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> TierToFrameSpans(const PhoneTier& tier,
                                                                  std::size_t n_frames,
                                                                  std::size_t frame_hop,
                                                                  std::size_t frame_len) {
  std::vector<std::pair<std::size_t, std::size_t>> spans(tier.segments.size(), {0, 0});
  if (tier.segments.empty()) return spans;
  std::size_t p = 0;
  std::vector<std::size_t> owner(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const auto centre = static_cast<int64_t>(t * frame_hop + frame_len / 2);
    while (p + 1 < tier.segments.size() && centre >= tier.segments[p].end) ++p;
    owner[t] = p;
  }
  // Empty spans sit at the position where the phone would have started.
  std::size_t t = 0;
  for (std::size_t i = 0; i < tier.segments.size(); ++i) {
    const std::size_t first = t;
    while (t < n_frames && owner[t] == i) ++t;
    spans[i] = {first, t};
  }
  return spans;
}

AcousticModel FlatStart(const std::vector<TrainUtterance>& corpus, const FlatStartOptions& options) {
  if (corpus.empty()) Fail(ErrorCode::kEmptyCorpus, "flat start needs at least one utterance");
  const std::size_t dim = corpus.front().features.cols;
  std::set<std::string> phone_set(options.extra_phones.begin(), options.extra_phones.end());
  std::size_t total_frames = 0;
  std::vector<double> gsum(dim, 0.0);
  std::vector<double> gsumsq(dim, 0.0);
  for (const auto& u : corpus) {
    if (u.features.cols != dim) {
      Fail(ErrorCode::kDimensionMismatch, u.id + ": feature dim " + std::to_string(u.features.cols));
    }
    if (u.spans.size() != u.phones.size()) {
      Fail(ErrorCode::kInvalidArgument, u.id + ": spans do not match phones");
    }
    phone_set.insert(u.phones.begin(), u.phones.end());
    for (std::size_t t = 0; t < u.features.rows; ++t) {
      const auto x = u.features.row(t);
      for (std::size_t d = 0; d < dim; ++d) {
        gsum[d] += x[d];
        gsumsq[d] += x[d] * x[d];
      }
    }
    total_frames += u.features.rows;
  }
  if (total_frames == 0) Fail(ErrorCode::kEmptyCorpus, "corpus has no frames");

  AcousticModel model;
  model.feature_dim = dim;
  model.gaussian_budget = options.gaussian_budget;
  std::vector<double> gmean(dim);
  std::vector<double> gvar(dim);
  model.var_floor.resize(dim);
  const auto n_total = static_cast<double>(total_frames);
  for (std::size_t d = 0; d < dim; ++d) {
    gmean[d] = gsum[d] / n_total;
    gvar[d] = std::max(gsumsq[d] / n_total - gmean[d] * gmean[d], 1e-12);
    model.var_floor[d] = options.var_floor_fraction * gvar[d];
  }

  for (const auto& p : phone_set) {
    PhoneHmm h;
    h.phone = p;
    h.self_loop.fill(options.initial_self_loop);
    for (auto& s : h.states) s = DiagGmm(dim);
    model.hmms.push_back(std::move(h));
  }
  if (model.num_phones() * kStatesPerPhone > model.gaussian_budget) {
    Fail(ErrorCode::kInvalidArgument, "Gaussian budget " + std::to_string(model.gaussian_budget) +
                                          " is below one per state");
  }

  struct Moments {
    double n = 0.0;
    std::vector<double> sum;
    std::vector<double> sumsq;
  };
  std::vector<Moments> state_m(model.num_phones() * kStatesPerPhone);
  std::vector<Moments> phone_m(model.num_phones());
  for (auto& m : state_m) m.sum.assign(dim, 0.0), m.sumsq.assign(dim, 0.0);
  for (auto& m : phone_m) m.sum.assign(dim, 0.0), m.sumsq.assign(dim, 0.0);

  for (const auto& u : corpus) {
    for (std::size_t i = 0; i < u.phones.size(); ++i) {
      const std::size_t p = model.RequirePhoneIndex(u.phones[i]);
      const auto [a, b] = u.spans[i];
      const std::size_t n = b - a;
      for (std::size_t s = 0; s < kStatesPerPhone; ++s) {
        const std::size_t lo = a + s * n / kStatesPerPhone;
        const std::size_t hi = a + (s + 1) * n / kStatesPerPhone;
        for (std::size_t t = lo; t < hi; ++t) {
          const auto x = u.features.row(t);
          for (auto* m : {&state_m[p * kStatesPerPhone + s], &phone_m[p]}) {
            m->n += 1.0;
            for (std::size_t d = 0; d < dim; ++d) {
              m->sum[d] += x[d];
              m->sumsq[d] += x[d] * x[d];
            }
          }
        }
      }
    }
  }

  auto gaussian_from = [&](const Moments& m, std::vector<double>& mean, std::vector<double>& var) {
    mean.resize(dim);
    var.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      mean[d] = m.sum[d] / m.n;
      var[d] = std::max(m.sumsq[d] / m.n - mean[d] * mean[d], model.var_floor[d]);
    }
  };

  for (std::size_t p = 0; p < model.num_phones(); ++p) {
    if (phone_m[p].n == 0.0) model.unseen_phones.push_back(model.hmms[p].phone);
    for (std::size_t s = 0; s < kStatesPerPhone; ++s) {
      std::vector<double> mean;
      std::vector<double> var;
      const auto& sm = state_m[p * kStatesPerPhone + s];
      if (sm.n > 0.0) {
        gaussian_from(sm, mean, var);
      } else if (phone_m[p].n > 0.0) {
        gaussian_from(phone_m[p], mean, var);
      } else {
        mean = gmean;
        var = gvar;
      }
      model.hmms[p].states[s].AddComponent(1.0, std::move(mean), std::move(var));
    }
  }
  model.Precompute();
  return model;
}

StateAlignment ForcedAlign(const AcousticModel& model, const FeatureMatrix& features,
                           const std::vector<std::size_t>& phone_ids) {
  const std::size_t T = features.rows;
  const std::size_t N = phone_ids.size();
  if (N == 0) Fail(ErrorCode::kEmptyReference, "forced alignment needs a phone sequence");
  if (features.cols != model.feature_dim) {
    Fail(ErrorCode::kDimensionMismatch, "features have " + std::to_string(features.cols) +
                                            " dims, model " + std::to_string(model.feature_dim));
  }
  if (T < N) {
    Fail(ErrorCode::kSignalTooShort, std::to_string(T) + " frames for " + std::to_string(N) + " phones");
  }
  const bool strict = T >= kStatesPerPhone * N;
  const std::size_t S = kStatesPerPhone * N;

  auto self_of = [&](std::size_t k) {
    return model.hmms[phone_ids[k / kStatesPerPhone]].self_loop[k % kStatesPerPhone];
  };
  std::vector<double> log_self(S);
  std::vector<double> log_adv(S);
  for (std::size_t k = 0; k < S; ++k) {
    log_self[k] = std::log(self_of(k));
    log_adv[k] = LogAdvance(self_of(k));
  }

  std::vector<double> prev(S, kNegInf);
  std::vector<double> cur(S, kNegInf);
  std::vector<int32_t> back(T * S, -1);
  auto emit = [&](std::size_t t, std::size_t k) {
    return model.hmms[phone_ids[k / kStatesPerPhone]].states[k % kStatesPerPhone].LogLikelihood(
        features.row(t));
  };

  prev[0] = emit(0, 0);
  for (std::size_t t = 1; t < T; ++t) {
    // States reachable at frame t under the minimum-duration topology.
    const std::size_t k_max = std::min(S - 1, strict ? t : kStatesPerPhone * std::min(t, N - 1) + 2);
    std::fill(cur.begin(), cur.end(), kNegInf);
    for (std::size_t k = 0; k <= k_max; ++k) {
      double best = prev[k] + log_self[k];
      int32_t from = static_cast<int32_t>(k);
      if (k > 0) {
        const double adv = prev[k - 1] + log_adv[k - 1];
        if (adv > best) best = adv, from = static_cast<int32_t>(k - 1);
      }
      if (!strict && k % kStatesPerPhone == 0 && k > 0) {
        for (std::size_t s = 0; s + 1 < kStatesPerPhone; ++s) {
          const std::size_t j = k - kStatesPerPhone + s;
          const double early = prev[j] + log_adv[j] + kEarlyExitLogPenalty;
          if (early > best) best = early, from = static_cast<int32_t>(j);
        }
      }
      if (best == kNegInf) continue;
      cur[k] = best + emit(t, k);
      back[t * S + k] = from;
    }
    std::swap(prev, cur);
  }

  double best = prev[S - 1] + log_adv[S - 1];
  std::size_t last = S - 1;
  if (!strict) {
    for (std::size_t s = 0; s + 1 < kStatesPerPhone; ++s) {
      const std::size_t j = S - kStatesPerPhone + s;
      const double v = prev[j] + log_adv[j] + kEarlyExitLogPenalty;
      if (v > best) best = v, last = j;
    }
  }
  if (!std::isfinite(best)) {
    Fail(ErrorCode::kSignalTooShort, "no complete alignment path");
  }

  StateAlignment out;
  out.log_likelihood = best;
  out.phone.resize(T);
  out.state.resize(T);
  out.position.resize(T);
  std::size_t k = last;
  for (std::size_t t = T; t-- > 0;) {
    out.phone[t] = phone_ids[k / kStatesPerPhone];
    out.state[t] = k % kStatesPerPhone;
    out.position[t] = k;
    if (t > 0) k = static_cast<std::size_t>(back[t * S + k]);
  }
  return out;
}

std::vector<MixupStep> LinearMixupSchedule(std::size_t iterations, std::size_t initial_total,
                                           std::size_t budget) {
  std::vector<MixupStep> steps;
  if (budget <= initial_total || iterations < 2) return steps;
  const std::size_t n_steps = std::max<std::size_t>(1, (2 * iterations) / 3);
  for (std::size_t k = 1; k <= n_steps && k < iterations; ++k) {
    steps.push_back({k, initial_total + (budget - initial_total) * k / n_steps});
  }
  steps.back().target_total = budget;
  return steps;
}

void MixUp(AcousticModel& model, std::size_t target_total,
           const std::vector<std::vector<double>>& occupancy) {
  target_total = std::min(target_total, model.gaussian_budget);
  const std::size_t n_states = model.num_phones() * kStatesPerPhone;
  std::vector<double> share(n_states, 0.0);
  double share_sum = 0.0;
  std::vector<std::size_t> count(n_states);
  std::size_t current = 0;
  for (std::size_t k = 0; k < n_states; ++k) {
    const auto& gmm = model.hmms[k / kStatesPerPhone].states[k % kStatesPerPhone];
    count[k] = gmm.size();
    current += count[k];
    double occ = 0.0;
    if (k < occupancy.size()) {
      for (double o : occupancy[k]) occ += o;
    }
    share[k] = occ > 0.0 ? std::pow(occ, 0.2) : 0.0;
    share_sum += share[k];
  }
  if (current >= target_total || share_sum == 0.0) return;

  std::vector<std::size_t> want = count;
  std::size_t total = current;
  while (total < target_total) {
    std::size_t best = n_states;
    double best_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_states; ++k) {
      if (share[k] == 0.0) continue;
      const double ideal = static_cast<double>(target_total) * share[k] / share_sum;
      const double gap = ideal - static_cast<double>(want[k]);
      if (gap > best_gap) best_gap = gap, best = k;
    }
    if (best == n_states) break;
    ++want[best];
    ++total;
  }

  for (std::size_t k = 0; k < n_states; ++k) {
    auto& gmm = model.hmms[k / kStatesPerPhone].states[k % kStatesPerPhone];
    while (gmm.size() < want[k]) {
      const auto& w = gmm.weights();
      const auto c = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
      std::vector<double> mean = gmm.means()[c];
      std::vector<double> var = gmm.vars()[c];
      const double half = gmm.weights()[c] / 2.0;
      gmm.weights()[c] = half;
      for (std::size_t d = 0; d < mean.size(); ++d) {
        const double delta = 0.2 * std::sqrt(var[d]);
        gmm.means()[c][d] += delta;
        mean[d] -= delta;
      }
      gmm.AddComponent(half, std::move(mean), std::move(var));
    }
    gmm.Precompute();
  }
}

AcousticModel TrainEm(AcousticModel model, const std::vector<TrainUtterance>& corpus,
                      const TrainOptions& options, TrainReport* report) {
  if (options.iterations == 0) return model;
  if (corpus.empty()) Fail(ErrorCode::kEmptyCorpus, "no training utterances");

  std::vector<std::vector<std::size_t>> ids(corpus.size());
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    for (const auto& p : corpus[u].phones) ids[u].push_back(model.RequirePhoneIndex(p));
  }
  model.Precompute();
  const std::size_t dim = model.feature_dim;
  const std::size_t n_chunks = (corpus.size() + kAccumulatorChunk - 1) / kAccumulatorChunk;

  for (std::size_t it = 1; it <= options.iterations; ++it) {
    std::vector<Accumulator> partial;
    partial.reserve(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) partial.emplace_back(model);

    ParallelFor(n_chunks, options.jobs, [&](std::size_t chunk) {
      Accumulator& acc = partial[chunk];
      std::vector<double> comp_ll;
      const std::size_t end = std::min(corpus.size(), (chunk + 1) * kAccumulatorChunk);
      for (std::size_t u = chunk * kAccumulatorChunk; u < end; ++u) {
        StateAlignment ali;
        try {
          ali = ForcedAlign(model, corpus[u].features, ids[u]);
        } catch (const Error& e) {
          acc.warnings.push_back(corpus[u].id + ": skipped (" + e.what() + ")");
          continue;
        }
        acc.log_likelihood += ali.log_likelihood;
        acc.frames += corpus[u].features.rows;
        const std::size_t T = corpus[u].features.rows;
        for (std::size_t t = 0; t < T; ++t) {
          const std::size_t k = ali.phone[t] * kStatesPerPhone + ali.state[t];
          StateStats& st = acc.states[k];
          const DiagGmm& gmm = model.hmms[ali.phone[t]].states[ali.state[t]];
          comp_ll.resize(gmm.size());
          const auto x = corpus[u].features.row(t);
          const double total = gmm.ComponentLogLikelihoods(x, comp_ll);
          for (std::size_t c = 0; c < gmm.size(); ++c) {
            const double g = std::exp(comp_ll[c] - total);
            if (g == 0.0) continue;
            st.occ[c] += g;
            for (std::size_t d = 0; d < dim; ++d) {
              st.sum[c][d] += g * x[d];
              st.sumsq[c][d] += g * x[d] * x[d];
            }
          }
          const bool last = t + 1 == T;
          if (!last && ali.position[t + 1] == ali.position[t]) {
            st.self_count += 1.0;
          } else {
            st.advance_count += 1.0;
          }
        }
      }
    });

    Accumulator acc(model);
    for (const auto& p : partial) acc.Add(p);

    IterationStats stats;
    stats.iteration = it;
    stats.log_likelihood = acc.log_likelihood;
    stats.frames = acc.frames;
    stats.num_gaussians = model.total_gaussians();
    if (report != nullptr) {
      report->trace.push_back(stats);
      report->warnings.insert(report->warnings.end(), acc.warnings.begin(), acc.warnings.end());
    }

    std::vector<std::vector<double>> occupancy(acc.states.size());
    for (std::size_t k = 0; k < acc.states.size(); ++k) {
      PhoneHmm& hmm = model.hmms[k / kStatesPerPhone];
      const std::size_t s = k % kStatesPerPhone;
      DiagGmm& gmm = hmm.states[s];
      const StateStats& st = acc.states[k];
      occupancy[k] = st.occ;
      double total = 0.0;
      for (double o : st.occ) total += o;
      if (total > 0.0) {
        std::vector<std::size_t> dropped;
        for (std::size_t c = 0; c < gmm.size(); ++c) {
          if (st.occ[c] < options.min_component_occupancy) {
            dropped.push_back(c);
            continue;
          }
          gmm.weights()[c] = st.occ[c] / total;
          for (std::size_t d = 0; d < dim; ++d) {
            const double mean = st.sum[c][d] / st.occ[c];
            gmm.means()[c][d] = mean;
            gmm.vars()[c][d] = std::max(st.sumsq[c][d] / st.occ[c] - mean * mean, model.var_floor[d]);
          }
        }
        if (dropped.size() < gmm.size()) {
          for (auto c = dropped.rbegin(); c != dropped.rend(); ++c) {
            gmm.RemoveComponent(*c);
            occupancy[k].erase(occupancy[k].begin() + static_cast<std::ptrdiff_t>(*c));
            if (report != nullptr) {
              report->warnings.push_back("EmptyStateOccupancy: " + hmm.phone + " state " +
                                         std::to_string(s) + " component dropped");
            }
          }
        }
        gmm.Precompute();
      }
      const double n_trans = st.self_count + st.advance_count;
      if (n_trans > 0.0) {
        hmm.self_loop[s] =
            std::clamp(st.self_count / n_trans, options.min_self_loop, options.max_self_loop);
      }
    }

    for (const auto& step : options.mixup) {
      if (step.after_iteration == it) MixUp(model, step.target_total, occupancy);
    }
  }
  return model;
}

}  // namespace chimera
