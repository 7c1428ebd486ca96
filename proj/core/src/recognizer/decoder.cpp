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

#include "chimera/recognizer/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chimera/error.hpp"

namespace chimera {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEarlyExitLogPenalty = -4.6;
constexpr std::size_t S3 = kStatesPerPhone;

}  // namespace

std::vector<std::string> ViterbiDecode(const AcousticModel& model, const PhoneLm& lm,
                                       const FeatureMatrix& features, const DecodeOptions& options,
                                       double* best_score) {
  const std::size_t T = features.rows;
  if (T == 0) Fail(ErrorCode::kEmptyFeatureMatrix, "nothing to decode");
  if (features.cols != model.feature_dim) {
    Fail(ErrorCode::kDimensionMismatch, "features have " + std::to_string(features.cols) +
                                            " dims, model " + std::to_string(model.feature_dim));
  }
  const std::size_t P = model.num_phones();
  if (P == 0) Fail(ErrorCode::kMissingModel, "acoustic model has no phones");

  std::vector<std::size_t> lm_id(P);
  const auto& vocab = lm.vocab();
  for (std::size_t p = 0; p < P; ++p) {
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), model.hmms[p].phone);
    if (it == vocab.end() || *it != model.hmms[p].phone) {
      Fail(ErrorCode::kUnknownPhone, model.hmms[p].phone + " missing from the phone LM");
    }
    lm_id[p] = static_cast<std::size_t>(it - vocab.begin());
  }
  const std::size_t bos = lm.boundary();
  const bool trigram = lm.order() == 3;
  // Trigram search keeps the previous phone as context; slot P stands for <s>.
  const std::size_t C = trigram ? P + 1 : 1;
  const std::size_t S = C * P * S3;
  const bool early = options.early_exit == EarlyExit::kAlways ||
                     (options.early_exit == EarlyExit::kAuto && T < S3);
  const double w = options.lm_weight;

  auto ctx_token = [&](std::size_t c) { return c == P ? bos : lm_id[c]; };
  // LM score of `next` (token id) following the phone p reached in context c.
  auto lm_score = [&](std::size_t c, std::size_t p, std::size_t next) {
    if (w == 0.0) return 0.0;
    const std::size_t h = trigram ? ctx_token(c) * (vocab.size() + 1) + lm_id[p] : lm_id[p];
    return w * lm.LogProb(h, next);
  };
  auto start_score = [&](std::size_t q) {
    if (w == 0.0) return 0.0;
    const std::size_t h = trigram ? bos * (vocab.size() + 1) + bos : bos;
    return w * lm.LogProb(h, lm_id[q]);
  };

  std::vector<double> log_self(P * S3);
  std::vector<double> log_adv(P * S3);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t s = 0; s < S3; ++s) {
      log_self[p * S3 + s] = std::log(model.hmms[p].self_loop[s]);
      log_adv[p * S3 + s] = std::log1p(-model.hmms[p].self_loop[s]);
    }
  }

  std::vector<double> emit(P * S3);
  auto compute_emissions = [&](std::size_t t) {
    const auto x = features.row(t);
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t s = 0; s < S3; ++s) emit[p * S3 + s] = model.hmms[p].states[s].LogLikelihood(x);
    }
  };
  auto index = [&](std::size_t c, std::size_t p, std::size_t s) { return (c * P + p) * S3 + s; };

  // Backpointer: predecessor state * 2 + entry flag; -1 marks utterance start.
  std::vector<int64_t> back(T * S, -1);
  std::vector<double> prev(S, kNegInf);
  std::vector<double> cur(S, kNegInf);

  // Best exit of every (context, phone) at the previous frame.
  std::vector<double> exit_score(C * P, kNegInf);
  std::vector<int64_t> exit_from(C * P, -1);
  auto compute_exits = [&](const std::vector<double>& score) {
    std::fill(exit_score.begin(), exit_score.end(), kNegInf);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t p = 0; p < P; ++p) {
        const std::size_t last = index(c, p, S3 - 1);
        double best = score[last] + log_adv[p * S3 + S3 - 1];
        int64_t from = static_cast<int64_t>(last);
        if (early) {
          for (std::size_t s = 0; s + 1 < S3; ++s) {
            const double v = score[index(c, p, s)] + log_adv[p * S3 + s] + kEarlyExitLogPenalty;
            if (v > best) best = v, from = static_cast<int64_t>(index(c, p, s));
          }
        }
        exit_score[c * P + p] = best;
        exit_from[c * P + p] = from;
      }
    }
  };

  compute_emissions(0);
  for (std::size_t q = 0; q < P; ++q) {
    const std::size_t c = trigram ? P : 0;
    const std::size_t k = index(c, q, 0);
    prev[k] = start_score(q) + options.insertion_penalty + emit[q * S3];
  }

  std::vector<double> entry(C * P);
  std::vector<int64_t> entry_from(C * P);
  for (std::size_t t = 1; t < T; ++t) {
    compute_emissions(t);
    compute_exits(prev);
    std::fill(entry.begin(), entry.end(), kNegInf);
    std::fill(entry_from.begin(), entry_from.end(), -1);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t p = 0; p < P; ++p) {
        const double ex = exit_score[c * P + p];
        if (ex == kNegInf) continue;
        const std::size_t nc = trigram ? p : 0;
        for (std::size_t q = 0; q < P; ++q) {
          const double v = ex + lm_score(c, p, lm_id[q]) + options.insertion_penalty;
          double& slot = entry[nc * P + q];
          if (v > slot) slot = v, entry_from[nc * P + q] = exit_from[c * P + p];
        }
      }
    }

    std::fill(cur.begin(), cur.end(), kNegInf);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t q = 0; q < P; ++q) {
        for (std::size_t s = 0; s < S3; ++s) {
          const std::size_t k = index(c, q, s);
          double best = prev[k] + log_self[q * S3 + s];
          int64_t from = static_cast<int64_t>(k) * 2;
          if (s == 0) {
            const double v = entry[c * P + q];
            if (v > best) best = v, from = entry_from[c * P + q] * 2 + 1;
          } else {
            const double v = prev[k - 1] + log_adv[q * S3 + s - 1];
            if (v > best) best = v, from = static_cast<int64_t>(k - 1) * 2;
          }
          if (best == kNegInf) continue;
          cur[k] = best + emit[q * S3 + s];
          back[t * S + k] = from;
        }
      }
    }
    std::swap(prev, cur);
  }

  compute_exits(prev);
  double best = kNegInf;
  int64_t final_state = -1;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t p = 0; p < P; ++p) {
      const double ex = exit_score[c * P + p];
      if (ex == kNegInf) continue;
      const double v = ex + lm_score(c, p, bos);
      if (v > best) best = v, final_state = exit_from[c * P + p];
    }
  }
  if (final_state < 0) {
    // Too short for any complete phone under the strict topology.
    DecodeOptions relaxed = options;
    relaxed.early_exit = EarlyExit::kAlways;
    if (!early) return ViterbiDecode(model, lm, features, relaxed, best_score);
    Fail(ErrorCode::kSignalTooShort, "no complete decoding path");
  }
  if (best_score != nullptr) *best_score = best;

  std::vector<std::string> phones;
  auto k = static_cast<std::size_t>(final_state);
  for (std::size_t t = T; t-- > 0;) {
    const int64_t bp = back[t * S + k];
    const std::size_t phone = (k / S3) % P;
    const bool entered = t == 0 || (bp & 1) != 0;
    if (entered) phones.push_back(model.hmms[phone].phone);
    if (t > 0) k = static_cast<std::size_t>(bp >> 1);
  }
  std::reverse(phones.begin(), phones.end());
  return phones;
}

}  // namespace chimera
