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

#include "chimera/recognizer/phone_lm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "chimera/error.hpp"

namespace chimera {

PhoneLm::PhoneLm(std::size_t order, std::vector<std::string> vocab, std::vector<double> log_probs)
    : order_(order), vocab_(std::move(vocab)), log_probs_(std::move(log_probs)) {
  if (order_ < 2 || order_ > 3) Fail(ErrorCode::kInvalidArgument, "LM order must be 2 or 3");
  if (std::adjacent_find(vocab_.begin(), vocab_.end(), std::greater_equal<>()) != vocab_.end()) {
    Fail(ErrorCode::kInvalidArgument, "LM vocabulary must be sorted and unique");
  }
  if (log_probs_.size() != num_histories() * (vocab_.size() + 1)) {
    Fail(ErrorCode::kBadModelFile, "LM table size does not match vocabulary");
  }
}

std::size_t PhoneLm::num_histories() const {
  const std::size_t tokens = vocab_.size() + 1;
  return order_ == 2 ? tokens : tokens * tokens;
}

std::size_t PhoneLm::HistoryIndex(std::span<const std::size_t> history) const {
  if (history.size() != order_ - 1) Fail(ErrorCode::kInvalidArgument, "LM history length");
  std::size_t idx = 0;
  for (auto h : history) idx = idx * (vocab_.size() + 1) + h;
  return idx;
}

double PhoneLm::LogProb(std::span<const std::size_t> history, std::size_t next) const {
  return LogProb(HistoryIndex(history), next);
}

PhoneLm TrainPhoneLm(const std::vector<std::vector<std::string>>& transcriptions,
                     const LmOptions& options, std::vector<std::string> vocab) {
  if (transcriptions.empty()) Fail(ErrorCode::kEmptyCorpus, "no transcriptions for the LM");
  if (options.order < 2 || options.order > 3) {
    Fail(ErrorCode::kInvalidArgument, "LM order must be 2 or 3");
  }
  if (vocab.empty()) {
    std::set<std::string> seen;
    for (const auto& t : transcriptions) seen.insert(t.begin(), t.end());
    vocab.assign(seen.begin(), seen.end());
  } else {
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  }
  if (vocab.empty()) Fail(ErrorCode::kEmptyCorpus, "LM vocabulary is empty");

  const std::size_t V = vocab.size();
  const std::size_t tokens = V + 1;  // predicted symbols incl. </s>
  auto id_of = [&](const std::string& p) {
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), p);
    if (it == vocab.end() || *it != p) Fail(ErrorCode::kUnknownPhone, p + " not in LM vocabulary");
    return static_cast<std::size_t>(it - vocab.begin());
  };

  // Counts keyed by (history..., next); histories are shorter prefixes.
  std::map<std::vector<std::size_t>, double> ngram;
  std::map<std::vector<std::size_t>, double> context;
  std::map<std::vector<std::size_t>, double> followers;
  double total_unigrams = 0.0;
  std::vector<double> unigram(tokens, 0.0);
  for (const auto& t : transcriptions) {
    std::vector<std::size_t> seq(options.order - 1, V);
    for (const auto& p : t) seq.push_back(id_of(p));
    seq.push_back(V);
    for (std::size_t pos = options.order - 1; pos < seq.size(); ++pos) {
      unigram[seq[pos]] += 1.0;
      total_unigrams += 1.0;
      for (std::size_t n = 2; n <= options.order; ++n) {
        std::vector<std::size_t> key(seq.begin() + static_cast<std::ptrdiff_t>(pos + 1 - n),
                                     seq.begin() + static_cast<std::ptrdiff_t>(pos + 1));
        if (ngram[key]++ == 0.0) followers[{key.begin(), key.end() - 1}] += 1.0;
        context[{key.begin(), key.end() - 1}] += 1.0;
      }
    }
  }

  auto lookup = [](const std::map<std::vector<std::size_t>, double>& m,
                   const std::vector<std::size_t>& k) {
    const auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
  };

  std::vector<double> uni_prob(tokens);
  for (std::size_t w = 0; w < tokens; ++w) {
    uni_prob[w] = (unigram[w] + 1.0) / (total_unigrams + static_cast<double>(tokens));
  }

  // Witten-Bell, interpolated recursively down to the add-one unigram.
  auto wb = [&](auto&& self, const std::vector<std::size_t>& hist, std::size_t w) -> double {
    if (hist.empty()) return uni_prob[w];
    const std::vector<std::size_t> lower(hist.begin() + 1, hist.end());
    const double lower_p = self(self, lower, w);
    const double c_h = lookup(context, hist);
    if (c_h == 0.0) return lower_p;
    const double t_h = lookup(followers, hist);
    std::vector<std::size_t> key = hist;
    key.push_back(w);
    return (lookup(ngram, key) + t_h * lower_p) / (c_h + t_h);
  };

  const std::size_t num_hist = options.order == 2 ? tokens : tokens * tokens;
  std::vector<double> table(num_hist * tokens);
  for (std::size_t h = 0; h < num_hist; ++h) {
    std::vector<std::size_t> hist;
    if (options.order == 2) {
      hist = {h};
    } else {
      hist = {h / tokens, h % tokens};
    }
    for (std::size_t w = 0; w < tokens; ++w) {
      double p = 0.0;
      if (options.smoothing == LmSmoothing::kWittenBell) {
        p = wb(wb, hist, w);
      } else {
        std::vector<std::size_t> key = hist;
        key.push_back(w);
        p = (lookup(ngram, key) + options.add_k) /
            (lookup(context, hist) + options.add_k * static_cast<double>(tokens));
      }
      table[h * tokens + w] = std::log(p);
    }
  }
  return PhoneLm(options.order, std::move(vocab), std::move(table));
}

}  // namespace chimera
