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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace chimera {

enum class LmSmoothing { kWittenBell, kAddK };

// Phone n-gram model (order 2 or 3) stored as a dense table of conditional
// log-probabilities. Token ids: phones are 0..V-1 in (sorted) vocabulary order; the
// sentence boundary is V (as history it is <s>, as prediction </s>).
class PhoneLm {
 public:
  PhoneLm() = default;
  PhoneLm(std::size_t order, std::vector<std::string> vocab, std::vector<double> log_probs);

  std::size_t order() const { return order_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t boundary() const { return vocab_.size(); }
  std::size_t num_histories() const;

  // history has order-1 token ids, oldest first.
  double LogProb(std::span<const std::size_t> history, std::size_t next) const;
  double LogProb(std::size_t history_index, std::size_t next) const {
    return log_probs_[history_index * (vocab_.size() + 1) + next];
  }
  std::size_t HistoryIndex(std::span<const std::size_t> history) const;

  const std::vector<double>& table() const { return log_probs_; }

 private:
  std::size_t order_ = 2;
  std::vector<std::string> vocab_;
  std::vector<double> log_probs_;
};

struct LmOptions {
  std::size_t order = 2;
  LmSmoothing smoothing = LmSmoothing::kWittenBell;
  double add_k = 0.5;
};

// `vocab` fixes the token set; empty derives it (sorted) from the corpus.
PhoneLm TrainPhoneLm(const std::vector<std::vector<std::string>>& transcriptions,
                     const LmOptions& options, std::vector<std::string> vocab = {});

}  // namespace chimera
