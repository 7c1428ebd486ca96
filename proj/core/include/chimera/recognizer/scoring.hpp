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
#include <string>
#include <vector>

#include "chimera/annotations.hpp"

namespace chimera {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t matches = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

// Unit-cost Levenshtein alignment. Among minimum-cost scripts the backtrace
// prefers match/substitution, then deletion, then insertion.
EditCounts AlignEdits(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

struct PerBreakdown {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_length = 0;

  double per() const;  // percent
  PerBreakdown& operator+=(const PerBreakdown& o);
};

// Applies the scoring fold (dropping phones that fold to nothing).
std::vector<std::string> FoldSequence(const std::vector<std::string>& phones,
                                      const ClassificationTable& table);

PerBreakdown PhoneErrorRate(const std::vector<std::string>& ref,
                            const std::vector<std::string>& hyp, const ClassificationTable& table);

}  // namespace chimera
