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

#include "chimera/recognizer/scoring.hpp"

#include <algorithm>

#include "chimera/error.hpp"

namespace chimera {

EditCounts AlignEdits(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts c;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i - 1, j - 1) + (same ? 0 : 1) == at(i, j)) {
        same ? ++c.matches : ++c.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + 1 == at(i, j)) {
      ++c.deletions;
      --i;
      continue;
    }
    ++c.insertions;
    --j;
  }
  return c;
}

double PerBreakdown::per() const {
  if (ref_length == 0) return 0.0;
  return 100.0 * static_cast<double>(substitutions + deletions + insertions) /
         static_cast<double>(ref_length);
}

PerBreakdown& PerBreakdown::operator+=(const PerBreakdown& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_length += o.ref_length;
  return *this;
}

std::vector<std::string> FoldSequence(const std::vector<std::string>& phones,
                                      const ClassificationTable& table) {
  std::vector<std::string> out;
  out.reserve(phones.size());
  for (const auto& p : phones) {
    auto f = table.Fold(p);
    if (!f.empty()) out.push_back(std::move(f));
  }
  return out;
}

PerBreakdown PhoneErrorRate(const std::vector<std::string>& ref,
                            const std::vector<std::string>& hyp, const ClassificationTable& table) {
  const auto r = FoldSequence(ref, table);
  const auto h = FoldSequence(hyp, table);
  if (r.empty()) Fail(ErrorCode::kEmptyReference, "reference is empty after folding");
  const auto c = AlignEdits(r, h);
  return {c.substitutions, c.deletions, c.insertions, r.size()};
}

}  // namespace chimera
