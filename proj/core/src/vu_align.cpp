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

#include "chimera/vu_align.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "chimera/error.hpp"

namespace chimera {

std::vector<Major> RunSequence::classes() const {
  std::vector<Major> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.cls);
  return out;
}

std::vector<int64_t> RunSequence::boundaries() const {
  std::vector<int64_t> out;
  if (runs.empty()) return out;
  out.reserve(runs.size() + 1);
  for (const auto& r : runs) out.push_back(r.start);
  out.push_back(runs.back().end);
  return out;
}

RunSequence ExtractRuns(const PhoneTier& tier, const ClassificationTable& table) {
  RunSequence seq;
  seq.sample_rate = tier.sample_rate;
  for (const auto& seg : tier.segments) {
    const Major cls = table.Classify(seg.label).major;
    if (seq.runs.empty() || seq.runs.back().cls != cls) {
      seq.runs.push_back(Run{cls, seg.start, seg.end, {}});
    }
    auto& run = seq.runs.back();
    run.end = seg.end;
    run.phones.push_back(seg);
  }
  return seq;
}

DpMatrix FillDpMatrix(std::span<const Major> a, std::span<const Major> b,
                      const AlignCosts& costs) {
  DpMatrix m;
  m.rows = a.size() + 1;
  m.cols = b.size() + 1;
  m.cost.assign(m.rows * m.cols, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return m.cost[i * m.cols + j]; };
  for (std::size_t i = 1; i < m.rows; ++i) at(i, 0) = at(i - 1, 0) + costs.gap;
  for (std::size_t j = 1; j < m.cols; ++j) at(0, j) = at(0, j - 1) + costs.gap;
  for (std::size_t i = 1; i < m.rows; ++i) {
    for (std::size_t j = 1; j < m.cols; ++j) {
      const double sub = a[i - 1] == b[j - 1] ? costs.match : costs.mismatch;
      at(i, j) = std::min({at(i - 1, j - 1) + sub, at(i - 1, j) + costs.gap,
                           at(i, j - 1) + costs.gap});
    }
  }
  return m;
}

AlignmentPath AlignLabels(std::span<const Major> a, std::span<const Major> b,
                          const AlignCosts& costs) {
  if (a.empty() || b.empty()) Fail(ErrorCode::kEmptySequence, "cannot align an empty run sequence");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // Cost-to-go: rest(i, j) aligns a[i..] with b[j..]. Tracing it from the
  // start applies the Diag > Up > Left preference to the earliest runs first.
  std::vector<double> rest((n + 1) * (m + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return rest[i * (m + 1) + j]; };
  auto sub = [&](std::size_t i, std::size_t j) { return a[i] == b[j] ? costs.match : costs.mismatch; };
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n && j == m) continue;
      double best = std::numeric_limits<double>::infinity();
      if (i < n && j < m) best = std::min(best, sub(i, j) + at(i + 1, j + 1));
      if (i < n) best = std::min(best, costs.gap + at(i + 1, j));
      if (j < m) best = std::min(best, costs.gap + at(i, j + 1));
      at(i, j) = best;
    }
  }
  AlignmentPath path;
  path.total_cost = at(0, 0);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    const double here = at(i, j);
    if (i < n && j < m && sub(i, j) + at(i + 1, j + 1) == here) {
      ++i;
      ++j;
      path.steps.push_back({i, j, Move::kDiag});
    } else if (i < n && costs.gap + at(i + 1, j) == here) {
      ++i;
      path.steps.push_back({i, j, Move::kUp});
    } else {
      ++j;
      path.steps.push_back({i, j, Move::kLeft});
    }
  }
  return path;
}

AlignmentPath Align(const RunSequence& a, const RunSequence& b, const AlignCosts& costs) {
  const auto ca = a.classes();
  const auto cb = b.classes();
  return AlignLabels(ca, cb, costs);
}

MappingTable BuildMappingTable(const AlignmentPath& path, const RunSequence& a,
                               const RunSequence& b) {
  MappingTable table;
  std::size_t i = 0;
  std::size_t j = 0;
  auto push_instant = [&](int64_t s, int64_t t) {
    if (table.instant_map.empty() ||
        (s > table.instant_map.back().first && t > table.instant_map.back().second)) {
      table.instant_map.emplace_back(s, t);
    }
  };
  for (const auto& step : path.steps) {
    const std::size_t ni = i + (step.move == Move::kLeft ? 0 : 1);
    const std::size_t nj = j + (step.move == Move::kUp ? 0 : 1);
    if (step.i != ni || step.j != nj || ni > a.size() || nj > b.size()) {
      Fail(ErrorCode::kInconsistentPath, "step to (" + std::to_string(step.i) + ", " +
                                             std::to_string(step.j) + ") does not follow (" +
                                             std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    switch (step.move) {
      case Move::kDiag: {
        table.pairs.push_back({i, j});
        push_instant(a.runs[i].start, b.runs[j].start);
        push_instant(a.runs[i].end, b.runs[j].end);
        break;
      }
      case Move::kUp:
        table.pairs.push_back({i, std::nullopt});
        break;
      case Move::kLeft:
        break;
    }
    i = ni;
    j = nj;
  }
  if (i != a.size() || j != b.size()) {
    Fail(ErrorCode::kInconsistentPath, "path ends at (" + std::to_string(i) + ", " +
                                           std::to_string(j) + "), expected (" +
                                           std::to_string(a.size()) + ", " +
                                           std::to_string(b.size()) + ")");
  }
  return table;
}

std::string DumpAlignment(const RunSequence& a, const RunSequence& b, const AlignCosts& costs,
                          const AlignmentPath& path) {
  const auto ca = a.classes();
  const auto cb = b.classes();
  const DpMatrix m = FillDpMatrix(ca, cb, costs);
  std::ostringstream os;
  os << "# dp\t-";
  for (auto c : cb) os << '\t' << MajorName(c);
  os << '\n';
  for (std::size_t i = 0; i < m.rows; ++i) {
    os << (i == 0 ? std::string("-") : std::string(MajorName(ca[i - 1])));
    for (std::size_t j = 0; j < m.cols; ++j) os << '\t' << m.at(i, j);
    os << '\n';
  }
  os << "# path\ti\tj\tmove\n";
  for (const auto& s : path.steps) {
    os << "step\t" << s.i << '\t' << s.j << '\t'
       << (s.move == Move::kDiag ? "Diag" : s.move == Move::kUp ? "Up" : "Left") << '\n';
  }
  os << "# total_cost\t" << path.total_cost << '\n';
  return os.str();
}

}  // namespace chimera
