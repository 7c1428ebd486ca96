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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chimera/annotations.hpp"

namespace chimera {

// Maximal span of consecutive phones sharing a major class. Run boundaries
// are the V/U transition instants of the utterance.
struct Run {
  Major cls = Major::kU;
  int64_t start = 0;
  int64_t end = 0;
  std::vector<PhoneSegment> phones;

  int64_t length() const { return end - start; }
};

struct RunSequence {
  std::vector<Run> runs;
  int sample_rate = 16000;

  std::size_t size() const { return runs.size(); }
  std::vector<Major> classes() const;
  // start of every run followed by the end of the last one
  std::vector<int64_t> boundaries() const;
};

RunSequence ExtractRuns(const PhoneTier& tier, const ClassificationTable& table);

enum class Move { kDiag, kUp, kLeft };

// `i`/`j` are the cell reached by the move: Diag advances both sequences, Up
// consumes an element of the first sequence only, Left of the second only.
struct AlignStep {
  std::size_t i = 0;
  std::size_t j = 0;
  Move move = Move::kDiag;

  bool operator==(const AlignStep&) const = default;
};

struct AlignCosts {
  double match = 0.0;
  double mismatch = 1.0;
  double gap = 1.0;
};

struct AlignmentPath {
  std::vector<AlignStep> steps;
  double total_cost = 0.0;
};

// Cumulative cost matrix of size (|a|+1) x (|b|+1), row-major.
struct DpMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cost;

  double at(std::size_t i, std::size_t j) const { return cost[i * cols + j]; }
};

DpMatrix FillDpMatrix(std::span<const Major> a, std::span<const Major> b,
                      const AlignCosts& costs);
// Edit-distance alignment of two class-label sequences. Ties are broken
// Diag, then Up, then Left, walking from the start of both sequences, so
// leading runs pair first.
AlignmentPath AlignLabels(std::span<const Major> a, std::span<const Major> b,
                          const AlignCosts& costs = {});
AlignmentPath Align(const RunSequence& a, const RunSequence& b, const AlignCosts& costs = {});

struct RunPair {
  std::size_t source = 0;
  std::optional<std::size_t> target;
};

struct MappingTable {
  std::vector<RunPair> pairs;  // one entry per source run, in order
  std::vector<std::pair<int64_t, int64_t>> instant_map;  // (source, target) samples
};

MappingTable BuildMappingTable(const AlignmentPath& path, const RunSequence& a,
                               const RunSequence& b);

// Tabular text dump of the DP matrix followed by the path, for inspection.
std::string DumpAlignment(const RunSequence& a, const RunSequence& b, const AlignCosts& costs,
                          const AlignmentPath& path);

}  // namespace chimera
