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
#include <string_view>
#include <vector>

#include "chimera/annotations.hpp"
#include "chimera/vu_align.hpp"
#include "chimera/waveform.hpp"

namespace chimera {

enum class MixKind {
  kSwapU,    // every unvoiced run from the target
  kSwapVU,   // SwapU plus a window of consecutive voiced runs
  kSwapSSt,  // only silence/stop/closure phones inside unvoiced runs
};

std::string_view MixKindName(MixKind kind);  // "swap-u", "swap-vu", "swap-sst"
MixKind ParseMixKind(std::string_view text);

struct MixMode {
  MixKind kind = MixKind::kSwapU;
  // Ordinal among the source's voiced runs of the first swapped one (SwapVU).
  // Unset picks the window of paired runs closest to the middle.
  std::optional<std::size_t> v_swap_start_run;
  std::size_t v_swap_count = 2;
};

enum class Origin { kSource, kTarget };

struct MixPiece {
  Origin origin = Origin::kSource;
  int64_t start = 0;
  int64_t end = 0;

  int64_t length() const { return end - start; }
  bool operator==(const MixPiece&) const = default;
};

struct MixRecipe {
  std::vector<MixPiece> pieces;
  std::size_t crossfade_len = 80;
  double target_gain = 1.0;

  int64_t output_length() const;
  int64_t target_duration() const;
};

MixRecipe PlanMix(const RunSequence& src_runs, const RunSequence& tgt_runs,
                  const MappingTable& map, const MixMode& mode, const PhoneTier& src_tier,
                  const PhoneTier& tgt_tier, const ClassificationTable& table,
                  std::size_t crossfade_len = 80);

// Optional tracing of where each output sample came from.
struct RenderTrace {
  std::vector<Origin> origin;
  std::vector<bool> in_crossfade;
  // Output sample index each junction ramp starts at, and its length.
  std::vector<std::pair<int64_t, std::size_t>> ramps;
};

Waveform Render(const MixRecipe& recipe, const Waveform& src, const Waveform& tgt,
                RenderTrace* trace = nullptr);

// Raised-cosine weight of the outgoing segment at position k of an n-sample ramp.
double CrossfadeWeight(std::size_t k, std::size_t n);
std::vector<double> Crossfade(std::span<const double> tail, std::span<const double> head,
                              std::size_t n);

double UnvoicedFraction(const PhoneTier& tier, const ClassificationTable& table);

// RMS(src) / RMS(tgt), for level-matching target pieces; 1 when either is silent.
double MatchRmsGain(const Waveform& src, const Waveform& tgt);

// Phone labels physically present in the mix: for every piece, the phones of
// its origin tier whose midpoint falls inside the piece.
std::vector<std::string> MixedReference(const MixRecipe& recipe, const PhoneTier& src_tier,
                                        const PhoneTier& tgt_tier);

std::string RecipeToJson(const MixRecipe& recipe, int indent = 2);
MixRecipe RecipeFromJson(std::string_view text);

// Convenience: classify, align, map, plan in one call.
struct MixPlan {
  RunSequence src_runs;
  RunSequence tgt_runs;
  AlignmentPath path;
  MappingTable map;
  MixRecipe recipe;
};

MixPlan PlanUtteranceMix(const PhoneTier& src_tier, const PhoneTier& tgt_tier,
                         const MixMode& mode, const ClassificationTable& table,
                         std::size_t crossfade_len = 80, const AlignCosts& costs = {});

}  // namespace chimera
