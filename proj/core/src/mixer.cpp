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

#include "chimera/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chimera/error.hpp"
#include "json.hpp"

namespace chimera {
namespace {

void AppendPiece(std::vector<MixPiece>& pieces, Origin origin, int64_t start, int64_t end) {
  if (end <= start) return;
  if (!pieces.empty() && pieces.back().origin == origin && pieces.back().end == start) {
    pieces.back().end = end;
    return;
  }
  pieces.push_back({origin, start, end});
}

int64_t MapProportional(int64_t x, const Run& from, const Run& to) {
  const double frac = static_cast<double>(x - from.start) / static_cast<double>(from.length());
  return to.start + static_cast<int64_t>(std::llround(frac * static_cast<double>(to.length())));
}

// Source-run indices of the voiced runs to swap for SwapVU.
std::vector<std::size_t> SelectVoicedWindow(const RunSequence& src, const RunSequence& tgt,
                                            const MappingTable& map, const MixMode& mode) {
  std::vector<std::size_t> voiced;
  std::vector<bool> usable;
  for (const auto& p : map.pairs) {
    if (src.runs[p.source].cls != Major::kV) continue;
    voiced.push_back(p.source);
    usable.push_back(p.target.has_value() && tgt.runs[*p.target].cls == Major::kV);
  }
  const std::size_t count = mode.v_swap_count;
  if (count == 0) Fail(ErrorCode::kModeUnsatisfiable, "swap-vu needs at least one voiced run");
  if (voiced.size() < count) {
    Fail(ErrorCode::kModeUnsatisfiable, "source has " + std::to_string(voiced.size()) +
                                            " voiced runs, " + std::to_string(count) + " requested");
  }
  auto window_ok = [&](std::size_t first) {
    for (std::size_t k = first; k < first + count; ++k) {
      if (!usable[k]) return false;
    }
    return true;
  };
  std::size_t first = 0;
  if (mode.v_swap_start_run) {
    first = *mode.v_swap_start_run;
    if (first + count > voiced.size()) {
      Fail(ErrorCode::kModeUnsatisfiable, "voiced window starting at " + std::to_string(first) +
                                              " exceeds " + std::to_string(voiced.size()) +
                                              " voiced runs");
    }
    if (!window_ok(first)) {
      Fail(ErrorCode::kNoPairedRun, "voiced window starting at " + std::to_string(first) +
                                        " contains an unpaired run");
    }
  } else {
    const std::size_t n_windows = voiced.size() - count + 1;
    const double centre = static_cast<double>(n_windows - 1) / 2.0;
    std::optional<std::size_t> best;
    for (std::size_t w = 0; w < n_windows; ++w) {
      if (!window_ok(w)) continue;
      if (!best || std::abs(static_cast<double>(w) - centre) <
                       std::abs(static_cast<double>(*best) - centre)) {
        best = w;
      }
    }
    if (!best) Fail(ErrorCode::kNoPairedRun, "no window of consecutive paired voiced runs");
    first = *best;
  }
  return {voiced.begin() + static_cast<std::ptrdiff_t>(first),
          voiced.begin() + static_cast<std::ptrdiff_t>(first + count)};
}

}  // namespace

std::string_view MixKindName(MixKind kind) {
  switch (kind) {
    case MixKind::kSwapU: return "swap-u";
    case MixKind::kSwapVU: return "swap-vu";
    case MixKind::kSwapSSt: return "swap-sst";
  }
  return "swap-u";
}

MixKind ParseMixKind(std::string_view text) {
  if (text == "swap-u" || text == "U") return MixKind::kSwapU;
  if (text == "swap-vu" || text == "vU") return MixKind::kSwapVU;
  if (text == "swap-sst" || text == "SSt") return MixKind::kSwapSSt;
  Fail(ErrorCode::kInvalidArgument, "unknown mix mode '" + std::string(text) + "'");
}

int64_t MixRecipe::output_length() const {
  int64_t n = 0;
  for (const auto& p : pieces) n += p.length();
  return n;
}

int64_t MixRecipe::target_duration() const {
  int64_t n = 0;
  for (const auto& p : pieces) {
    if (p.origin == Origin::kTarget) n += p.length();
  }
  return n;
}

MixRecipe PlanMix(const RunSequence& src_runs, const RunSequence& tgt_runs,
                  const MappingTable& map, const MixMode& mode, const PhoneTier& src_tier,
                  const PhoneTier& tgt_tier, const ClassificationTable& table,
                  std::size_t crossfade_len) {
  if (map.pairs.size() != src_runs.size()) {
    Fail(ErrorCode::kInconsistentPath, "mapping table does not cover the source runs");
  }
  if (src_tier.end_sample() != (src_runs.runs.empty() ? 0 : src_runs.runs.back().end) ||
      tgt_tier.end_sample() != (tgt_runs.runs.empty() ? 0 : tgt_runs.runs.back().end)) {
    Fail(ErrorCode::kInconsistentPath, "run sequences do not match their tiers");
  }

  std::vector<bool> swap_voiced(src_runs.size(), false);
  if (mode.kind == MixKind::kSwapVU) {
    for (auto idx : SelectVoicedWindow(src_runs, tgt_runs, map, mode)) swap_voiced[idx] = true;
  }

  MixRecipe recipe;
  recipe.crossfade_len = crossfade_len;
  for (const auto& pair : map.pairs) {
    const Run& src = src_runs.runs[pair.source];
    const Run* tgt = pair.target ? &tgt_runs.runs[*pair.target] : nullptr;
    const bool usable = tgt != nullptr && tgt->cls == src.cls;
    if (!usable) {
      AppendPiece(recipe.pieces, Origin::kSource, src.start, src.end);
      continue;
    }
    if (src.cls == Major::kV) {
      if (swap_voiced[pair.source]) {
        AppendPiece(recipe.pieces, Origin::kTarget, tgt->start, tgt->end);
      } else {
        AppendPiece(recipe.pieces, Origin::kSource, src.start, src.end);
      }
      continue;
    }
    if (mode.kind != MixKind::kSwapSSt) {
      AppendPiece(recipe.pieces, Origin::kTarget, tgt->start, tgt->end);
      continue;
    }
    for (const auto& phone : src.phones) {
      if (IsSilenceOrStop(table.Classify(phone.label).sub)) {
        AppendPiece(recipe.pieces, Origin::kTarget, MapProportional(phone.start, src, *tgt),
                    MapProportional(phone.end, src, *tgt));
      } else {
        AppendPiece(recipe.pieces, Origin::kSource, phone.start, phone.end);
      }
    }
  }
  if (recipe.pieces.empty()) Fail(ErrorCode::kModeUnsatisfiable, "empty recipe");
  return recipe;
}

double CrossfadeWeight(std::size_t k, std::size_t n) {
  if (n <= 1) return 1.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(n - 1)));
}

std::vector<double> Crossfade(std::span<const double> tail, std::span<const double> head,
                              std::size_t n) {
  if (tail.size() < n || head.size() < n) {
    Fail(ErrorCode::kInsufficientOverlap, "crossfade of " + std::to_string(n) +
                                              " samples over " + std::to_string(tail.size()) +
                                              "/" + std::to_string(head.size()));
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    // head + w (tail - head) keeps identical inputs bit-exact.
    out[k] = head[k] + CrossfadeWeight(k, n) * (tail[k] - head[k]);
  }
  return out;
}

Waveform Render(const MixRecipe& recipe, const Waveform& src, const Waveform& tgt,
                RenderTrace* trace) {
  if (src.sample_rate != tgt.sample_rate) {
    Fail(ErrorCode::kSampleRateMismatch, std::to_string(src.sample_rate) + " vs " +
                                             std::to_string(tgt.sample_rate));
  }
  if (recipe.pieces.empty()) Fail(ErrorCode::kRangeOutOfBounds, "recipe has no pieces");
  auto origin_of = [&](const MixPiece& p) -> const Waveform& {
    return p.origin == Origin::kSource ? src : tgt;
  };
  auto gain_of = [&](const MixPiece& p) {
    return p.origin == Origin::kSource ? 1.0 : recipe.target_gain;
  };
  for (const auto& p : recipe.pieces) {
    const auto size = static_cast<int64_t>(origin_of(p).size());
    if (p.start < 0 || p.start >= p.end || p.end > size) {
      Fail(ErrorCode::kRangeOutOfBounds,
           std::string(p.origin == Origin::kSource ? "source" : "target") + " range [" +
               std::to_string(p.start) + ", " + std::to_string(p.end) + ") of " +
               std::to_string(size) + " samples");
    }
  }

  Waveform out;
  out.sample_rate = src.sample_rate;
  out.samples.reserve(static_cast<std::size_t>(recipe.output_length()));
  for (const auto& p : recipe.pieces) {
    const auto& w = origin_of(p);
    const double g = gain_of(p);
    for (int64_t k = p.start; k < p.end; ++k) {
      out.samples.push_back(g == 1.0 ? w.samples[k] : g * w.samples[k]);
    }
  }
  if (trace != nullptr) {
    trace->origin.clear();
    for (const auto& p : recipe.pieces) trace->origin.insert(trace->origin.end(), p.length(), p.origin);
    trace->in_crossfade.assign(out.samples.size(), false);
    trace->ramps.clear();
  }

  const auto half_requested = static_cast<int64_t>(recipe.crossfade_len / 2);
  int64_t junction = 0;
  std::vector<double> tail;
  std::vector<double> head;
  for (std::size_t n = 0; n + 1 < recipe.pieces.size(); ++n) {
    const MixPiece& left = recipe.pieces[n];
    const MixPiece& right = recipe.pieces[n + 1];
    junction += left.length();
    const auto& lw = origin_of(left);
    const auto& rw = origin_of(right);
    // Overlap is symmetric around the junction and shrinks to what both
    // pieces and both origin signals can supply.
    const int64_t half = std::min({half_requested, left.length() / 2, right.length() / 2,
                                   static_cast<int64_t>(lw.size()) - left.end, right.start});
    if (half <= 0) continue;
    const auto len = static_cast<std::size_t>(2 * half);
    tail.resize(len);
    head.resize(len);
    const double lg = gain_of(left);
    const double rg = gain_of(right);
    for (std::size_t k = 0; k < len; ++k) {
      const auto off = static_cast<int64_t>(k) - half;
      const double a = lw.samples[static_cast<std::size_t>(left.end + off)];
      const double b = rw.samples[static_cast<std::size_t>(right.start + off)];
      tail[k] = lg == 1.0 ? a : lg * a;
      head[k] = rg == 1.0 ? b : rg * b;
    }
    const auto ramp = Crossfade(tail, head, len);
    const int64_t first = junction - half;
    std::copy(ramp.begin(), ramp.end(), out.samples.begin() + first);
    if (trace != nullptr) {
      std::fill_n(trace->in_crossfade.begin() + first, len, true);
      trace->ramps.emplace_back(first, len);
    }
  }
  return out;
}

double UnvoicedFraction(const PhoneTier& tier, const ClassificationTable& table) {
  int64_t total = 0;
  int64_t unvoiced = 0;
  for (const auto& s : tier.segments) {
    total += s.length();
    if (table.Classify(s.label).major == Major::kU) unvoiced += s.length();
  }
  return total > 0 ? static_cast<double>(unvoiced) / static_cast<double>(total) : 0.0;
}

double MatchRmsGain(const Waveform& src, const Waveform& tgt) {
  auto rms = [](const Waveform& w) {
    double acc = 0.0;
    for (double x : w.samples) acc += x * x;
    return w.samples.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(w.samples.size()));
  };
  const double a = rms(src);
  const double b = rms(tgt);
  if (a <= 0.0 || b <= 0.0) return 1.0;
  return a / b;
}

std::vector<std::string> MixedReference(const MixRecipe& recipe, const PhoneTier& src_tier,
                                        const PhoneTier& tgt_tier) {
  std::vector<std::string> out;
  for (const auto& p : recipe.pieces) {
    const auto& tier = p.origin == Origin::kSource ? src_tier : tgt_tier;
    for (const auto& s : tier.segments) {
      const int64_t twice_mid = s.start + s.end;
      if (twice_mid >= 2 * p.start && twice_mid < 2 * p.end) out.push_back(s.label);
    }
  }
  return out;
}

std::string RecipeToJson(const MixRecipe& recipe, int indent) {
  nlohmann::json j;
  j["crossfade_len"] = recipe.crossfade_len;
  j["target_gain"] = recipe.target_gain;
  auto& pieces = j["pieces"] = nlohmann::json::array();
  for (const auto& p : recipe.pieces) {
    pieces.push_back({{"origin", p.origin == Origin::kSource ? "source" : "target"},
                      {"start", p.start},
                      {"end", p.end}});
  }
  return j.dump(indent);
}

MixRecipe RecipeFromJson(std::string_view text) {
  MixRecipe r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.crossfade_len = j.at("crossfade_len").get<std::size_t>();
    r.target_gain = j.value("target_gain", 1.0);
    for (const auto& p : j.at("pieces")) {
      const auto origin = p.at("origin").get<std::string>();
      if (origin != "source" && origin != "target") {
        Fail(ErrorCode::kInvalidArgument, "recipe origin '" + origin + "'");
      }
      r.pieces.push_back({origin == "source" ? Origin::kSource : Origin::kTarget,
                          p.at("start").get<int64_t>(), p.at("end").get<int64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("recipe JSON: ") + e.what());
  }
  return r;
}

MixPlan PlanUtteranceMix(const PhoneTier& src_tier, const PhoneTier& tgt_tier,
                         const MixMode& mode, const ClassificationTable& table,
                         std::size_t crossfade_len, const AlignCosts& costs) {
  MixPlan plan;
  plan.src_runs = ExtractRuns(src_tier, table);
  plan.tgt_runs = ExtractRuns(tgt_tier, table);
  plan.path = Align(plan.src_runs, plan.tgt_runs, costs);
  plan.map = BuildMappingTable(plan.path, plan.src_runs, plan.tgt_runs);
  plan.recipe = PlanMix(plan.src_runs, plan.tgt_runs, plan.map, mode, src_tier, tgt_tier, table,
                        crossfade_len);
  return plan;
}

}  // namespace chimera
