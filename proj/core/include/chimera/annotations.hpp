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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chimera {

enum class Major { kV, kU };

enum class SubClass {
  kVowel,
  kSemivowel,
  kNasal,
  kStop,
  kClosure,
  kAffricate,
  kFricative,
  kSilence,
  kOther,
};

std::string_view MajorName(Major m);
std::string_view SubClassName(SubClass s);
Major ParseMajor(std::string_view text);
SubClass ParseSubClass(std::string_view text);

struct VUClass {
  Major major = Major::kU;
  SubClass sub = SubClass::kOther;

  bool operator==(const VUClass&) const = default;
};

// Silence, stops and closures: the subset swapped by the SSt mix mode.
bool IsSilenceOrStop(SubClass sub);

struct PhoneSegment {
  std::string label;
  int64_t start = 0;  // sample index, inclusive
  int64_t end = 0;    // sample index, exclusive

  int64_t length() const { return end - start; }
  bool operator==(const PhoneSegment&) const = default;
};

struct PhoneTier {
  std::vector<PhoneSegment> segments;
  int sample_rate = 16000;

  int64_t end_sample() const { return segments.empty() ? 0 : segments.back().end; }
  std::vector<std::string> labels() const;
  bool operator==(const PhoneTier&) const = default;
};

// Phone inventory with its V/U classification and the scoring fold. Both
// maps come from data files ("phone,major,sub" and "phone,folded").
class ClassificationTable {
 public:
  ClassificationTable() = default;

  // Tables shipped with the library (TIMIT 61-phone inventory, 39-set fold).
  static const ClassificationTable& Builtin();
  static ClassificationTable FromText(std::string_view classes_csv,
                                      std::string_view fold_csv);
  static ClassificationTable Load(const std::string& classes_path,
                                  const std::string& fold_path);

  bool Contains(std::string_view label) const;
  VUClass Classify(std::string_view label) const;
  // Empty result means the phone is dropped before scoring.
  std::string Fold(std::string_view label) const;

  std::vector<std::string> Inventory() const;

 private:
  std::map<std::string, VUClass, std::less<>> classes_;
  std::map<std::string, std::string, std::less<>> fold_;
};

inline VUClass Classify(std::string_view label, const ClassificationTable& table) {
  return table.Classify(label);
}
inline std::string Fold(std::string_view label, const ClassificationTable& table) {
  return table.Fold(label);
}

// Parses TIMIT .PHN text: one "begin end label" line per phone, sample units.
// When `inventory` is given every label must belong to it.
PhoneTier ParsePhn(std::string_view text, int sample_rate,
                   const ClassificationTable* inventory = nullptr);
PhoneTier ReadPhnFile(const std::string& path, int sample_rate,
                      const ClassificationTable* inventory = nullptr);
std::string SerializePhn(const PhoneTier& tier);

struct TierViolation {
  std::string message;
  int64_t at = 0;
};

// Collects every problem instead of stopping at the first one. A negative
// `n_samples` skips the waveform length check.
std::vector<TierViolation> ValidateTier(const PhoneTier& tier, int64_t n_samples);

}  // namespace chimera
