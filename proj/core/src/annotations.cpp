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

#include "chimera/annotations.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "chimera/error.hpp"
#include "chimera_builtin_tables.hpp"

namespace chimera {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> SplitComma(std::string_view s) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    out.push_back(Trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool ParseInt(std::string_view s, int64_t& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Calls fn(line_number, line) for every non-blank, non-comment line.
template <typename Fn>
void ForEachDataLine(std::string_view text, Fn&& fn) {
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = Trim(text.substr(start, nl == std::string_view::npos ? nl : nl - start));
    ++line_no;
    if (!line.empty() && line.front() != '#') fn(line_no, line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
}

std::string ReadWholeFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view MajorName(Major m) { return m == Major::kV ? "V" : "U"; }

std::string_view SubClassName(SubClass s) {
  switch (s) {
    case SubClass::kVowel: return "Vowel";
    case SubClass::kSemivowel: return "Semivowel";
    case SubClass::kNasal: return "Nasal";
    case SubClass::kStop: return "Stop";
    case SubClass::kClosure: return "Closure";
    case SubClass::kAffricate: return "Affricate";
    case SubClass::kFricative: return "Fricative";
    case SubClass::kSilence: return "Silence";
    case SubClass::kOther: return "Other";
  }
  return "Other";
}

Major ParseMajor(std::string_view text) {
  if (text == "V") return Major::kV;
  if (text == "U") return Major::kU;
  Fail(ErrorCode::kInvalidArgument, "unknown major class '" + std::string(text) + "'");
}

SubClass ParseSubClass(std::string_view text) {
  for (auto s : {SubClass::kVowel, SubClass::kSemivowel, SubClass::kNasal, SubClass::kStop,
                 SubClass::kClosure, SubClass::kAffricate, SubClass::kFricative,
                 SubClass::kSilence, SubClass::kOther}) {
    if (SubClassName(s) == text) return s;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown phone subclass '" + std::string(text) + "'");
}

bool IsSilenceOrStop(SubClass sub) {
  return sub == SubClass::kSilence || sub == SubClass::kStop || sub == SubClass::kClosure;
}

std::vector<std::string> PhoneTier::labels() const {
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.label);
  return out;
}

const ClassificationTable& ClassificationTable::Builtin() {
  static const ClassificationTable table =
      FromText(builtin_tables::kPhonesCsv, builtin_tables::kFoldCsv);
  return table;
}

ClassificationTable ClassificationTable::FromText(std::string_view classes_csv,
                                                  std::string_view fold_csv) {
  ClassificationTable t;
  ForEachDataLine(classes_csv, [&](size_t line_no, std::string_view line) {
    const auto cols = SplitComma(line);
    if (cols.size() != 3 || cols[0].empty()) {
      Fail(ErrorCode::kMalformedLine, "classification table line " + std::to_string(line_no));
    }
    VUClass c{ParseMajor(cols[1]), ParseSubClass(cols[2])};
    const bool voiced_sub = c.sub == SubClass::kVowel || c.sub == SubClass::kSemivowel ||
                            c.sub == SubClass::kNasal;
    if (voiced_sub != (c.major == Major::kV)) {
      Fail(ErrorCode::kInvalidArgument,
           "inconsistent major/sub for '" + std::string(cols[0]) + "'");
    }
    t.classes_[std::string(cols[0])] = c;
  });
  ForEachDataLine(fold_csv, [&](size_t line_no, std::string_view line) {
    const auto cols = SplitComma(line);
    if (cols.size() != 2 || cols[0].empty()) {
      Fail(ErrorCode::kMalformedLine, "fold table line " + std::to_string(line_no));
    }
    t.fold_[std::string(cols[0])] = std::string(cols[1]);
  });
  for (const auto& [phone, _] : t.classes_) {
    if (!t.fold_.contains(phone)) {
      Fail(ErrorCode::kUnknownPhone, "fold table has no entry for '" + phone + "'");
    }
  }
  return t;
}

ClassificationTable ClassificationTable::Load(const std::string& classes_path,
                                              const std::string& fold_path) {
  return FromText(ReadWholeFile(classes_path), ReadWholeFile(fold_path));
}

bool ClassificationTable::Contains(std::string_view label) const {
  return classes_.find(label) != classes_.end();
}

VUClass ClassificationTable::Classify(std::string_view label) const {
  const auto it = classes_.find(label);
  if (it == classes_.end()) Fail(ErrorCode::kUnknownPhone, std::string(label));
  return it->second;
}

std::string ClassificationTable::Fold(std::string_view label) const {
  const auto it = fold_.find(label);
  if (it == fold_.end()) Fail(ErrorCode::kUnknownPhone, std::string(label));
  return it->second;
}

std::vector<std::string> ClassificationTable::Inventory() const {
  std::vector<std::string> out;
  out.reserve(classes_.size());
  for (const auto& [phone, _] : classes_) out.push_back(phone);
  return out;
}

PhoneTier ParsePhn(std::string_view text, int sample_rate, const ClassificationTable* inventory) {
  PhoneTier tier;
  tier.sample_rate = sample_rate;
  ForEachDataLine(text, [&](size_t line_no, std::string_view line) {
    const auto cols = SplitWhitespace(line);
    PhoneSegment seg;
    if (cols.size() != 3 || !ParseInt(cols[0], seg.start) || !ParseInt(cols[1], seg.end)) {
      Fail(ErrorCode::kMalformedLine, "line " + std::to_string(line_no));
    }
    seg.label = std::string(cols[2]);
    if (seg.start < 0 || seg.start >= seg.end) {
      Fail(ErrorCode::kInvalidSegment, "line " + std::to_string(line_no) + ": [" +
                                           std::to_string(seg.start) + ", " +
                                           std::to_string(seg.end) + ")");
    }
    const int64_t expected = tier.segments.empty() ? 0 : tier.segments.back().end;
    if (seg.start != expected) {
      Fail(ErrorCode::kNonContiguous, "boundary " + std::to_string(expected) + " (line " +
                                          std::to_string(line_no) + ")");
    }
    if (inventory != nullptr && !inventory->Contains(seg.label)) {
      Fail(ErrorCode::kUnknownPhone, seg.label + " (line " + std::to_string(line_no) + ")");
    }
    tier.segments.push_back(std::move(seg));
  });
  if (tier.segments.empty()) Fail(ErrorCode::kEmptyTier, "annotation contains no segments");
  return tier;
}

PhoneTier ReadPhnFile(const std::string& path, int sample_rate,
                      const ClassificationTable* inventory) {
  try {
    return ParsePhn(ReadWholeFile(path), sample_rate, inventory);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.detail());
  }
}

std::string SerializePhn(const PhoneTier& tier) {
  std::string out;
  for (const auto& s : tier.segments) {
    out += std::to_string(s.start) + ' ' + std::to_string(s.end) + ' ' + s.label + '\n';
  }
  return out;
}

std::vector<TierViolation> ValidateTier(const PhoneTier& tier, int64_t n_samples) {
  std::vector<TierViolation> out;
  if (tier.segments.empty()) {
    out.push_back({"tier is empty", 0});
    return out;
  }
  if (tier.segments.front().start != 0) {
    out.push_back({"tier does not start at 0", tier.segments.front().start});
  }
  int64_t prev_end = -1;
  for (const auto& s : tier.segments) {
    if (s.start >= s.end) {
      out.push_back({"empty or inverted segment '" + s.label + "' at " + std::to_string(s.start),
                     s.start});
    }
    if (prev_end >= 0 && s.start != prev_end) {
      out.push_back({"non-contiguous at " + std::to_string(prev_end), prev_end});
    }
    prev_end = s.end;
  }
  if (n_samples >= 0 && tier.end_sample() > n_samples) {
    out.push_back({"tier exceeds waveform (" + std::to_string(tier.end_sample()) + " > " +
                       std::to_string(n_samples) + ")",
                   tier.end_sample()});
  }
  return out;
}

}  // namespace chimera
