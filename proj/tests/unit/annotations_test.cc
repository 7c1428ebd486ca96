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

#include <set>

#include <gtest/gtest.h>

#include "chimera/error.hpp"
#include "test_util.hpp"

namespace chimera {
namespace {

const ClassificationTable& T() { return ClassificationTable::Builtin(); }

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(ParsePhn, ThreeSegments) {
  const auto tier = ParsePhn("0 2000 h#\n2000 5600 sh\n5600 9000 iy", 16000);
  ASSERT_EQ(tier.segments.size(), 3u);
  EXPECT_EQ(tier.segments[1], (PhoneSegment{"sh", 2000, 5600}));
  EXPECT_EQ(tier.end_sample(), 9000);
  EXPECT_EQ(tier.labels(), (std::vector<std::string>{"h#", "sh", "iy"}));
}

TEST(ParsePhn, WhitespaceTolerantAndTrailingNewline) {
  const auto tier = ParsePhn("  0\t2000   h#  \r\n2000 2500 iy\n\n", 16000);
  ASSERT_EQ(tier.segments.size(), 2u);
  EXPECT_EQ(tier.segments[0].label, "h#");
}

TEST(ParsePhn, Errors) {
  EXPECT_EQ(CodeOf([] { ParsePhn("", 16000); }), ErrorCode::kEmptyTier);
  EXPECT_EQ(CodeOf([] { ParsePhn("0 2000 h#\n2000 2000 sh", 16000); }), ErrorCode::kInvalidSegment);
  EXPECT_EQ(CodeOf([] { ParsePhn("0 2000 h#\n2100 2500 sh", 16000); }), ErrorCode::kNonContiguous);
  EXPECT_EQ(CodeOf([] { ParsePhn("100 2000 h#", 16000); }), ErrorCode::kNonContiguous);
  EXPECT_EQ(CodeOf([] { ParsePhn("0 2000", 16000); }), ErrorCode::kMalformedLine);
  EXPECT_EQ(CodeOf([] { ParsePhn("0 x h#", 16000); }), ErrorCode::kMalformedLine);
  EXPECT_EQ(CodeOf([] { ParsePhn("0 2000 xx", 16000, &T()); }), ErrorCode::kUnknownPhone);
  // Without an inventory unknown labels are accepted.
  EXPECT_NO_THROW(ParsePhn("0 2000 xx", 16000));
}

TEST(ParsePhn, MalformedLineNumberReported) {
  try {
    ParsePhn("0 10 h#\n10 20 iy\nbad line here too", 16000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedLine);
    EXPECT_NE(e.detail().find("line 3"), std::string::npos);
  }
}

TEST(ParsePhn, SerializeRoundTripProperty) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tier = testing::RandomTier(rng, 1 + rng.Below(12), rng.Bernoulli(0.5));
    EXPECT_EQ(ParsePhn(SerializePhn(tier), 16000, &T()), tier);
  }
}

TEST(Classify, BroadClasses) {
  EXPECT_EQ(Classify("iy", T()), (VUClass{Major::kV, SubClass::kVowel}));
  EXPECT_EQ(Classify("s", T()), (VUClass{Major::kU, SubClass::kFricative}));
  EXPECT_EQ(Classify("h#", T()), (VUClass{Major::kU, SubClass::kSilence}));
  EXPECT_EQ(Classify("kcl", T()), (VUClass{Major::kU, SubClass::kClosure}));
  EXPECT_EQ(Classify("m", T()), (VUClass{Major::kV, SubClass::kNasal}));
  EXPECT_EQ(Classify("l", T()), (VUClass{Major::kV, SubClass::kSemivowel}));
  EXPECT_EQ(CodeOf([] { Classify("xyz", T()); }), ErrorCode::kUnknownPhone);
}

TEST(Classify, ConfiguredObstruentDefaults) {
  for (const char* p : {"b", "d", "g", "dx", "q"}) EXPECT_EQ(Classify(p, T()).major, Major::kU) << p;
  for (const char* p : {"v", "z", "zh", "dh", "hv", "hh"}) {
    EXPECT_EQ(Classify(p, T()), (VUClass{Major::kU, SubClass::kFricative})) << p;
  }
  EXPECT_EQ(Classify("jh", T()).sub, SubClass::kAffricate);
  for (const char* p : {"pau", "epi", "h#"}) EXPECT_EQ(Classify(p, T()).sub, SubClass::kSilence) << p;
}

TEST(Classify, InventoryIsTimit61AndConsistent) {
  const auto inv = T().Inventory();
  EXPECT_EQ(inv.size(), 61u);
  for (const auto& p : inv) {
    const auto c = Classify(p, T());
    const bool voiced_sub =
        c.sub == SubClass::kVowel || c.sub == SubClass::kSemivowel || c.sub == SubClass::kNasal;
    EXPECT_EQ(voiced_sub, c.major == Major::kV) << p;
    EXPECT_NE(c.sub, SubClass::kOther) << p;
  }
}

TEST(Fold, StandardReductions) {
  EXPECT_EQ(Fold("ux", T()), "uw");
  EXPECT_EQ(Fold("iy", T()), "iy");
  EXPECT_EQ(Fold("zh", T()), "sh");
  EXPECT_EQ(Fold("pcl", T()), "sil");
  EXPECT_EQ(Fold("h#", T()), "sil");
  EXPECT_EQ(Fold("ao", T()), "aa");
  EXPECT_EQ(Fold("q", T()), "");
}

TEST(Fold, IdempotentAndThirtyNineSymbols) {
  std::set<std::string> folded;
  for (const auto& p : T().Inventory()) {
    const auto f = Fold(p, T());
    if (f.empty()) continue;
    folded.insert(f);
    EXPECT_EQ(Fold(f, T()), f) << p;
  }
  EXPECT_EQ(folded.size(), 39u);
}

TEST(ClassificationTable, RejectsInconsistentOrPartialTables) {
  EXPECT_EQ(CodeOf([] { ClassificationTable::FromText("iy,U,Vowel\n", "iy,iy\n"); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { ClassificationTable::FromText("iy,V,Vowel\ns,U,Fricative\n", "iy,iy\n"); }),
            ErrorCode::kUnknownPhone);
  EXPECT_EQ(CodeOf([] { ClassificationTable::FromText("iy,V\n", ""); }), ErrorCode::kMalformedLine);
  const auto t = ClassificationTable::FromText("# comment\nphone_a,V,Vowel\n", "phone_a,a\n");
  EXPECT_EQ(t.Classify("phone_a").major, Major::kV);
}

TEST(ValidateTier, Reports) {
  const auto tier = testing::MakeTier({{"h#", 2000}, {"sh", 3600}, {"iy", 3400}});
  EXPECT_TRUE(ValidateTier(tier, 9000).empty());
  const auto over = ValidateTier(tier, 8400);
  ASSERT_EQ(over.size(), 1u);
  EXPECT_NE(over[0].message.find("tier exceeds waveform"), std::string::npos);

  PhoneTier gappy = tier;
  gappy.segments[2].start = 5700;
  gappy.segments[2].end = 9600;
  const auto report = ValidateTier(gappy, 9000);
  ASSERT_EQ(report.size(), 2u);  // every violation, not just the first
  EXPECT_EQ(report[0].message, "non-contiguous at 5600");
  EXPECT_NE(report[1].message.find("tier exceeds waveform"), std::string::npos);
  EXPECT_TRUE(ValidateTier(tier, -1).empty());
}

}  // namespace
}  // namespace chimera
