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

#include "chimera/waveform.hpp"

#include <cstring>

#include <gtest/gtest.h>

#include "chimera/error.hpp"
#include "test_util.hpp"

namespace chimera {
namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

void Put16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back(v >> 8);
}
void Put32(std::vector<uint8_t>& b, uint32_t v) {
  for (int k = 0; k < 4; ++k) b.push_back((v >> (8 * k)) & 0xff);
}

// Hand-assembled RIFF file, independent of WriteWav.
std::vector<uint8_t> BuildWav(const std::vector<int16_t>& pcm, uint16_t channels = 1,
                              uint16_t bits = 16, uint16_t format = 1, uint32_t rate = 16000,
                              bool extra_chunk = false) {
  std::vector<uint8_t> body;
  body.insert(body.end(), {'W', 'A', 'V', 'E'});
  if (extra_chunk) {
    body.insert(body.end(), {'L', 'I', 'S', 'T'});
    Put32(body, 3);
    body.insert(body.end(), {'a', 'b', 'c', 0});  // odd size, padded
  }
  body.insert(body.end(), {'f', 'm', 't', ' '});
  Put32(body, 16);
  Put16(body, format);
  Put16(body, channels);
  Put32(body, rate);
  Put32(body, rate * channels * bits / 8);
  Put16(body, channels * bits / 8);
  Put16(body, bits);
  body.insert(body.end(), {'d', 'a', 't', 'a'});
  Put32(body, static_cast<uint32_t>(pcm.size() * 2));
  for (int16_t s : pcm) Put16(body, static_cast<uint16_t>(s));
  std::vector<uint8_t> out{'R', 'I', 'F', 'F'};
  Put32(out, static_cast<uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

TEST(ReadWav, HandBuiltFile) {
  const auto w = ReadWav(BuildWav({0, 16384, -32768, 32767, -1}));
  EXPECT_EQ(w.sample_rate, 16000);
  ASSERT_EQ(w.size(), 5u);
  EXPECT_EQ(w.samples[0], 0.0);
  EXPECT_EQ(w.samples[1], 0.5);
  EXPECT_EQ(w.samples[2], -1.0);
  EXPECT_EQ(w.samples[3], 32767.0 / 32768.0);
  EXPECT_EQ(w.samples[4], -1.0 / 32768.0);
}

TEST(ReadWav, SkipsUnknownChunks) {
  const auto w = ReadWav(BuildWav({100, 200}, 1, 16, 1, 16000, true));
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.samples[1], 200.0 / 32768.0);
}

TEST(WriteWav, MatchesHandBuiltBytes) {
  Waveform w;
  w.samples = {0.0, 0.5, -1.0, -1.0 / 32768.0};
  EXPECT_EQ(WriteWav(w), BuildWav({0, 16384, -32768, -1}));
}

TEST(WriteWav, RoundTripIsLosslessOnPcmGrid) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const auto w = testing::NoiseWave(1 + seed * 37, seed, 0.99);
    const auto back = ReadWav(WriteWav(w));
    EXPECT_EQ(back.samples, w.samples);
    EXPECT_EQ(back.sample_rate, w.sample_rate);
  }
}

TEST(QuantizeSample, ClipsAndRounds) {
  EXPECT_EQ(QuantizeSample(0.0), 0);
  EXPECT_EQ(QuantizeSample(2.0), 32767);
  EXPECT_EQ(QuantizeSample(-2.0), -32768);
  EXPECT_EQ(QuantizeSample(0.5), 16384);
  EXPECT_EQ(QuantizeSample(1.4 / 32768.0), 1);
}

TEST(ReadWav, FormatErrors) {
  EXPECT_EQ(CodeOf([] { ReadWav(BuildWav({1, 2}, 2)); }), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(CodeOf([] { ReadWav(BuildWav({1, 2}, 1, 8)); }), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(CodeOf([] { ReadWav(BuildWav({1, 2}, 1, 16, 3)); }), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(CodeOf([] { ReadWav(BuildWav({1, 2}, 1, 16, 1, 0)); }), ErrorCode::kUnsupportedFormat);
  auto bytes = BuildWav({1, 2});
  std::memcpy(bytes.data(), "RIFX", 4);
  EXPECT_EQ(CodeOf([&] { ReadWav(bytes); }), ErrorCode::kUnsupportedFormat);
}

TEST(ReadWav, TruncationErrors) {
  const auto good = BuildWav({1, 2, 3, 4});
  EXPECT_EQ(CodeOf([] { ReadWav(std::vector<uint8_t>{'R', 'I'}); }), ErrorCode::kTruncatedFile);
  auto cut = good;
  cut.resize(cut.size() - 3);
  EXPECT_EQ(CodeOf([&] { ReadWav(cut); }), ErrorCode::kTruncatedFile);
  auto lying = good;
  lying[4] += 40;  // RIFF size beyond the file
  EXPECT_EQ(CodeOf([&] { ReadWav(lying); }), ErrorCode::kTruncatedFile);
}

TEST(WavFile, RoundTripAndRateCheck) {
  testing::TempDir dir;
  const auto w = testing::NoiseWave(321, 5);
  WriteWavFile(dir.str("a.wav"), w);
  EXPECT_EQ(ReadWavFile(dir.str("a.wav"), 16000).samples, w.samples);
  EXPECT_EQ(CodeOf([&] { ReadWavFile(dir.str("a.wav"), 8000); }), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(CodeOf([&] { ReadWavFile(dir.str("missing.wav")); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace chimera
