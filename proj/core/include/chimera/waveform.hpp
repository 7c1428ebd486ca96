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
#include <span>
#include <string>
#include <vector>

namespace chimera {

// Mono signal with amplitudes in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// RIFF/WAVE, 16-bit PCM, mono. Samples are scaled by 1/32768.
Waveform ReadWav(std::span<const uint8_t> bytes);
std::vector<uint8_t> WriteWav(const Waveform& wave);

// Like ReadWav, additionally rejecting files whose rate differs from
// `expected_rate` (0 accepts any rate).
Waveform ReadWavFile(const std::string& path, int expected_rate = 0);
void WriteWavFile(const std::string& path, const Waveform& wave);

int16_t QuantizeSample(double x);

std::vector<uint8_t> ReadBinaryFile(const std::string& path);
void WriteBinaryFile(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace chimera
