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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chimera/annotations.hpp"
#include "chimera/random.hpp"
#include "chimera/waveform.hpp"

namespace chimera::testing {

// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("chimera-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = "") const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  std::filesystem::path path_;
};

// Contiguous tier from (label, length) pairs.
inline PhoneTier MakeTier(const std::vector<std::pair<std::string, int64_t>>& phones, int rate = 16000) {
  PhoneTier tier;
  tier.sample_rate = rate;
  int64_t t = 0;
  for (const auto& [label, len] : phones) {
    tier.segments.push_back({label, t, t + len});
    t += len;
  }
  return tier;
}

inline Waveform NoiseWave(std::size_t n, uint64_t seed, double amp = 0.3, int rate = 16000) {
  Rng rng(seed);
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (auto& x : w.samples) x = std::round(rng.Uniform(-amp, amp) * 32768.0) / 32768.0;
  return w;
}

inline Waveform SineWave(std::size_t n, double hz, double amp = 0.5, int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  }
  return w;
}

inline Waveform ConstantWave(std::size_t n, double value, int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.assign(n, value);
  return w;
}

// Random tier over the builtin inventory where V and U phones alternate in
// runs of 1..3 phones, each 200..1600 samples long.
inline PhoneTier RandomTier(Rng& rng, std::size_t n_runs, bool start_voiced) {
  static const std::vector<std::string> kV{"iy", "aa", "eh", "m", "n", "l", "r", "w", "ow", "ae"};
  static const std::vector<std::string> kU{"h#", "s", "sh", "f", "tcl", "t", "kcl", "k", "pau", "z", "ch", "bcl"};
  std::vector<std::pair<std::string, int64_t>> phones;
  bool voiced = start_voiced;
  for (std::size_t r = 0; r < n_runs; ++r) {
    const auto count = 1 + rng.Below(3);
    for (uint64_t k = 0; k < count; ++k) {
      const auto& pool = voiced ? kV : kU;
      phones.emplace_back(pool[rng.Below(pool.size())], 200 + static_cast<int64_t>(rng.Below(1400)));
    }
    voiced = !voiced;
  }
  return MakeTier(phones);
}

}  // namespace chimera::testing
