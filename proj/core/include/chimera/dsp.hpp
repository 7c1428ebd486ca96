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

#include "chimera/waveform.hpp"

namespace chimera {

// T x D row-major matrix of per-frame features.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::size_t frame_hop = 160;
  std::size_t frame_len = 400;
  std::string kind = "mfcc";

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t t, std::size_t d) : rows(t), cols(d), data(t * d, 0.0) {}

  double& at(std::size_t t, std::size_t d) { return data[t * cols + d]; }
  double at(std::size_t t, std::size_t d) const { return data[t * cols + d]; }
  std::span<const double> row(std::size_t t) const { return {data.data() + t * cols, cols}; }
  std::span<double> row(std::size_t t) { return {data.data() + t * cols, cols}; }
};

struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;  // fft_size / 2 + 1
  std::vector<double> db;  // frames x bins, row-major
  std::size_t window_len = 0;
  std::size_t hop = 0;
  std::size_t fft_size = 0;
  int sample_rate = 0;

  double at(std::size_t t, std::size_t f) const { return db[t * bins + f]; }
};

inline constexpr double kSpectrogramFloorDb = -120.0;

// floor((n - window_len) / hop) + 1, or 0 when the signal is shorter than a window.
std::size_t FrameCount(std::size_t n_samples, std::size_t window_len, std::size_t hop);

std::vector<double> HammingWindow(std::size_t n);

Spectrogram ComputeSpectrogram(const Waveform& w, std::size_t window_len, std::size_t hop,
                               std::size_t fft_size);
// Tab-separated dump: one line per frame, one column per bin (dB).
std::string SpectrogramToText(const Spectrogram& s);
// Binary greyscale PGM (P5), time on the x axis, low frequencies at the bottom.
std::vector<uint8_t> SpectrogramToPgm(const Spectrogram& s, double dynamic_range_db = 80.0);

struct MfccConfig {
  int sample_rate = 16000;
  std::size_t frame_len = 400;  // 25 ms
  std::size_t frame_hop = 160;  // 10 ms
  std::size_t fft_size = 512;
  std::size_t num_mel = 26;
  std::size_t num_ceps = 13;  // C0 included
  double preemphasis = 0.97;
  double low_freq = 20.0;
  double high_freq = 0.0;  // <= 0 means Nyquist
  double log_floor = 1e-10;
  std::size_t delta_window = 2;
  bool add_deltas = true;
  bool cepstral_mean_norm = false;
};

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters equally spaced on the mel scale.
class MelFilterbank {
 public:
  MelFilterbank(const MfccConfig& cfg);

  std::size_t num_filters() const { return centres_mel_.size() - 2; }
  std::size_t num_bins() const { return num_bins_; }
  // Weight of filter m at an arbitrary frequency.
  double Weight(std::size_t m, double hz) const;
  // Edge/centre frequencies on the mel scale: num_filters + 2 points.
  const std::vector<double>& edges_mel() const { return centres_mel_; }
  std::span<const double> row(std::size_t m) const {
    return {weights_.data() + m * num_bins_, num_bins_};
  }

 private:
  std::vector<double> centres_mel_;
  std::size_t num_bins_ = 0;
  std::vector<double> weights_;
};

// Orthonormal DCT-II rows: num_ceps x num_inputs.
std::vector<double> DctMatrix(std::size_t num_ceps, std::size_t num_inputs);

// Static MFCCs (num_ceps columns).
FeatureMatrix ComputeMfcc(const Waveform& w, const MfccConfig& cfg = {});
// Static MFCCs with delta and delta-delta appended (3 * num_ceps columns).
FeatureMatrix ComputeMfcc39(const Waveform& w, const MfccConfig& cfg = {});

// Regression deltas sum_k k (x[t+k] - x[t-k]) / (2 sum_k k^2), edges replicated.
FeatureMatrix ComputeDeltas(const FeatureMatrix& x, std::size_t window = 2);

// Flat archive: little-endian uint32 T, D, hop, len, then T*D float32 row-major.
std::vector<uint8_t> WriteFeatureArchive(const FeatureMatrix& m);
FeatureMatrix ReadFeatureArchive(std::span<const uint8_t> bytes);

}  // namespace chimera
