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

#include "chimera/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>

#include "chimera/error.hpp"

namespace chimera {
namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    std::lock_guard lock(PlannerMutex());
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(PlannerMutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::span<double> input() { return {in_, n_}; }

  // Squared magnitude of bins 0..n/2.
  void PowerSpectrum(std::span<double> power) {
    fftw_execute(plan_);
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      power[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

void CheckFraming(std::size_t n, std::size_t window_len, std::size_t hop, std::size_t fft_size) {
  if (hop == 0) Fail(ErrorCode::kInvalidArgument, "hop must be >= 1");
  if (window_len == 0 || window_len > fft_size) {
    Fail(ErrorCode::kInvalidArgument, "window length " + std::to_string(window_len) +
                                          " must be in [1, fft_size=" + std::to_string(fft_size) + "]");
  }
  if (n < window_len) {
    Fail(ErrorCode::kSignalTooShort, std::to_string(n) + " samples, window is " +
                                         std::to_string(window_len));
  }
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<uint8_t>((v >> (8 * k)) & 0xff));
}

uint32_t GetU32(std::span<const uint8_t> b, std::size_t at) {
  return static_cast<uint32_t>(b[at]) | (static_cast<uint32_t>(b[at + 1]) << 8) |
         (static_cast<uint32_t>(b[at + 2]) << 16) | (static_cast<uint32_t>(b[at + 3]) << 24);
}

}  // namespace

std::size_t FrameCount(std::size_t n_samples, std::size_t window_len, std::size_t hop) {
  if (hop == 0 || n_samples < window_len) return 0;
  return (n_samples - window_len) / hop + 1;
}

std::vector<double> HammingWindow(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  }
  return w;
}

Spectrogram ComputeSpectrogram(const Waveform& w, std::size_t window_len, std::size_t hop,
                               std::size_t fft_size) {
  CheckFraming(w.size(), window_len, hop, fft_size);
  Spectrogram s;
  s.frames = FrameCount(w.size(), window_len, hop);
  s.bins = fft_size / 2 + 1;
  s.window_len = window_len;
  s.hop = hop;
  s.fft_size = fft_size;
  s.sample_rate = w.sample_rate;
  s.db.resize(s.frames * s.bins);

  const auto window = HammingWindow(window_len);
  RealFft fft(fft_size);
  std::vector<double> power(s.bins);
  for (std::size_t t = 0; t < s.frames; ++t) {
    auto in = fft.input();
    std::fill(in.begin(), in.end(), 0.0);
    for (std::size_t i = 0; i < window_len; ++i) in[i] = w.samples[t * hop + i] * window[i];
    fft.PowerSpectrum(power);
    for (std::size_t k = 0; k < s.bins; ++k) {
      // 20 log10 |X| == 10 log10 |X|^2
      const double db = power[k] > 0.0 ? 10.0 * std::log10(power[k]) : kSpectrogramFloorDb;
      s.db[t * s.bins + k] = std::max(db, kSpectrogramFloorDb);
    }
  }
  return s;
}

std::string SpectrogramToText(const Spectrogram& s) {
  std::ostringstream os;
  os.precision(6);
  os << "# frames=" << s.frames << " bins=" << s.bins << " hop=" << s.hop
     << " window=" << s.window_len << " fft=" << s.fft_size << " rate=" << s.sample_rate << '\n';
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t k = 0; k < s.bins; ++k) {
      if (k) os << '\t';
      os << s.at(t, k);
    }
    os << '\n';
  }
  return os.str();
}

std::vector<uint8_t> SpectrogramToPgm(const Spectrogram& s, double dynamic_range_db) {
  const std::string header = "P5\n" + std::to_string(s.frames) + " " + std::to_string(s.bins) +
                             "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  double peak = kSpectrogramFloorDb;
  for (double v : s.db) peak = std::max(peak, v);
  for (std::size_t row = 0; row < s.bins; ++row) {
    const std::size_t k = s.bins - 1 - row;
    for (std::size_t t = 0; t < s.frames; ++t) {
      const double rel = std::clamp((s.at(t, k) - (peak - dynamic_range_db)) / dynamic_range_db, 0.0, 1.0);
      // dark = loud, as in printed spectrograms
      out.push_back(static_cast<uint8_t>(std::lround(255.0 * (1.0 - rel))));
    }
  }
  return out;
}

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

MelFilterbank::MelFilterbank(const MfccConfig& cfg) {
  const double nyquist = 0.5 * cfg.sample_rate;
  const double high = cfg.high_freq > 0.0 ? cfg.high_freq : nyquist;
  if (cfg.num_mel == 0 || cfg.low_freq < 0.0 || high <= cfg.low_freq || high > nyquist) {
    Fail(ErrorCode::kInvalidArgument, "bad mel filterbank range");
  }
  const double lo = HzToMel(cfg.low_freq);
  const double hi = HzToMel(high);
  const std::size_t points = cfg.num_mel + 2;
  centres_mel_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    centres_mel_[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  num_bins_ = cfg.fft_size / 2 + 1;
  weights_.assign(cfg.num_mel * num_bins_, 0.0);
  for (std::size_t m = 0; m < cfg.num_mel; ++m) {
    for (std::size_t k = 0; k < num_bins_; ++k) {
      const double hz = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(cfg.fft_size);
      weights_[m * num_bins_ + k] = Weight(m, hz);
    }
  }
}

double MelFilterbank::Weight(std::size_t m, double hz) const {
  const double mel = HzToMel(hz);
  const double left = centres_mel_[m];
  const double centre = centres_mel_[m + 1];
  const double right = centres_mel_[m + 2];
  if (mel <= left || mel >= right) return 0.0;
  return mel <= centre ? (mel - left) / (centre - left) : (right - mel) / (right - centre);
}

std::vector<double> DctMatrix(std::size_t num_ceps, std::size_t num_inputs) {
  std::vector<double> d(num_ceps * num_inputs);
  const double n = static_cast<double>(num_inputs);
  for (std::size_t k = 0; k < num_ceps; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t m = 0; m < num_inputs; ++m) {
      d[k * num_inputs + m] =
          scale * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(m) + 0.5) / n);
    }
  }
  return d;
}

FeatureMatrix ComputeMfcc(const Waveform& w, const MfccConfig& cfg) {
  if (w.sample_rate != cfg.sample_rate) {
    Fail(ErrorCode::kSampleRateMismatch, "waveform at " + std::to_string(w.sample_rate) +
                                             " Hz, features configured for " +
                                             std::to_string(cfg.sample_rate) + " Hz");
  }
  CheckFraming(w.size(), cfg.frame_len, cfg.frame_hop, cfg.fft_size);
  if (cfg.num_ceps > cfg.num_mel) Fail(ErrorCode::kInvalidArgument, "more cepstra than filters");

  const std::size_t frames = FrameCount(w.size(), cfg.frame_len, cfg.frame_hop);
  FeatureMatrix out(frames, cfg.num_ceps);
  out.frame_hop = cfg.frame_hop;
  out.frame_len = cfg.frame_len;
  out.kind = "mfcc";

  const MelFilterbank bank(cfg);
  const auto dct = DctMatrix(cfg.num_ceps, cfg.num_mel);
  const auto window = HammingWindow(cfg.frame_len);
  RealFft fft(cfg.fft_size);
  std::vector<double> frame(cfg.frame_len);
  std::vector<double> power(cfg.fft_size / 2 + 1);
  std::vector<double> log_mel(cfg.num_mel);

  for (std::size_t t = 0; t < frames; ++t) {
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(t * cfg.frame_hop), cfg.frame_len,
                frame.begin());
    for (std::size_t i = cfg.frame_len - 1; i > 0; --i) frame[i] -= cfg.preemphasis * frame[i - 1];
    frame[0] -= cfg.preemphasis * frame[0];

    auto in = fft.input();
    std::fill(in.begin(), in.end(), 0.0);
    for (std::size_t i = 0; i < cfg.frame_len; ++i) in[i] = frame[i] * window[i];
    fft.PowerSpectrum(power);

    for (std::size_t m = 0; m < cfg.num_mel; ++m) {
      const auto row = bank.row(m);
      double e = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) e += row[k] * power[k];
      log_mel[m] = std::log(std::max(e, cfg.log_floor));
    }
    for (std::size_t c = 0; c < cfg.num_ceps; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m < cfg.num_mel; ++m) acc += dct[c * cfg.num_mel + m] * log_mel[m];
      out.at(t, c) = acc;
    }
  }

  if (cfg.cepstral_mean_norm && frames > 0) {
    for (std::size_t c = 0; c < cfg.num_ceps; ++c) {
      double mean = 0.0;
      for (std::size_t t = 0; t < frames; ++t) mean += out.at(t, c);
      mean /= static_cast<double>(frames);
      for (std::size_t t = 0; t < frames; ++t) out.at(t, c) -= mean;
    }
  }
  return out;
}

FeatureMatrix ComputeDeltas(const FeatureMatrix& x, std::size_t window) {
  FeatureMatrix d(x.rows, x.cols);
  d.frame_hop = x.frame_hop;
  d.frame_len = x.frame_len;
  d.kind = x.kind;
  if (x.rows == 0 || window == 0) return d;
  double denom = 0.0;
  for (std::size_t k = 1; k <= window; ++k) denom += static_cast<double>(k * k);
  denom *= 2.0;
  const auto last = static_cast<std::ptrdiff_t>(x.rows) - 1;
  for (std::size_t t = 0; t < x.rows; ++t) {
    for (std::size_t k = 1; k <= window; ++k) {
      const auto ti = static_cast<std::ptrdiff_t>(t);
      const auto kk = static_cast<std::ptrdiff_t>(k);
      const auto fwd = static_cast<std::size_t>(std::min(ti + kk, last));
      const auto bwd = static_cast<std::size_t>(std::max<std::ptrdiff_t>(ti - kk, 0));
      for (std::size_t c = 0; c < x.cols; ++c) {
        d.at(t, c) += static_cast<double>(k) * (x.at(fwd, c) - x.at(bwd, c));
      }
    }
    for (std::size_t c = 0; c < x.cols; ++c) d.at(t, c) /= denom;
  }
  return d;
}

FeatureMatrix ComputeMfcc39(const Waveform& w, const MfccConfig& cfg) {
  FeatureMatrix base = ComputeMfcc(w, cfg);
  if (!cfg.add_deltas) return base;
  const FeatureMatrix d1 = ComputeDeltas(base, cfg.delta_window);
  const FeatureMatrix d2 = ComputeDeltas(d1, cfg.delta_window);
  FeatureMatrix out(base.rows, 3 * base.cols);
  out.frame_hop = base.frame_hop;
  out.frame_len = base.frame_len;
  out.kind = "mfcc_d_dd";
  for (std::size_t t = 0; t < base.rows; ++t) {
    for (std::size_t c = 0; c < base.cols; ++c) {
      out.at(t, c) = base.at(t, c);
      out.at(t, base.cols + c) = d1.at(t, c);
      out.at(t, 2 * base.cols + c) = d2.at(t, c);
    }
  }
  return out;
}

std::vector<uint8_t> WriteFeatureArchive(const FeatureMatrix& m) {
  std::vector<uint8_t> out;
  out.reserve(16 + 4 * m.data.size());
  PutU32(out, static_cast<uint32_t>(m.rows));
  PutU32(out, static_cast<uint32_t>(m.cols));
  PutU32(out, static_cast<uint32_t>(m.frame_hop));
  PutU32(out, static_cast<uint32_t>(m.frame_len));
  for (double v : m.data) {
    const auto f = static_cast<float>(v);
    uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof bits);
    PutU32(out, bits);
  }
  return out;
}

FeatureMatrix ReadFeatureArchive(std::span<const uint8_t> bytes) {
  if (bytes.size() < 16) Fail(ErrorCode::kTruncatedFile, "feature archive header");
  FeatureMatrix m(GetU32(bytes, 0), GetU32(bytes, 4));
  m.frame_hop = GetU32(bytes, 8);
  m.frame_len = GetU32(bytes, 12);
  if (bytes.size() != 16 + 4 * m.data.size()) {
    Fail(ErrorCode::kTruncatedFile, "feature archive declares " + std::to_string(m.rows) + "x" +
                                        std::to_string(m.cols) + " but holds " +
                                        std::to_string(bytes.size() - 16) + " payload bytes");
  }
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const uint32_t bits = GetU32(bytes, 16 + 4 * i);
    float f = 0.0F;
    std::memcpy(&f, &bits, sizeof f);
    m.data[i] = f;
  }
  return m;
}

}  // namespace chimera
