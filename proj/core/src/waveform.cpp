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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "chimera/error.hpp"

namespace chimera {
namespace {

constexpr uint16_t kFormatPcm = 1;

uint32_t ReadU32(std::span<const uint8_t> b, std::size_t at) {
  return static_cast<uint32_t>(b[at]) | (static_cast<uint32_t>(b[at + 1]) << 8) |
         (static_cast<uint32_t>(b[at + 2]) << 16) | (static_cast<uint32_t>(b[at + 3]) << 24);
}

uint16_t ReadU16(std::span<const uint8_t> b, std::size_t at) {
  return static_cast<uint16_t>(b[at] | (b[at + 1] << 8));
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<uint8_t>((v >> (8 * k)) & 0xff));
}

void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

bool TagIs(std::span<const uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

int16_t QuantizeSample(double x) {
  const double scaled = std::nearbyint(x * 32768.0);
  return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

Waveform ReadWav(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12) Fail(ErrorCode::kTruncatedFile, "shorter than a RIFF header");
  if (!TagIs(bytes, 0, "RIFF") || !TagIs(bytes, 8, "WAVE")) {
    Fail(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");
  }
  const uint64_t riff_size = ReadU32(bytes, 4);
  if (riff_size + 8 > bytes.size()) {
    Fail(ErrorCode::kTruncatedFile, "RIFF size " + std::to_string(riff_size) + " exceeds file size " +
                                        std::to_string(bytes.size()));
  }

  Waveform wave;
  bool have_fmt = false;
  std::size_t pos = 12;
  const std::size_t limit = static_cast<std::size_t>(riff_size + 8);
  while (pos + 8 <= limit) {
    const uint32_t chunk_size = ReadU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > limit) {
      Fail(ErrorCode::kTruncatedFile, "chunk at offset " + std::to_string(pos) + " declares " +
                                          std::to_string(chunk_size) + " bytes, only " +
                                          std::to_string(limit - body) + " remain");
    }
    if (TagIs(bytes, pos, "fmt ")) {
      if (chunk_size < 16) Fail(ErrorCode::kUnsupportedFormat, "fmt chunk too small");
      const uint16_t format = ReadU16(bytes, body);
      const uint16_t channels = ReadU16(bytes, body + 2);
      const uint32_t rate = ReadU32(bytes, body + 4);
      const uint16_t bits = ReadU16(bytes, body + 14);
      if (format != kFormatPcm) {
        Fail(ErrorCode::kUnsupportedFormat, "format tag " + std::to_string(format) + ", expected PCM (1)");
      }
      if (channels != 1) {
        Fail(ErrorCode::kUnsupportedFormat, std::to_string(channels) + " channels, expected mono");
      }
      if (bits != 16) {
        Fail(ErrorCode::kUnsupportedFormat, std::to_string(bits) + " bits per sample, expected 16");
      }
      if (rate == 0) Fail(ErrorCode::kUnsupportedFormat, "sample rate 0");
      wave.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (TagIs(bytes, pos, "data")) {
      if (!have_fmt) Fail(ErrorCode::kUnsupportedFormat, "data chunk before fmt chunk");
      if (chunk_size % 2 != 0) Fail(ErrorCode::kTruncatedFile, "odd PCM16 data size");
      const std::size_t n = chunk_size / 2;
      wave.samples.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        const auto v = static_cast<int16_t>(ReadU16(bytes, body + 2 * k));
        wave.samples[k] = static_cast<double>(v) / 32768.0;
      }
      return wave;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  Fail(ErrorCode::kTruncatedFile, "no data chunk");
}

std::vector<uint8_t> WriteWav(const Waveform& wave) {
  const auto data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(out, data_bytes);
  for (double x : wave.samples) PutU16(out, static_cast<uint16_t>(QuantizeSample(x)));
  return out;
}

std::vector<uint8_t> ReadBinaryFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteBinaryFile(const std::string& path, std::span<const uint8_t> bytes) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path);
}

Waveform ReadWavFile(const std::string& path, int expected_rate) {
  const auto bytes = ReadBinaryFile(path);
  Waveform w;
  try {
    w = ReadWav(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
  if (expected_rate != 0 && w.sample_rate != expected_rate) {
    Fail(ErrorCode::kUnsupportedFormat, path + ": sample rate " + std::to_string(w.sample_rate) +
                                            " Hz, expected " + std::to_string(expected_rate) + " Hz");
  }
  return w;
}

void WriteWavFile(const std::string& path, const Waveform& wave) {
  const auto bytes = WriteWav(wave);
  WriteBinaryFile(path, bytes);
}

}  // namespace chimera
