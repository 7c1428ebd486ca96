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

#include "chimera/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fmt/format.h>
#include <sstream>

#include "chimera/error.hpp"
#include "chimera/waveform.hpp"

namespace chimera {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string EnvName(std::string_view prefix, std::string_view key) {
  std::string out(prefix);
  for (char c : key) {
    out.push_back(c == '.' || c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::string_view text) {
  KeyValueConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') Fail(ErrorCode::kMalformedLine, fmt::format("config line {}: bad section", line_no));
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kMalformedLine, fmt::format("config line {}: expected key = value", line_no));
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string_view value = Trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) Fail(ErrorCode::kMalformedLine, fmt::format("config line {}: empty key", line_no));
    cfg.values_[section.empty() ? key : section + "." + key] = std::string(value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::Load(const std::string& path) {
  const auto bytes = ReadBinaryFile(path);
  return Parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

bool KeyValueConfig::Has(std::string_view key) const { return values_.contains(key); }

std::optional<std::string> KeyValueConfig::Get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::GetString(std::string_view key, std::string fallback) const {
  return Get(key).value_or(std::move(fallback));
}

int64_t KeyValueConfig::GetInt(std::string_view key, int64_t fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    Fail(ErrorCode::kInvalidArgument, fmt::format("config {}: '{}' is not an integer", key, *v));
  }
  return out;
}

double KeyValueConfig::GetDouble(std::string_view key, double fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    Fail(ErrorCode::kInvalidArgument, fmt::format("config {}: '{}' is not a number", key, *v));
  }
  return out;
}

bool KeyValueConfig::GetBool(std::string_view key, bool fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  Fail(ErrorCode::kInvalidArgument, fmt::format("config {}: '{}' is not a boolean", key, *v));
}

void KeyValueConfig::Set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

void KeyValueConfig::ApplyEnvironment(std::string_view prefix) {
  for (auto& [key, value] : values_) {
    if (const char* env = std::getenv(EnvName(prefix, key).c_str())) value = env;
  }
}

uint64_t Fnv1a64(std::string_view bytes, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(uint64_t h) { return fmt::format("{:016x}", h); }

}  // namespace chimera
