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

#include "chimera/listening/session_manager.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fstream>
#include <random>

#include "chimera/error.hpp"
#include "chimera/random.hpp"
#include "json.hpp"

namespace chimera::listening {
namespace fs = std::filesystem;
namespace {

enum class Group { kOriginal, kU, kVU, kOther };

Group GroupOf(std::string_view label) {
  const Condition c = ParseCondition(label);
  if (!c.mix) return Group::kOriginal;
  if (*c.mix == MixKind::kSwapU) return Group::kU;
  if (*c.mix == MixKind::kSwapVU) return Group::kVU;
  return Group::kOther;
}

std::string NowIso() {
  return fmt::format("{:%FT%TZ}", std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now()));
}

std::string RandomToken() {
  std::random_device rd;
  std::string out;
  for (int i = 0; i < 4; ++i) out += fmt::format("{:08x}", rd());
  return out;
}

}  // namespace

struct SessionManager::Session {
  std::string id;
  uint64_t seed = 0;
  SubjectMeta meta;
  std::vector<std::size_t> order;  // stimulus indices
  std::vector<std::optional<Choice>> responses;
  std::vector<std::size_t> plays;
  std::size_t answered = 0;
  mutable std::mutex mutex;

  bool complete() const { return answered == order.size(); }
};

ServiceConfig ServiceConfig::FromConfig(KeyValueConfig cfg) {
  ServiceConfig out;
  const std::map<std::string, std::string> defaults{
      {"listen.host", out.host},
      {"listen.port", std::to_string(out.port)},
      {"manifest", ""},
      {"log_dir", ""},
      {"seed", std::to_string(out.seed)},
      {"playback_limit", std::to_string(out.protocol.playback_limit)},
      {"protocol.originals", std::to_string(out.protocol.originals)},
      {"protocol.u_swapped", std::to_string(out.protocol.u_swapped)},
      {"protocol.vu_swapped", std::to_string(out.protocol.vu_swapped)},
  };
  for (const auto& [k, v] : defaults) {
    if (!cfg.Has(k)) cfg.Set(k, v);
  }
  cfg.ApplyEnvironment("CHIMERA_");
  auto count = [&](std::string_view key) {
    const auto v = cfg.GetInt(key, 0);
    if (v < 0) Fail(ErrorCode::kInvalidArgument, fmt::format("{} must be non-negative", key));
    return static_cast<std::size_t>(v);
  };
  out.host = cfg.GetString("listen.host", out.host);
  out.port = static_cast<int>(cfg.GetInt("listen.port", out.port));
  out.manifest_path = cfg.GetString("manifest", "");
  out.log_dir = cfg.GetString("log_dir", "");
  out.seed = static_cast<uint64_t>(cfg.GetInt("seed", 1));
  out.protocol.playback_limit = count("playback_limit");
  out.protocol.originals = count("protocol.originals");
  out.protocol.u_swapped = count("protocol.u_swapped");
  out.protocol.vu_swapped = count("protocol.vu_swapped");
  return out;
}

SessionManager::SessionManager(StimulusManifest manifest, ProtocolConfig protocol, uint64_t seed,
                               std::string log_dir)
    : manifest_(std::move(manifest)), protocol_(protocol), seed_(seed), log_dir_(std::move(log_dir)) {
  for (std::size_t i = 0; i < manifest_.stimuli.size(); ++i) {
    GroupOf(manifest_.stimuli[i].condition);
    const std::string id = "s" + HexDigest(Fnv1a64(manifest_.stimuli[i].stimulus_id, MixSeed(seed_, 0x5717)));
    if (!by_public_id_.emplace(id, i).second) Fail(ErrorCode::kInvalidArgument, "stimulus id collision");
    public_ids_.push_back(id);
  }
  if (!log_dir_.empty()) {
    fs::create_directories(log_dir_);
    Replay();
  }
}

SessionManager::~SessionManager() = default;

std::vector<std::size_t> SessionManager::DrawOrder(uint64_t seed) const {
  std::map<Group, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < manifest_.stimuli.size(); ++i) {
    pools[GroupOf(manifest_.stimuli[i].condition)].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> order;
  const std::vector<std::tuple<Group, std::size_t, std::string_view>> wanted{
      {Group::kOriginal, protocol_.originals, "original"},
      {Group::kU, protocol_.u_swapped, "U-swap"},
      {Group::kVU, protocol_.vu_swapped, "vU-swap"}};
  for (const auto& [group, count, name] : wanted) {
    auto& pool = pools[group];
    if (pool.size() < count) {
      Fail(ErrorCode::kInsufficientStimuli,
           fmt::format("{}: need {}, manifest has {}", name, count, pool.size()));
    }
    rng.Shuffle(pool);
    order.insert(order.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  }
  rng.Shuffle(order);
  return order;
}

void SessionManager::Append(const Session& s, const std::string& line) const {
  if (log_dir_.empty()) return;
  std::ofstream out(fs::path(log_dir_) / (s.id + ".jsonl"), std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "cannot append to session log " + s.id);
}

void SessionManager::Replay() {
  std::vector<fs::path> logs;
  for (const auto& item : fs::directory_iterator(log_dir_)) {
    if (item.path().extension() == ".jsonl") logs.push_back(item.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::ifstream in(path);
    std::string line;
    std::unique_ptr<Session> s;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        break;  // torn final write
      }
      const std::string event = j.value("event", "");
      if (event == "create") {
        s = std::make_unique<Session>();
        s->id = j.at("session_id").get<std::string>();
        s->seed = j.at("seed").get<uint64_t>();
        s->meta.age_band = j.value("age_band", "");
        s->meta.gender = j.value("gender", "");
        for (const auto& id : j.at("order")) s->order.push_back(RequireStimulus(id.get<std::string>()));
        s->responses.assign(s->order.size(), std::nullopt);
        s->plays.assign(s->order.size(), 0);
      } else if (s && event == "response") {
        const std::size_t pos = j.at("position").get<std::size_t>();
        if (pos < s->order.size() && !s->responses[pos]) {
          s->responses[pos] = ParseChoice(j.at("choice").get<std::string>());
          ++s->answered;
        }
      } else if (s && event == "play") {
        const std::size_t pos = j.at("position").get<std::size_t>();
        if (pos < s->plays.size()) ++s->plays[pos];
      }
    }
    if (s) {
      std::string id = s->id;
      sessions_.emplace(std::move(id), std::move(s));
    }
  }
}

SessionDescriptor SessionManager::CreateSession(std::optional<uint64_t> seed, const SubjectMeta& meta) {
  auto s = std::make_unique<Session>();
  s->seed = seed.value_or(std::random_device{}() | (static_cast<uint64_t>(std::random_device{}()) << 32));
  s->meta = meta;
  s->order = DrawOrder(s->seed);
  s->responses.assign(s->order.size(), std::nullopt);
  s->plays.assign(s->order.size(), 0);
  std::unique_lock lock(sessions_mutex_);
  do {
    s->id = RandomToken();
  } while (sessions_.contains(s->id));
  nlohmann::ordered_json j;
  j["event"] = "create";
  j["timestamp"] = NowIso();
  j["session_id"] = s->id;
  j["seed"] = s->seed;
  j["age_band"] = meta.age_band;
  j["gender"] = meta.gender;
  std::vector<std::string> order;
  for (std::size_t i : s->order) order.push_back(public_ids_[i]);
  j["order"] = order;
  Append(*s, j.dump());
  SessionDescriptor d{s->id, s->order.size(), s->seed};
  std::string id = s->id;
  sessions_.emplace(std::move(id), std::move(s));
  return d;
}

SessionManager::Session& SessionManager::RequireSession(std::string_view id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) Fail(ErrorCode::kUnknownSession, std::string(id));
  return *it->second;
}

std::size_t SessionManager::RequireStimulus(std::string_view public_id) const {
  const auto it = by_public_id_.find(public_id);
  if (it == by_public_id_.end()) Fail(ErrorCode::kUnknownStimulus, std::string(public_id));
  return it->second;
}

NextStimulus SessionManager::Next(std::string_view session_id) const {
  Session& s = RequireSession(session_id);
  std::lock_guard lock(s.mutex);
  NextStimulus out;
  out.total = s.order.size();
  out.answered = s.answered;
  if (s.complete()) {
    out.done = true;
    return out;
  }
  const std::size_t pos = s.answered;
  out.position = pos;
  out.stimulus_id = public_ids_[s.order[pos]];
  out.audio_url = fmt::format("/stimuli/{}/audio?session={}", out.stimulus_id, s.id);
  out.plays_remaining = protocol_.playback_limit > s.plays[pos] ? protocol_.playback_limit - s.plays[pos] : 0;
  return out;
}

SubmitAck SessionManager::Submit(std::string_view session_id, std::string_view stimulus_id, Choice choice) {
  Session& s = RequireSession(session_id);
  const std::size_t idx = RequireStimulus(stimulus_id);
  std::lock_guard lock(s.mutex);
  const auto it = std::find(s.order.begin(), s.order.end(), idx);
  if (it == s.order.end()) {
    Fail(ErrorCode::kUnknownStimulus, fmt::format("{} is not part of session {}", stimulus_id, session_id));
  }
  const auto pos = static_cast<std::size_t>(it - s.order.begin());
  if (s.responses[pos]) Fail(ErrorCode::kDuplicateResponse, std::string(stimulus_id));
  if (pos != s.answered) Fail(ErrorCode::kOutOfOrder, std::string(stimulus_id));
  nlohmann::ordered_json j;
  j["event"] = "response";
  j["timestamp"] = NowIso();
  j["position"] = pos;
  j["stimulus_id"] = stimulus_id;
  j["choice"] = ChoiceName(choice);
  Append(s, j.dump());
  s.responses[pos] = choice;
  ++s.answered;
  return {s.answered, s.order.size()};
}

AccuracyTable SessionManager::Results(std::string_view session_id, bool allow_partial) const {
  std::vector<SubjectiveRecord> records;
  auto collect = [&](const Session& s) {
    std::lock_guard lock(s.mutex);
    if (!s.complete() && !allow_partial) return false;
    for (std::size_t pos = 0; pos < s.order.size(); ++pos) {
      if (s.responses[pos]) records.push_back({manifest_.stimuli[s.order[pos]].condition, *s.responses[pos]});
    }
    return true;
  };
  if (!session_id.empty()) {
    if (!collect(RequireSession(session_id))) Fail(ErrorCode::kSessionIncomplete, std::string(session_id));
  } else {
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [id, s] : sessions_) collect(*s);
  }
  return ScoreSubjective(records);
}

std::vector<uint8_t> SessionManager::Audio(std::string_view stimulus_id, std::string_view session_id) {
  const std::size_t idx = RequireStimulus(stimulus_id);
  if (!session_id.empty()) {
    Session& s = RequireSession(session_id);
    std::lock_guard lock(s.mutex);
    if (s.complete() || s.order[s.answered] != idx) {
      Fail(ErrorCode::kOutOfOrder, fmt::format("{} is not the current stimulus", stimulus_id));
    }
    const std::size_t pos = s.answered;
    if (s.plays[pos] >= protocol_.playback_limit) Fail(ErrorCode::kPlaybackLimit, std::string(stimulus_id));
    nlohmann::ordered_json j;
    j["event"] = "play";
    j["timestamp"] = NowIso();
    j["position"] = pos;
    Append(s, j.dump());
    ++s.plays[pos];
  }
  return ReadBinaryFile(manifest_.ResolvePath(manifest_.stimuli[idx].wav_path));
}

std::size_t SessionManager::AudioSize(std::string_view stimulus_id) const {
  const std::size_t idx = RequireStimulus(stimulus_id);
  std::error_code ec;
  const auto size = fs::file_size(manifest_.ResolvePath(manifest_.stimuli[idx].wav_path), ec);
  if (ec) Fail(ErrorCode::kIo, "cannot stat audio for " + std::string(stimulus_id));
  return static_cast<std::size_t>(size);
}

std::vector<std::string> SessionManager::PublicStimulusIds() const { return public_ids_; }

std::string SessionManager::PublicId(std::string_view internal_id) const {
  for (std::size_t i = 0; i < manifest_.stimuli.size(); ++i) {
    if (manifest_.stimuli[i].stimulus_id == internal_id) return public_ids_[i];
  }
  Fail(ErrorCode::kUnknownStimulus, std::string(internal_id));
}

std::size_t SessionManager::num_sessions() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

}  // namespace chimera::listening
