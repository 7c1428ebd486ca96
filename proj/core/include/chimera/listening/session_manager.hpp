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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "chimera/config.hpp"
#include "chimera/harness.hpp"

namespace chimera::listening {

// Stimuli per session, by condition group.
struct ProtocolConfig {
  std::size_t originals = 10;   // M or F
  std::size_t u_swapped = 10;   // M<FU or F<MU
  std::size_t vu_swapped = 5;   // M<FvU or F<MvU
  std::size_t playback_limit = 1;

  std::size_t session_length() const { return originals + u_swapped + vu_swapped; }
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string manifest_path;
  std::string log_dir;  // empty disables persistence
  uint64_t seed = 1;
  ProtocolConfig protocol;

  // Keys: listen.host, listen.port, manifest, log_dir, seed, playback_limit,
  // protocol.originals, protocol.u_swapped, protocol.vu_swapped. Environment
  // variables CHIMERA_<KEY> ('.' -> '_') win over the file.
  static ServiceConfig FromConfig(KeyValueConfig cfg);
};

struct SubjectMeta {
  std::string age_band;
  std::string gender;
};

struct SessionDescriptor {
  std::string session_id;
  std::size_t total = 0;
  uint64_t seed = 0;
};

// What a client sees; carries no condition or speaker information.
struct NextStimulus {
  bool done = false;
  std::string stimulus_id;
  std::string audio_url;
  std::size_t position = 0;  // 0-based index in the session order
  std::size_t answered = 0;
  std::size_t total = 0;
  std::size_t plays_remaining = 0;
};

struct SubmitAck {
  std::size_t answered = 0;
  std::size_t total = 0;
};

class SessionManager {
 public:
  // Replays any event logs found in `log_dir` before accepting new work.
  SessionManager(StimulusManifest manifest, ProtocolConfig protocol, uint64_t seed,
                 std::string log_dir = "");
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  // Order is a pure function of (seed, manifest). Without a seed one is drawn.
  SessionDescriptor CreateSession(std::optional<uint64_t> seed = std::nullopt, const SubjectMeta& meta = {});
  NextStimulus Next(std::string_view session_id) const;
  SubmitAck Submit(std::string_view session_id, std::string_view stimulus_id, Choice choice);
  // One session, or all sessions when `session_id` is empty. Incomplete
  // sessions raise SessionIncomplete (single) or are skipped (all) unless
  // `allow_partial`.
  AccuracyTable Results(std::string_view session_id, bool allow_partial = false) const;

  // Audio bytes of a public stimulus id. With a session, the stimulus must be
  // the session's current one and counts against the playback limit.
  std::vector<uint8_t> Audio(std::string_view stimulus_id, std::string_view session_id = "");
  std::size_t AudioSize(std::string_view stimulus_id) const;

  std::vector<std::string> PublicStimulusIds() const;
  std::string PublicId(std::string_view internal_id) const;
  std::size_t num_sessions() const;
  const ProtocolConfig& protocol() const { return protocol_; }

 private:
  struct Session;

  Session& RequireSession(std::string_view id) const;
  std::size_t RequireStimulus(std::string_view public_id) const;
  std::vector<std::size_t> DrawOrder(uint64_t seed) const;
  void Append(const Session& s, const std::string& line) const;
  void Replay();

  StimulusManifest manifest_;
  ProtocolConfig protocol_;
  uint64_t seed_;
  std::string log_dir_;
  std::vector<std::string> public_ids_;
  std::map<std::string, std::size_t, std::less<>> by_public_id_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<Session>, std::less<>> sessions_;
};

}  // namespace chimera::listening
