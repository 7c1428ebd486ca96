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

#include <memory>
#include <string>

#include "chimera/error.hpp"
#include "chimera/listening/session_manager.hpp"

namespace chimera::listening {

// JSON-over-HTTP front end:
//   POST /sessions                     -> {session_id, total, playback_limit}
//   GET  /sessions/{id}/next           -> stimulus descriptor or {done: true}
//   POST /sessions/{id}/responses      {stimulus_id, choice}
//   GET  /sessions/{id}/results[?partial=1]
//   GET  /results[?partial=1]          all sessions
//   GET  /stimuli/{id}/audio[?session=] audio/wav (HEAD gives the length)
// Errors are {code, message} with a matching status.
class HttpServer {
 public:
  explicit HttpServer(SessionManager& sessions);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds; port 0 picks a free one. Returns the bound port.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Run();
  void Stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int HttpStatusFor(ErrorCode code);

}  // namespace chimera::listening
