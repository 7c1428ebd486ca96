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

#include "chimera/listening/http_server.hpp"

#include <charconv>

#include "chimera/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace chimera::listening {
namespace {

using nlohmann::ordered_json;

void SendJson(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, ErrorCode code, std::string_view message) {
  ordered_json body;
  body["code"] = ErrorCodeName(code);
  body["message"] = message;
  SendJson(res, HttpStatusFor(code), body);
}

ordered_json TableJson(const AccuracyTable& t) {
  ordered_json rows = ordered_json::array();
  auto row = [](const AccuracyRow& r) {
    ordered_json j;
    j["condition"] = r.condition;
    j["correct"] = r.correct;
    j["total"] = r.total;
    j["accuracy"] = r.accuracy();
    return j;
  };
  for (const auto& r : t.rows) rows.push_back(row(r));
  ordered_json j;
  j["rows"] = rows;
  j["overall"] = row(t.overall);
  return j;
}

bool Partial(const httplib::Request& req) {
  const auto v = req.get_param_value("partial");
  return v == "1" || v == "true";
}

template <typename Fn>
httplib::Server::Handler Guard(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      SendError(res, e.code(), e.detail());
    } catch (const nlohmann::json::exception& e) {
      SendError(res, ErrorCode::kInvalidArgument, std::string("bad JSON body: ") + e.what());
    } catch (const std::exception& e) {
      SendError(res, ErrorCode::kIo, e.what());
    }
  };
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownStimulus:
      return 404;
    case ErrorCode::kDuplicateResponse:
    case ErrorCode::kOutOfOrder:
    case ErrorCode::kSessionIncomplete:
    case ErrorCode::kInsufficientStimuli:
      return 409;
    case ErrorCode::kPlaybackLimit:
      return 429;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedLine:
      return 400;
    default:
      return 500;
  }
}

struct HttpServer::Impl {
  SessionManager& sessions;
  httplib::Server server;

  explicit Impl(SessionManager& s) : sessions(s) {}
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  auto& srv = impl_->server;
  SessionManager& sm = sessions;

  srv.Post("/sessions", Guard([&sm](const httplib::Request& req, httplib::Response& res) {
    std::optional<uint64_t> seed;
    SubjectMeta meta;
    if (!req.body.empty()) {
      const auto body = nlohmann::json::parse(req.body);
      if (body.contains("seed")) seed = body.at("seed").get<uint64_t>();
      meta.age_band = body.value("age_band", "");
      meta.gender = body.value("gender", "");
    }
    const auto d = sm.CreateSession(seed, meta);
    ordered_json j;
    j["session_id"] = d.session_id;
    j["total"] = d.total;
    j["playback_limit"] = sm.protocol().playback_limit;
    SendJson(res, 201, j);
  }));

  srv.Get(R"(/sessions/([^/]+)/next)", Guard([&sm](const httplib::Request& req, httplib::Response& res) {
    const auto n = sm.Next(req.matches[1].str());
    ordered_json j;
    j["done"] = n.done;
    j["answered"] = n.answered;
    j["total"] = n.total;
    if (!n.done) {
      j["stimulus_id"] = n.stimulus_id;
      j["audio_url"] = n.audio_url;
      j["position"] = n.position;
      j["plays_remaining"] = n.plays_remaining;
    }
    SendJson(res, 200, j);
  }));

  srv.Post(R"(/sessions/([^/]+)/responses)", Guard([&sm](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const auto ack = sm.Submit(req.matches[1].str(), body.at("stimulus_id").get<std::string>(),
                               ParseChoice(body.at("choice").get<std::string>()));
    ordered_json j;
    j["accepted"] = true;
    j["answered"] = ack.answered;
    j["total"] = ack.total;
    SendJson(res, 200, j);
  }));

  srv.Get(R"(/sessions/([^/]+)/results)", Guard([&sm](const httplib::Request& req, httplib::Response& res) {
    SendJson(res, 200, TableJson(sm.Results(req.matches[1].str(), Partial(req))));
  }));

  srv.Get("/results", Guard([&sm](const httplib::Request& req, httplib::Response& res) {
    SendJson(res, 200, TableJson(sm.Results("", Partial(req))));
  }));

  srv.Get(R"(/stimuli/([^/]+)/audio)", Guard([&sm](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1].str();
    if (req.method == "HEAD") {
      res.status = 200;
      res.set_header("Content-Length", std::to_string(sm.AudioSize(id)));
      res.set_header("Content-Type", "audio/wav");
      return;
    }
    const auto bytes = sm.Audio(id, req.get_param_value("session"));
    res.status = 200;
    res.set_content(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()), "audio/wav");
  }));
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) Fail(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    Fail(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::Run() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace chimera::listening
