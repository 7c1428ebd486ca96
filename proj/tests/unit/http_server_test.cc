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

#include <thread>

#include <gtest/gtest.h>

#include "httplib.h"
#include "json.hpp"
#include "listening_fixture.hpp"

namespace chimera::listening {
namespace {

using nlohmann::json;

class HttpTest : public ::testing::Test {
 protected:
  HttpTest()
      : manifest_(testing::WriteStimulusSet(dir_, 12, 12, 6)),
        sessions_(manifest_, {}, 1),
        server_(sessions_) {
    port_ = server_.Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.Run(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 200 && !server_.running(); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ~HttpTest() override {
    server_.Stop();
    thread_.join();
  }

  json Post(const std::string& path, const json& body, int expect) {
    auto r = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(r);
    if (!r) return {};
    EXPECT_EQ(r->status, expect) << path << " " << r->body;
    return json::parse(r->body);
  }
  json Get(const std::string& path, int expect) {
    auto r = client_->Get(path);
    EXPECT_TRUE(r);
    if (!r) return {};
    EXPECT_EQ(r->status, expect) << path << " " << r->body;
    return json::parse(r->body);
  }
  bool IsOriginal(const std::string& public_id) const {
    for (const auto& s : manifest_.stimuli) {
      if (sessions_.PublicId(s.stimulus_id) == public_id) return !ParseCondition(s.condition).mix;
    }
    ADD_FAILURE() << public_id;
    return false;
  }

  testing::TempDir dir_;
  StimulusManifest manifest_;
  SessionManager sessions_;
  HttpServer server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpTest, FullSessionFlow) {
  const auto created = Post("/sessions", {{"seed", 7}, {"age_band", "18-24"}}, 201);
  const std::string sid = created.at("session_id");
  EXPECT_EQ(created.at("total"), 25);
  EXPECT_EQ(created.at("playback_limit"), 1);

  for (int i = 0;; ++i) {
    const auto next = Get("/sessions/" + sid + "/next", 200);
    if (next.at("done")) {
      EXPECT_EQ(i, 25);
      EXPECT_FALSE(next.contains("stimulus_id"));
      break;
    }
    EXPECT_EQ(next.at("position"), i);
    const std::string id = next.at("stimulus_id");
    auto audio = client_->Get(next.at("audio_url").get<std::string>());
    ASSERT_TRUE(audio);
    EXPECT_EQ(audio->status, 200);
    EXPECT_EQ(audio->get_header_value("Content-Type"), "audio/wav");
    EXPECT_EQ(audio->body.size(), sessions_.AudioSize(id));
    EXPECT_EQ(audio->body.substr(0, 4), "RIFF");
    const auto ack = Post("/sessions/" + sid + "/responses",
                          {{"stimulus_id", id}, {"choice", IsOriginal(id) ? "one-speaker" : "two-speakers"}}, 200);
    EXPECT_EQ(ack.at("answered"), i + 1);
  }

  const auto results = Get("/sessions/" + sid + "/results", 200);
  EXPECT_EQ(results.at("overall").at("total"), 25);
  EXPECT_DOUBLE_EQ(results.at("overall").at("accuracy").get<double>(), 100.0);
  const auto all = Get("/results", 200);
  EXPECT_EQ(all.at("overall").at("correct"), 25);
}

TEST_F(HttpTest, ErrorStatusesAndBodies) {
  auto expect_error = [](const json& body, const std::string& code) {
    EXPECT_EQ(body.at("code"), code);
    EXPECT_TRUE(body.at("message").is_string());
  };
  expect_error(Get("/sessions/nope/next", 404), "UnknownSession");

  const std::string sid = Post("/sessions", json::object(), 201).at("session_id");
  const auto next = Get("/sessions/" + sid + "/next", 200);
  const std::string id = next.at("stimulus_id");
  expect_error(Get("/sessions/" + sid + "/results", 409), "SessionIncomplete");
  EXPECT_EQ(Get("/sessions/" + sid + "/results?partial=1", 200).at("overall").at("total"), 0);

  expect_error(Post("/sessions/" + sid + "/responses", {{"stimulus_id", "sffff"}, {"choice", "one-speaker"}}, 404),
               "UnknownStimulus");
  expect_error(Post("/sessions/" + sid + "/responses", {{"stimulus_id", id}, {"choice", "maybe"}}, 400),
               "InvalidArgument");
  auto bad = client_->Post("/sessions/" + sid + "/responses", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  ASSERT_TRUE(client_->Get(next.at("audio_url").get<std::string>()));
  expect_error(Get(next.at("audio_url").get<std::string>(), 429), "PlaybackLimit");

  Post("/sessions/" + sid + "/responses", {{"stimulus_id", id}, {"choice", "one-speaker"}}, 200);
  expect_error(Post("/sessions/" + sid + "/responses", {{"stimulus_id", id}, {"choice", "one-speaker"}}, 409),
               "DuplicateResponse");
  expect_error(Get("/stimuli/" + id + "/audio?session=" + sid, 409), "OutOfOrder");
}

TEST_F(HttpTest, HeadGivesLength) {
  const auto ids = sessions_.PublicStimulusIds();
  auto r = client_->Head("/stimuli/" + ids.front() + "/audio");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Length"), std::to_string(sessions_.AudioSize(ids.front())));
}

TEST_F(HttpTest, NoConditionLeaks) {
  const std::string sid = Post("/sessions", {{"seed", 3}}, 201).at("session_id");
  std::string bodies;
  for (int i = 0; i < 25; ++i) {
    auto r = client_->Get("/sessions/" + sid + "/next");
    ASSERT_TRUE(r);
    bodies += r->body;
    const auto next = json::parse(r->body);
    auto a = client_->Post("/sessions/" + sid + "/responses",
                           json{{"stimulus_id", next.at("stimulus_id")}, {"choice", "one-speaker"}}.dump(),
                           "application/json");
    ASSERT_TRUE(a);
    bodies += a->body;
  }
  for (const auto& s : manifest_.stimuli) {
    EXPECT_EQ(bodies.find(s.source_utt), std::string::npos);
    EXPECT_EQ(bodies.find(s.condition), std::string::npos) << s.condition;
  }
}

}  // namespace
}  // namespace chimera::listening
