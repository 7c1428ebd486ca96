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
#include <cstdlib>
#include <set>

#include <gtest/gtest.h>

#include "chimera/error.hpp"
#include "listening_fixture.hpp"

namespace chimera::listening {
namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

class SessionTest : public ::testing::Test {
 protected:
  SessionTest() : manifest_(testing::WriteStimulusSet(dir_, 12, 12, 6)) {}

  std::string ConditionOf(const SessionManager& sm, const std::string& public_id) const {
    for (const auto& s : manifest_.stimuli) {
      if (sm.PublicId(s.stimulus_id) == public_id) return s.condition;
    }
    return "";
  }

  // Answers every stimulus, correctly when `correct` is set.
  void Complete(SessionManager& sm, const std::string& sid, bool correct) {
    for (auto n = sm.Next(sid); !n.done; n = sm.Next(sid)) {
      const bool original = !ParseCondition(ConditionOf(sm, n.stimulus_id)).mix.has_value();
      const bool one = original == correct;
      sm.Submit(sid, n.stimulus_id, one ? Choice::kOneSpeaker : Choice::kTwoSpeakers);
    }
  }

  testing::TempDir dir_;
  StimulusManifest manifest_;
};

TEST_F(SessionTest, DefaultProtocolDrawsTenTenFive) {
  SessionManager sm(manifest_, {}, 1);
  const auto d = sm.CreateSession(42);
  EXPECT_EQ(d.total, 25u);
  std::map<std::string, int> groups;
  std::set<std::string> seen;
  for (auto n = sm.Next(d.session_id); !n.done; n = sm.Next(d.session_id)) {
    EXPECT_TRUE(seen.insert(n.stimulus_id).second);
    const auto c = ParseCondition(ConditionOf(sm, n.stimulus_id));
    groups[!c.mix ? "orig" : (*c.mix == MixKind::kSwapU ? "u" : "vu")]++;
    sm.Submit(d.session_id, n.stimulus_id, Choice::kOneSpeaker);
  }
  EXPECT_EQ(groups["orig"], 10);
  EXPECT_EQ(groups["u"], 10);
  EXPECT_EQ(groups["vu"], 5);
}

TEST_F(SessionTest, OrderIsAFunctionOfSeed) {
  SessionManager sm(manifest_, {}, 1);
  auto order = [&](uint64_t seed) {
    const auto d = sm.CreateSession(seed);
    std::vector<std::string> out;
    for (auto n = sm.Next(d.session_id); !n.done; n = sm.Next(d.session_id)) {
      out.push_back(n.stimulus_id);
      sm.Submit(d.session_id, n.stimulus_id, Choice::kOneSpeaker);
    }
    return out;
  };
  EXPECT_EQ(order(5), order(5));
  EXPECT_NE(order(5), order(6));
  SessionManager other(manifest_, {}, 1);
  const auto a = sm.CreateSession(9);
  const auto b = other.CreateSession(9);
  EXPECT_NE(a.session_id, b.session_id);
  EXPECT_EQ(sm.Next(a.session_id).stimulus_id, other.Next(b.session_id).stimulus_id);
}

TEST_F(SessionTest, InsufficientStimuli) {
  testing::TempDir small;
  SessionManager sm(testing::WriteStimulusSet(small, 3, 12, 6), {}, 1);
  EXPECT_EQ(CodeOf([&] { sm.CreateSession(1); }), ErrorCode::kInsufficientStimuli);
}

TEST_F(SessionTest, SubmitContract) {
  SessionManager sm(manifest_, {}, 1);
  const auto d = sm.CreateSession(3);
  const auto first = sm.Next(d.session_id);
  EXPECT_EQ(first.position, 0u);
  EXPECT_EQ(first.plays_remaining, 1u);
  EXPECT_EQ(CodeOf([&] { sm.Next("nope"); }), ErrorCode::kUnknownSession);
  EXPECT_EQ(CodeOf([&] { sm.Submit(d.session_id, "sdeadbeef", Choice::kOneSpeaker); }),
            ErrorCode::kUnknownStimulus);

  const auto ack = sm.Submit(d.session_id, first.stimulus_id, Choice::kTwoSpeakers);
  EXPECT_EQ(ack.answered, 1u);
  EXPECT_EQ(CodeOf([&] { sm.Submit(d.session_id, first.stimulus_id, Choice::kOneSpeaker); }),
            ErrorCode::kDuplicateResponse);

  // Same seed, same order: the fourth stimulus is not yet current in d2.
  const auto second = sm.Next(d.session_id);
  sm.Submit(d.session_id, second.stimulus_id, Choice::kOneSpeaker);
  const auto third = sm.Next(d.session_id);
  sm.Submit(d.session_id, third.stimulus_id, Choice::kOneSpeaker);
  const auto fourth = sm.Next(d.session_id);
  sm.Submit(d.session_id, fourth.stimulus_id, Choice::kOneSpeaker);
  const auto d2 = sm.CreateSession(3);
  EXPECT_EQ(CodeOf([&] { sm.Submit(d2.session_id, fourth.stimulus_id, Choice::kOneSpeaker); }),
            ErrorCode::kOutOfOrder);

  // Stimuli outside the session's draw are unknown to it.
  std::set<std::string> drawn;
  const auto d3 = sm.CreateSession(11);
  SessionManager mirror(manifest_, {}, 1);
  const auto m3 = mirror.CreateSession(11);
  for (auto n = mirror.Next(m3.session_id); !n.done; n = mirror.Next(m3.session_id)) {
    drawn.insert(n.stimulus_id);
    mirror.Submit(m3.session_id, n.stimulus_id, Choice::kOneSpeaker);
  }
  for (const auto& id : sm.PublicStimulusIds()) {
    if (drawn.contains(id)) continue;
    EXPECT_EQ(CodeOf([&] { sm.Submit(d3.session_id, id, Choice::kOneSpeaker); }), ErrorCode::kUnknownStimulus);
    break;
  }
}

TEST_F(SessionTest, PublicIdsHideConditions) {
  SessionManager sm(manifest_, {}, 1);
  const auto d = sm.CreateSession(3);
  const auto n = sm.Next(d.session_id);
  for (const std::string& field : {n.stimulus_id, n.audio_url}) {
    for (const auto& label : CanonicalConditionOrder()) EXPECT_EQ(field.find(label), std::string::npos);
    EXPECT_EQ(field.find("utt"), std::string::npos);
  }
  EXPECT_EQ(n.audio_url, "/stimuli/" + n.stimulus_id + "/audio?session=" + d.session_id);
}

TEST_F(SessionTest, ResultsAndAggregation) {
  SessionManager sm(manifest_, {}, 1);
  EXPECT_TRUE(sm.Results("").rows.empty());
  const auto good = sm.CreateSession(1);
  const auto bad = sm.CreateSession(2);
  const auto partial = sm.CreateSession(3);
  Complete(sm, good.session_id, true);
  Complete(sm, bad.session_id, false);
  const auto n = sm.Next(partial.session_id);
  sm.Submit(partial.session_id, n.stimulus_id, Choice::kOneSpeaker);

  const auto g = sm.Results(good.session_id);
  for (const auto& row : g.rows) EXPECT_EQ(row.accuracy(), 100.0) << row.condition;
  EXPECT_EQ(g.overall.total, 25u);
  EXPECT_EQ(sm.Results(bad.session_id).overall.correct, 0u);
  EXPECT_EQ(CodeOf([&] { sm.Results(partial.session_id); }), ErrorCode::kSessionIncomplete);
  EXPECT_EQ(sm.Results(partial.session_id, true).overall.total, 1u);
  const auto all = sm.Results("");
  EXPECT_EQ(all.overall.total, 50u);
  EXPECT_EQ(all.overall.correct, 25u);
  EXPECT_EQ(sm.Results("", true).overall.total, 51u);
  EXPECT_EQ(CodeOf([&] { sm.Results("nope"); }), ErrorCode::kUnknownSession);
}

TEST_F(SessionTest, AudioAndPlaybackLimit) {
  SessionManager sm(manifest_, {}, 1);
  const auto d = sm.CreateSession(8);
  const auto n = sm.Next(d.session_id);
  const auto bytes = sm.Audio(n.stimulus_id, d.session_id);
  EXPECT_EQ(bytes.size(), sm.AudioSize(n.stimulus_id));
  EXPECT_EQ(sm.Next(d.session_id).plays_remaining, 0u);
  EXPECT_EQ(CodeOf([&] { sm.Audio(n.stimulus_id, d.session_id); }), ErrorCode::kPlaybackLimit);
  EXPECT_EQ(sm.Audio(n.stimulus_id), bytes);  // unscoped reads are not counted
  EXPECT_EQ(CodeOf([&] { sm.Audio("sbad"); }), ErrorCode::kUnknownStimulus);
  for (const auto& s : manifest_.stimuli) {
    if (sm.PublicId(s.stimulus_id) == n.stimulus_id) {
      EXPECT_EQ(bytes, ReadBinaryFile(manifest_.ResolvePath(s.wav_path)));
    }
  }
}

TEST_F(SessionTest, EventLogReplay) {
  testing::TempDir logs;
  std::string sid;
  std::vector<std::string> answered;
  {
    SessionManager sm(manifest_, {}, 1, logs.str());
    sid = sm.CreateSession(4, {"25-34", "F"}).session_id;
    for (int i = 0; i < 3; ++i) {
      const auto n = sm.Next(sid);
      sm.Audio(n.stimulus_id, sid);
      sm.Submit(sid, n.stimulus_id, Choice::kTwoSpeakers);
      answered.push_back(n.stimulus_id);
    }
    sm.Audio(sm.Next(sid).stimulus_id, sid);
  }
  SessionManager restored(manifest_, {}, 1, logs.str());
  EXPECT_EQ(restored.num_sessions(), 1u);
  const auto n = restored.Next(sid);
  EXPECT_EQ(n.answered, 3u);
  EXPECT_EQ(n.plays_remaining, 0u);
  EXPECT_EQ(CodeOf([&] { restored.Submit(sid, answered[0], Choice::kOneSpeaker); }),
            ErrorCode::kDuplicateResponse);
  EXPECT_EQ(restored.Results(sid, true).overall.total, 3u);
}

TEST(ServiceConfig, FileAndEnvironment) {
  auto cfg = KeyValueConfig::Parse("manifest = /x/stimuli.csv\n[listen]\nport = 9000\n[protocol]\noriginals = 4\n");
  ::setenv("CHIMERA_LISTEN_PORT", "9100", 1);
  ::setenv("CHIMERA_PLAYBACK_LIMIT", "3", 1);
  const auto s = ServiceConfig::FromConfig(cfg);
  ::unsetenv("CHIMERA_LISTEN_PORT");
  ::unsetenv("CHIMERA_PLAYBACK_LIMIT");
  EXPECT_EQ(s.port, 9100);
  EXPECT_EQ(s.host, "127.0.0.1");
  EXPECT_EQ(s.manifest_path, "/x/stimuli.csv");
  EXPECT_EQ(s.protocol.originals, 4u);
  EXPECT_EQ(s.protocol.u_swapped, 10u);
  EXPECT_EQ(s.protocol.playback_limit, 3u);
  EXPECT_THROW(ServiceConfig::FromConfig(KeyValueConfig::Parse("protocol.originals = -1\n")), Error);
}

}  // namespace
}  // namespace chimera::listening
