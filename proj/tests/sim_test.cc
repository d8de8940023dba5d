// Copyright 2026 The TGLG Toolkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tglg/sim.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"
#include "tglg/errors.h"
#include "tglg/harness.h"
#include "tglg/score.h"

namespace tglg {
namespace {

SimConfig config(double tps, double duration) {
  SimConfig c;
  c.token_rate_tps = tps;
  c.duration_s = duration;
  return c;
}

std::vector<SimEvent> of_kind(const SimTimeline& tl, SimEventKind kind) {
  std::vector<SimEvent> out;
  for (const auto& e : tl.events) {
    if (e.kind == kind) out.push_back(e);
  }
  return out;
}

// Answers each newly seen frame with BEGIN, one token naming it, END.
class EchoPolicy : public Policy {
 public:
  void reset() override { seen_ = 0, pending_.clear(), said_ = false; }
  PolicyDecision decide(const DecodeContext& ctx) override {
    for (; seen_ < ctx.frames.size(); ++seen_) pending_.push_back(ctx.frames[seen_].label);
    if (ctx.generating) {
      if (!said_) {
        said_ = true;
        return PolicyDecision::token(pending_.front());
      }
      pending_.erase(pending_.begin());
      said_ = false;
      return PolicyDecision::end();
    }
    if (pending_.empty()) return PolicyDecision::silent();
    return PolicyDecision::begin();
  }

 private:
  std::size_t seen_ = 0;
  std::vector<std::string> pending_;
  bool said_ = false;
};

// Returns a fixed decision sequence, then SILENT.
class ListPolicy : public Policy {
 public:
  explicit ListPolicy(std::vector<PolicyDecision> ds) : ds_(std::move(ds)) {}
  void reset() override { at_ = 0; }
  PolicyDecision decide(const DecodeContext&) override {
    return at_ < ds_.size() ? ds_[at_++] : PolicyDecision::silent();
  }

 private:
  std::vector<PolicyDecision> ds_;
  std::size_t at_ = 0;
};

struct RandomScenario {
  std::vector<FrameEvent> frames;
  std::vector<ScriptRule> rules;
};

RandomScenario random_scenario(std::mt19937& rng) {
  static const char* labels[] = {"red", "green", "blue", "none"};
  std::uniform_int_distribution<int> nf(0, 10), gap(1, 12), lab(0, 3), nfrag(1, 6), coin(0, 2);
  RandomScenario s;
  double t = 0.0;
  for (int k = nf(rng); k > 0; --k) {
    t += gap(rng) * 0.25;
    s.frames.push_back({t, labels[lab(rng)]});
  }
  for (int l = 0; l < 3; ++l) {
    if (coin(rng) == 0) continue;
    ScriptRule r;
    r.trigger = labels[l];
    for (int k = nfrag(rng); k > 0; --k) r.fragments.push_back(std::string(labels[l]) + std::to_string(k));
    if (coin(rng) == 0) {
      r.revise_on = Revision{labels[(l + 1) % 3], {"revised", "tail"}, coin(rng) == 0};
    }
    s.rules.push_back(r);
  }
  return s;
}

TEST(SimConfig, Validation) {
  EXPECT_NO_THROW(SimConfig{}.validate());
  EXPECT_THROW(config(0.0, 1.0).validate(), ParameterError);
  EXPECT_THROW(config(2.0, -1.0).validate(), ParameterError);
  SimConfig c;
  c.eos_threshold = 1.5;
  EXPECT_THROW(c.validate(), ParameterError);
  c = SimConfig{};
  c.frame_rate_fps = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(RunTsi, YellowFrameProducesOneUtterance) {
  ScriptedPolicy p({{"yellow", {"yellow", "frame"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{1.0, "yellow"}};
  const auto tl = run_tsi(p, frames, config(2.0, 5.0));
  ASSERT_EQ(tl.stream.utterances.size(), 1u);
  const auto& u = tl.stream.utterances[0];
  EXPECT_EQ(u.start_s, 1.0);
  EXPECT_EQ(u.end_s, 1.5);
  EXPECT_EQ(u.text, "yellow frame");
  EXPECT_EQ(u.token_count, 2);
  EXPECT_FALSE(tl.stream.end_time_estimated);
  EXPECT_EQ(of_kind(tl, SimEventKind::kUtteranceEnd).size(), 1u);
}

TEST(RunTsi, FirstSlotAtOrAfterFrame) {
  ScriptedPolicy p({{"yellow", {"y"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{1.1, "yellow"}};
  EXPECT_EQ(run_tsi(p, frames, config(2.0, 5.0)).stream.utterances.at(0).start_s, 1.5);
}

TEST(RunTsi, AlwaysSilentLogsOnlyFrames) {
  ScriptedPolicy p({{"never", {"x"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{0.5, "a"}, {1.0, "b"}};
  const auto tl = run_tsi(p, frames, config(2.0, 3.0));
  EXPECT_TRUE(tl.stream.utterances.empty());
  ASSERT_EQ(tl.events.size(), 2u);
  for (const auto& e : tl.events) EXPECT_EQ(e.kind, SimEventKind::kFrameIngested);
}

TEST(RunTsi, MidUtteranceRevisionSwitchesTail) {
  ScriptedPolicy p({{"yellow", {"y1", "y2", "y3", "y4"}, Revision{"blue", {"and", "blue"}, false}, 0.0}});
  const std::vector<FrameEvent> frames = {{1.0, "yellow"}, {1.5, "blue"}};
  const auto tl = run_tsi(p, frames, config(2.0, 5.0));
  ASSERT_EQ(tl.stream.utterances.size(), 1u);
  EXPECT_EQ(tl.stream.utterances[0].text, "y1 and blue");
  // The blue frame is ingested between utterance-start and utterance-end.
  bool inside = false, saw_blue_inside = false;
  for (const auto& e : tl.events) {
    if (e.kind == SimEventKind::kUtteranceStart) inside = true;
    if (e.kind == SimEventKind::kUtteranceEnd) inside = false;
    if (inside && e.kind == SimEventKind::kFrameIngested && e.detail == "blue") saw_blue_inside = true;
  }
  EXPECT_TRUE(saw_blue_inside);
}

TEST(RunTsi, RestartClosesAndOpensUtterance) {
  ScriptedPolicy p({{"yellow", {"y1", "y2", "y3"}, Revision{"blue", {"b1"}, true}, 0.0}});
  const std::vector<FrameEvent> frames = {{1.0, "yellow"}, {1.5, "blue"}};
  const auto tl = run_tsi(p, frames, config(2.0, 5.0));
  ASSERT_EQ(tl.stream.utterances.size(), 2u);
  EXPECT_EQ(tl.stream.utterances[0].text, "y1");
  EXPECT_EQ(tl.stream.utterances[1].text, "b1");
  EXPECT_EQ(tl.stream.utterances[1].start_s, 1.5);
}

TEST(RunTsi, TokenOutsideGenerationNamesTheSlot) {
  ListPolicy p({PolicyDecision::silent(), PolicyDecision::token("oops")});
  try {
    run_tsi(p, {}, config(2.0, 5.0));
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("slot 1"), std::string::npos) << e.what();
  }
}

TEST(RunTsi, MarkerLoopIsAProtocolError) {
  std::vector<PolicyDecision> ds;
  for (int k = 0; k < 10; ++k) ds.push_back(k % 2 ? PolicyDecision::end() : PolicyDecision::begin());
  ListPolicy p(ds);
  EXPECT_THROW(run_tsi(p, {}, config(2.0, 5.0)), ProtocolError);
}

TEST(RunTsi, EndOutsideGenerationIsDiscarded) {
  ListPolicy p({PolicyDecision::end(), PolicyDecision::begin(), PolicyDecision::token("t"),
                PolicyDecision::end()});
  const auto tl = run_tsi(p, {}, config(2.0, 5.0));
  ASSERT_EQ(tl.stream.utterances.size(), 1u);
  EXPECT_EQ(tl.stream.utterances[0].start_s, 0.5);
}

TEST(RunTsi, TruncatedAtDuration) {
  ScriptedPolicy p({{"go", {"a", "b", "c", "d", "e", "f"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{0.0, "go"}};
  const auto tl = run_tsi(p, frames, config(2.0, 1.5));
  ASSERT_EQ(tl.stream.utterances.size(), 1u);
  EXPECT_EQ(tl.stream.utterances[0].text, "a b c");
  EXPECT_EQ(of_kind(tl, SimEventKind::kUtteranceEnd).size(), 1u);
}

TEST(RunTsi, ZeroDurationIsEmpty) {
  ScriptedPolicy p({{"go", {"a"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{0.0, "go"}};
  const auto tl = run_tsi(p, frames, config(2.0, 0.0));
  EXPECT_TRUE(tl.events.empty());
  EXPECT_TRUE(tl.stream.utterances.empty());
}

TEST(RunTsi, RejectsUnsortedFrames) {
  ScriptedPolicy p({{"go", {"a"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{1.0, "a"}, {1.0, "b"}};
  EXPECT_THROW(run_tsi(p, frames, config(2.0, 3.0)), ParameterError);
}

TEST(RunTurnBased, BlueIsQueuedBehindYellow) {
  ScriptedPolicy p({{"yellow", {"1", "2", "3", "4", "5", "6"}, std::nullopt, 0.0},
                    {"blue", {"blue"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{1.0, "yellow"}, {2.0, "blue"}};
  const auto tl = run_turn_based(p, frames, config(2.0, 10.0));
  const auto queued = of_kind(tl, SimEventKind::kFrameQueued);
  ASSERT_EQ(queued.size(), 1u);
  EXPECT_EQ(queued[0].time_s, 2.0);
  EXPECT_EQ(queued[0].detail, "blue");
  ASSERT_EQ(tl.stream.utterances.size(), 2u);
  EXPECT_EQ(tl.stream.utterances[0].start_s, 1.0);
  EXPECT_GE(tl.stream.utterances[1].start_s, 1.0 + 3.0);
  EXPECT_TRUE(tl.stream.end_time_estimated);
  EXPECT_NEAR(tl.stream.utterances[0].end_s, estimate_end_time(1.0, 6), 1e-12);

  // The same scenario under interleaving mentions blue at least a slot earlier.
  ScriptedPolicy q({{"yellow", {"1", "2", "3", "4", "5", "6"}, Revision{"blue", {"blue"}, true}, 0.0}});
  const auto tsi = run_tsi(q, frames, config(2.0, 10.0));
  ASSERT_EQ(tsi.stream.utterances.size(), 2u);
  EXPECT_LE(tsi.stream.utterances[1].start_s + 0.5, tl.stream.utterances[1].start_s);
}

TEST(RunTurnBased, HighEosMeansSilence) {
  ScriptedPolicy p({{"yellow", {"y"}, std::nullopt, 1.0}});
  const std::vector<FrameEvent> frames = {{1.0, "yellow"}, {2.0, "yellow"}};
  const auto tl = run_turn_based(p, frames, config(2.0, 5.0));
  EXPECT_TRUE(tl.stream.utterances.empty());
  EXPECT_TRUE(of_kind(tl, SimEventKind::kFrameQueued).empty());
}

TEST(RunTurnBased, ThresholdIsInclusiveForSilence) {
  const std::vector<FrameEvent> frames = {{1.0, "yellow"}};
  ScriptedPolicy at({{"yellow", {"y"}, std::nullopt, kEosThresholdPerceptual}});
  EXPECT_TRUE(run_turn_based(at, frames, config(2.0, 5.0)).stream.utterances.empty());
  ScriptedPolicy below({{"yellow", {"y"}, std::nullopt, 0.7}});
  EXPECT_EQ(run_turn_based(below, frames, config(2.0, 5.0)).stream.utterances.size(), 1u);
  SimConfig strict = config(2.0, 5.0);
  strict.eos_threshold = kEosThresholdContingency;
  ScriptedPolicy mid({{"yellow", {"y"}, std::nullopt, 0.75}});
  EXPECT_EQ(run_turn_based(mid, frames, strict).stream.utterances.size(), 1u);
}

TEST(ScriptedPolicy, ConfigurationErrors) {
  EXPECT_THROW(ScriptedPolicy({{"a", {"x"}, std::nullopt, 0.0}, {"a", {"y"}, std::nullopt, 0.0}}),
               ParameterError);
  EXPECT_THROW(ScriptedPolicy({{"", {"x"}, std::nullopt, 0.0}}), ParameterError);
  EXPECT_THROW(ScriptedPolicy({{"a", {}, std::nullopt, 0.0}}), ParameterError);
  EXPECT_THROW(ScriptedPolicy({{"a", {""}, std::nullopt, 0.0}}), ParameterError);
}

TEST(ScriptedPolicy, FiresOncePerMatchingFrame) {
  ScriptedPolicy p({{"yellow", {"y"}, std::nullopt, 0.0}});
  const std::vector<FrameEvent> frames = {{1.0, "yellow"}, {3.0, "yellow"}, {4.0, "other"}};
  EXPECT_EQ(run_tsi(p, frames, config(2.0, 6.0)).stream.utterances.size(), 2u);
}

TEST(Properties, TsiNeverOverlapsSoOverlapEqualsF1) {
  std::mt19937 rng(61);
  MockEmbedder mock;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_scenario(rng);
    ScriptedPolicy p(s.rules);
    const auto tl = run_tsi(p, s.frames, config(4.0, 12.0));
    const auto& us = tl.stream.utterances;
    for (std::size_t a = 0; a + 1 < us.size(); ++a) {
      EXPECT_LT(us[a].end_s, us[a + 1].start_s) << "trial " << trial;
    }
    std::vector<Utterance> ref;
    for (const auto& f : s.frames) ref.push_back(testing::utt(f.time_s, f.time_s + 1.0, f.label));
    const auto r = evaluate_pair(ref, us, TraceParams{}, mock);
    if (!(ref.empty() && us.empty())) EXPECT_NEAR(r.overlap, r.f1, 1e-9) << "trial " << trial;
  }
}

TEST(Properties, TokensNeverReferenceUnseenFrames) {
  std::mt19937 rng(67);
  std::uniform_int_distribution<int> nf(1, 12), gap(1, 9), lab(0, 9);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<FrameEvent> frames;
    double t = 0.0;
    for (int k = nf(rng); k > 0; --k) {
      t += gap(rng) * 0.25;
      frames.push_back({t, "L" + std::to_string(lab(rng))});
    }
    for (bool tsi : {true, false}) {
      EchoPolicy p;
      const auto tl = tsi ? run_tsi(p, frames, config(2.0, 20.0)) : run_turn_based(p, frames, config(2.0, 20.0));
      std::multiset<std::string> ingested;
      for (const auto& e : tl.events) {
        if (e.kind == SimEventKind::kFrameIngested) ingested.insert(e.detail);
        if (e.kind == SimEventKind::kTokenEmitted) {
          EXPECT_TRUE(ingested.count(e.detail)) << "token " << e.detail << " at " << e.time_s;
        }
      }
    }
  }
}

TEST(Properties, TurnBasedQueuesEverythingArrivingDuringGeneration) {
  std::mt19937 rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_scenario(rng);
    ScriptedPolicy p(s.rules);
    const auto tl = run_turn_based(p, s.frames, config(2.0, 12.0));

    std::vector<std::pair<double, double>> spans;
    bool generating = false;
    double open_at = 0.0;
    for (const auto& e : tl.events) {
      if (e.kind == SimEventKind::kUtteranceStart) generating = true, open_at = e.time_s;
      if (e.kind == SimEventKind::kUtteranceEnd) generating = false, spans.emplace_back(open_at, e.time_s);
      if (generating) EXPECT_NE(e.kind, SimEventKind::kFrameIngested) << "trial " << trial;
    }

    // A frame is queued iff its arrival slot falls inside an utterance's
    // (start, end]; frames arriving at the start slot were seen while idle.
    std::set<double> queued;
    for (const auto& e : tl.events) {
      if (e.kind == SimEventKind::kFrameQueued) queued.insert(e.frame_time_s);
    }
    std::size_t expected = 0;
    for (const auto& f : s.frames) {
      long k = 0;
      while (static_cast<double>(k) / 2.0 < f.time_s) ++k;
      const double slot = static_cast<double>(k) / 2.0;
      if (!(slot < 12.0)) continue;
      const bool inside = std::any_of(spans.begin(), spans.end(),
                                      [&](const auto& sp) { return sp.first < slot && slot <= sp.second; });
      EXPECT_EQ(inside, queued.count(f.time_s) == 1) << "trial " << trial << " frame " << f.time_s;
      expected += inside;
    }
    EXPECT_EQ(queued.size(), expected);
  }
}

TEST(Properties, DeterministicAndSlotSpaced) {
  std::mt19937 rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_scenario(rng);
    ScriptedPolicy p(s.rules);
    const auto a = run_tsi(p, s.frames, config(4.0, 12.0));
    const auto b = run_tsi(p, s.frames, config(4.0, 12.0));
    EXPECT_EQ(a, b);
    EXPECT_EQ(run_turn_based(p, s.frames, config(4.0, 12.0)),
              run_turn_based(p, s.frames, config(4.0, 12.0)));

    std::map<int, double> last;
    double prev = 0.0;
    for (const auto& e : a.events) {
      EXPECT_GE(e.time_s, prev);
      prev = e.time_s;
      if (e.kind != SimEventKind::kTokenEmitted) continue;
      if (auto it = last.find(e.utterance); it != last.end()) EXPECT_EQ(e.time_s - it->second, 0.25);
      last[e.utterance] = e.time_s;
    }
  }
}

TEST(YellowBlue, InterleavingBeatsTurnTaking) {
  const auto frames = load_frames(testing::fixture("yellow_blue/frames.json"));
  const auto rules = load_rules(testing::fixture("yellow_blue/policy.json"));
  const auto ref = load_histories(testing::fixture("yellow_blue/reference.jsonl")).histories.at(0).utterances;
  ScriptedPolicy p(rules);
  const auto tsi = run_tsi(p, frames, config(4.0, 6.0));
  const auto turn = run_turn_based(p, frames, config(4.0, 6.0));

  EXPECT_GE(of_kind(turn, SimEventKind::kFrameQueued).size(), 1u);
  auto blue_start = [](const SimTimeline& tl) {
    for (const auto& u : tl.stream.utterances) {
      if (u.text.find("blue") != std::string::npos) return u.start_s;
    }
    return -1.0;
  };
  ASSERT_GE(blue_start(tsi), 0.0);
  ASSERT_GE(blue_start(turn), 0.0);
  EXPECT_LT(blue_start(tsi), blue_start(turn));

  MockEmbedder mock;
  const auto rt = evaluate_pair(ref, tsi.stream.utterances, TraceParams{}, mock);
  const auto rb = evaluate_pair(ref, turn.stream.utterances, TraceParams{}, mock);
  EXPECT_GT(rt.start, rb.start);
  EXPECT_GT(rt.overlap, rb.overlap);
}

TEST(SimJson, ParseErrorsAndEventShape) {
  EXPECT_THROW(frames_from_json(json::parse(R"([{"time": 1}])")), ParseError);
  EXPECT_THROW(frames_from_json(json::parse(R"([{"time": 2, "label": "a"}, {"time": 1, "label": "b"}])")),
               ParseError);
  EXPECT_THROW(rules_from_json(json::parse(R"([{"trigger": "a"}])")), ParseError);
  EXPECT_THROW(rules_from_json(json::parse(R"([{"trigger": "a", "fragments": [1]}])")), ParseError);
  EXPECT_THROW(rules_from_json(json::parse(
                   R"([{"trigger": "a", "fragments": ["x"], "revise_on": {"label": "b", "fragments": ["y"], "restart": 1}}])")),
               ParseError);
  EXPECT_THROW(load_frames("/nonexistent/frames.json"), ParseError);

  const auto j = event_to_json({1.5, SimEventKind::kFrameQueued, "blue", 1.25, -1});
  EXPECT_EQ(j, json::parse(R"({"time": 1.5, "kind": "frame-queued", "label": "blue", "frame_time": 1.25})"));
  const auto k = event_to_json({2.0, SimEventKind::kTokenEmitted, "hi", 0.0, 0});
  EXPECT_EQ(k, json::parse(R"({"time": 2.0, "kind": "token-emitted", "text": "hi", "utterance": 0})"));
}

TEST(SimJson, GeneratedRecordOmitsEstimatedEnds) {
  SimTimeline tl;
  tl.stream.utterances = {testing::utt(1, 2, "a")};
  EXPECT_EQ(to_generated_record(tl, "x").utterances[0].end_s, 2.0);
  tl.stream.end_time_estimated = true;
  EXPECT_FALSE(to_generated_record(tl, "x").utterances[0].end_s.has_value());
}

}  // namespace
}  // namespace tglg
