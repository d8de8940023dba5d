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

// Discrete-time simulation of streaming decoding.
//
// Both runners share one clock: decode slots at t_k = k / token_rate for
// t_k < duration. At most one text token is emitted per slot; BEGIN and END
// markers cost nothing, so a BEGIN is followed by the utterance's first
// token in the same slot.
//
// run_tsi: every pending frame with time <= t_k is ingested before slot k,
// including mid-utterance, and the policy is consulted every slot.
//
// run_turn_based: frames are consulted one by one while idle. If the policy
// asks to speak with an EOS probability below the threshold, the whole
// utterance is decoded while newly arriving frames are queued unseen; the
// queue is drained once the utterance ends.

#ifndef TGLG_SIM_H_
#define TGLG_SIM_H_

#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tglg/core.h"
#include "tglg/io.h"

namespace tglg {

inline constexpr double kEosThresholdPerceptual = 0.725;
inline constexpr double kEosThresholdContingency = 0.8;

struct SimConfig {
  double frame_rate_fps = 2.0;
  double token_rate_tps = 2.0;
  double duration_s = 30.0;  // slots cover [0, duration_s)
  double eos_threshold = kEosThresholdPerceptual;

  void validate() const;
};

struct FrameEvent {
  double time_s = 0.0;
  std::string label;

  bool operator==(const FrameEvent&) const = default;
};

enum class DecisionKind { kSilent, kBegin, kToken, kEnd };

struct PolicyDecision {
  DecisionKind kind = DecisionKind::kSilent;
  std::string fragment;          // kToken only, non-empty
  double eos_probability = 1.0;  // read by the turn-based runner only

  static PolicyDecision silent(double eos = 1.0) { return {DecisionKind::kSilent, {}, eos}; }
  static PolicyDecision begin(double eos = 0.0) { return {DecisionKind::kBegin, {}, eos}; }
  static PolicyDecision token(std::string text) { return {DecisionKind::kToken, std::move(text), 0.0}; }
  static PolicyDecision end() { return {DecisionKind::kEnd, {}, 0.0}; }
};

// What the decoder has seen when it is asked for a decision.
struct DecodeContext {
  double time_s = 0.0;
  std::span<const FrameEvent> frames;         // ingested so far, in order
  std::span<const std::string> fragments;     // every emitted text token so far
  bool generating = false;
};

class Policy {
 public:
  virtual ~Policy() = default;
  // Called once at the start of every run.
  virtual void reset() = 0;
  virtual PolicyDecision decide(const DecodeContext& context) = 0;
};

enum class SimEventKind {
  kFrameIngested,
  kFrameQueued,
  kUtteranceStart,
  kTokenEmitted,
  kUtteranceEnd,
};

const char* to_string(SimEventKind kind);

struct SimEvent {
  double time_s = 0.0;
  SimEventKind kind = SimEventKind::kFrameIngested;
  std::string detail;        // frame label or token text
  double frame_time_s = 0.0; // frame events: arrival time
  int utterance = -1;        // utterance events and tokens

  bool operator==(const SimEvent&) const = default;
};

struct SimTimeline {
  std::vector<SimEvent> events;  // times non-decreasing
  GeneratedStream stream;

  bool operator==(const SimTimeline&) const = default;
};

// Throws ParameterError for unsorted frames, ProtocolError when the policy
// emits a token outside generation mode (the message names the slot).
SimTimeline run_tsi(Policy& policy, std::span<const FrameEvent> frames, const SimConfig& config);

// Utterances carry estimated end times (end_time_estimated = true).
SimTimeline run_turn_based(Policy& policy, std::span<const FrameEvent> frames,
                           const SimConfig& config);

// ---------------------------------------------------------------------------
// Scripted policy

struct Revision {
  std::string label;
  std::vector<std::string> fragments;
  // false: replace the remaining fragments of the current utterance;
  // true: close it and open a new utterance (BEGIN mid-generation).
  bool restart = false;
};

struct ScriptRule {
  std::string trigger;
  std::vector<std::string> fragments;
  std::optional<Revision> revise_on;
  double eos_probability = 0.0;
};

// Each ingested frame whose label matches a rule's trigger queues that rule
// once; queued rules are spoken in order. While a rule with `revise_on` is
// being spoken, the first new frame with the revision label switches the
// remaining fragments (or restarts). A frame consumed by a revision does not
// also queue a rule. Silent otherwise.
class ScriptedPolicy : public Policy {
 public:
  // Throws ParameterError on duplicate triggers, empty triggers or empty
  // fragment lists.
  explicit ScriptedPolicy(std::vector<ScriptRule> rules);

  void reset() override;
  PolicyDecision decide(const DecodeContext& context) override;

  const std::vector<ScriptRule>& rules() const { return rules_; }

 private:
  const ScriptRule* find(const std::string& label) const;

  std::vector<ScriptRule> rules_;
  std::size_t frames_seen_ = 0;
  std::deque<const ScriptRule*> queued_;
  const ScriptRule* active_ = nullptr;
  std::deque<std::string> remaining_;
  bool revision_due_ = false;
  bool revised_ = false;
};

// ---------------------------------------------------------------------------
// File formats

// [{"time": t, "label": s}, ...], strictly increasing times.
std::vector<FrameEvent> frames_from_json(const json& j);
std::vector<FrameEvent> load_frames(const std::string& path);

// [{"trigger": s, "fragments": [s...], "revise_on"?: {"label": s,
//   "fragments": [s...], "restart"?: bool}, "eos"?: p}, ...]
std::vector<ScriptRule> rules_from_json(const json& j);
std::vector<ScriptRule> load_rules(const std::string& path);

json event_to_json(const SimEvent& event);

// Generated-stream record; end times are omitted when estimated so the
// harness re-derives them from token counts.
GeneratedRecord to_generated_record(const SimTimeline& timeline, const std::string& instance_id);

}  // namespace tglg

#endif  // TGLG_SIM_H_
