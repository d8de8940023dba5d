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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tglg/errors.h"
#include "tglg/harness.h"

namespace tglg {
namespace {

// More markers than this in one slot means the policy is looping.
constexpr int kMaxMarkersPerSlot = 4;

void check_frames(std::span<const FrameEvent> frames) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!std::isfinite(frames[i].time_s) || frames[i].time_s < 0.0) {
      throw ParameterError("frame " + std::to_string(i) + ": time must be finite and >= 0");
    }
    if (i > 0 && !(frames[i].time_s > frames[i - 1].time_s)) {
      throw ParameterError("frame " + std::to_string(i) + ": times must be strictly increasing");
    }
  }
}

std::string slot_name(long k, double t) {
  std::ostringstream os;
  os << "slot " << k << " (t=" << t << "s)";
  return os.str();
}

// Accumulates the event log, the emitted-text context and the utterances.
class Recorder {
 public:
  void frame(double t, const FrameEvent& f, SimEventKind kind) {
    timeline_.events.push_back({t, kind, f.label, f.time_s, -1});
  }

  void token(double t, const std::string& text) {
    if (tokens_.empty()) {
      start_ = t;
      timeline_.events.push_back({t, SimEventKind::kUtteranceStart, {}, 0.0, index()});
    }
    timeline_.events.push_back({t, SimEventKind::kTokenEmitted, text, 0.0, index()});
    tokens_.push_back(text);
    fragments_.push_back(text);
    last_ = t;
  }

  // Closes the open utterance, if it has any token.
  void close(double t) {
    if (tokens_.empty()) return;
    timeline_.events.push_back({t, SimEventKind::kUtteranceEnd, {}, 0.0, index()});
    Utterance u;
    u.role = kModelRole;
    u.start_s = start_;
    u.end_s = last_;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (i > 0) u.text += ' ';
      u.text += tokens_[i];
    }
    u.token_count = static_cast<int>(tokens_.size());
    timeline_.stream.utterances.push_back(std::move(u));
    tokens_.clear();
  }

  bool open() const { return !tokens_.empty(); }
  const std::vector<std::string>& fragments() const { return fragments_; }
  SimTimeline take() { return std::move(timeline_); }

 private:
  int index() const { return static_cast<int>(timeline_.stream.utterances.size()); }

  SimTimeline timeline_;
  std::vector<std::string> fragments_;
  std::vector<std::string> tokens_;
  double start_ = 0.0;
  double last_ = 0.0;
};

struct Decoder {
  Policy& policy;
  Recorder& rec;
  std::vector<FrameEvent>& context_frames;
  bool generating = false;

  PolicyDecision ask(double t) {
    DecodeContext ctx{t, context_frames, rec.fragments(), generating};
    return policy.decide(ctx);
  }

  // Runs decisions for one slot until a token is emitted or the policy stays
  // silent. BEGIN/END are zero-cost markers.
  void slot(long k, double t) {
    int markers = 0;
    for (;;) {
      const PolicyDecision d = ask(t);
      switch (d.kind) {
        case DecisionKind::kToken:
          if (!generating) {
            throw ProtocolError(slot_name(k, t) + ": TOKEN emitted outside generation mode");
          }
          if (d.fragment.empty()) throw ProtocolError(slot_name(k, t) + ": empty TOKEN fragment");
          rec.token(t, d.fragment);
          return;
        case DecisionKind::kBegin:
          if (generating) rec.close(t);
          generating = true;
          break;
        case DecisionKind::kEnd:
          if (!generating) return;  // discarded
          rec.close(t);
          generating = false;
          break;
        case DecisionKind::kSilent:
          return;
      }
      if (++markers > kMaxMarkersPerSlot) {
        throw ProtocolError(slot_name(k, t) + ": too many BEGIN/END markers in one slot");
      }
    }
  }
};

}  // namespace

const char* to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::kFrameIngested: return "frame-ingested";
    case SimEventKind::kFrameQueued: return "frame-queued";
    case SimEventKind::kUtteranceStart: return "utterance-start";
    case SimEventKind::kTokenEmitted: return "token-emitted";
    case SimEventKind::kUtteranceEnd: return "utterance-end";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (!(frame_rate_fps > 0.0)) throw ParameterError("frame_rate_fps must be > 0");
  if (!(token_rate_tps > 0.0)) throw ParameterError("token_rate_tps must be > 0");
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
    throw ParameterError("duration_s must be finite and >= 0");
  }
  if (!(eos_threshold >= 0.0 && eos_threshold <= 1.0)) {
    throw ParameterError("eos_threshold must be in [0,1]");
  }
}

SimTimeline run_tsi(Policy& policy, std::span<const FrameEvent> frames, const SimConfig& config) {
  config.validate();
  check_frames(frames);
  policy.reset();

  Recorder rec;
  std::vector<FrameEvent> context;
  Decoder dec{policy, rec, context};
  std::size_t next = 0;
  double t = 0.0;
  for (long k = 0;; ++k) {
    t = static_cast<double>(k) / config.token_rate_tps;
    if (!(t < config.duration_s)) break;
    while (next < frames.size() && frames[next].time_s <= t) {
      context.push_back(frames[next]);
      rec.frame(t, frames[next], SimEventKind::kFrameIngested);
      ++next;
    }
    dec.slot(k, t);
  }
  if (rec.open()) rec.close(t);
  return rec.take();
}

SimTimeline run_turn_based(Policy& policy, std::span<const FrameEvent> frames,
                           const SimConfig& config) {
  config.validate();
  check_frames(frames);
  policy.reset();

  Recorder rec;
  std::vector<FrameEvent> context;
  Decoder dec{policy, rec, context};
  std::deque<FrameEvent> pending;
  std::size_t next = 0;
  double t = 0.0;
  for (long k = 0;; ++k) {
    t = static_cast<double>(k) / config.token_rate_tps;
    if (!(t < config.duration_s)) break;
    while (next < frames.size() && frames[next].time_s <= t) {
      if (dec.generating) rec.frame(t, frames[next], SimEventKind::kFrameQueued);
      pending.push_back(frames[next]);
      ++next;
    }

    if (dec.generating) {
      dec.slot(k, t);
      if (dec.generating) continue;
    }

    // Idle: consult the policy once per frame, in arrival order.
    while (!pending.empty() && !dec.generating) {
      context.push_back(pending.front());
      rec.frame(t, pending.front(), SimEventKind::kFrameIngested);
      pending.pop_front();
      const PolicyDecision d = dec.ask(t);
      if (d.kind == DecisionKind::kToken) {
        throw ProtocolError(slot_name(k, t) + ": TOKEN emitted outside generation mode");
      }
      if (d.kind != DecisionKind::kBegin || d.eos_probability >= config.eos_threshold) continue;
      dec.generating = true;
      dec.slot(k, t);
    }
  }
  if (rec.open()) rec.close(t);

  SimTimeline tl = rec.take();
  for (auto& u : tl.stream.utterances) {
    u.end_s = estimate_end_time(u.start_s, std::max(1, u.token_count.value_or(1)));
  }
  tl.stream.end_time_estimated = true;
  return tl;
}

// ---------------------------------------------------------------------------
// ScriptedPolicy

ScriptedPolicy::ScriptedPolicy(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {
  std::set<std::string> triggers;
  for (const auto& r : rules_) {
    if (r.trigger.empty()) throw ParameterError("script rule has an empty trigger");
    if (!triggers.insert(r.trigger).second) {
      throw ParameterError("duplicate trigger label '" + r.trigger + "'");
    }
    if (r.fragments.empty()) throw ParameterError("rule '" + r.trigger + "' has no fragments");
    for (const auto& f : r.fragments) {
      if (f.empty()) throw ParameterError("rule '" + r.trigger + "' has an empty fragment");
    }
    if (r.revise_on) {
      if (r.revise_on->label.empty()) throw ParameterError("rule '" + r.trigger + "': empty revise label");
      if (r.revise_on->fragments.empty()) {
        throw ParameterError("rule '" + r.trigger + "': revision has no fragments");
      }
    }
    if (!(r.eos_probability >= 0.0 && r.eos_probability <= 1.0)) {
      throw ParameterError("rule '" + r.trigger + "': eos must be in [0,1]");
    }
  }
}

void ScriptedPolicy::reset() {
  frames_seen_ = 0;
  queued_.clear();
  active_ = nullptr;
  remaining_.clear();
  revision_due_ = false;
  revised_ = false;
}

const ScriptRule* ScriptedPolicy::find(const std::string& label) const {
  for (const auto& r : rules_) {
    if (r.trigger == label) return &r;
  }
  return nullptr;
}

PolicyDecision ScriptedPolicy::decide(const DecodeContext& ctx) {
  for (; frames_seen_ < ctx.frames.size(); ++frames_seen_) {
    const FrameEvent& f = ctx.frames[frames_seen_];
    if (ctx.generating && active_ && active_->revise_on && !revised_ && !revision_due_ &&
        f.label == active_->revise_on->label) {
      revision_due_ = true;
      continue;
    }
    if (const ScriptRule* r = find(f.label)) queued_.push_back(r);
  }

  if (ctx.generating && active_) {
    if (revision_due_) {
      revision_due_ = false;
      revised_ = true;
      const Revision& rev = *active_->revise_on;
      remaining_.assign(rev.fragments.begin(), rev.fragments.end());
      if (rev.restart) return PolicyDecision::begin();
    }
    if (!remaining_.empty()) {
      std::string next = std::move(remaining_.front());
      remaining_.pop_front();
      return PolicyDecision::token(std::move(next));
    }
    active_ = nullptr;
    return PolicyDecision::end();
  }
  if (ctx.generating) return PolicyDecision::end();

  // Idle. A BEGIN the runner did not act on is dropped.
  active_ = nullptr;
  remaining_.clear();
  revision_due_ = false;
  if (queued_.empty()) return PolicyDecision::silent(1.0);
  active_ = queued_.front();
  queued_.pop_front();
  remaining_.assign(active_->fragments.begin(), active_->fragments.end());
  revised_ = false;
  return PolicyDecision::begin(active_->eos_probability);
}

// ---------------------------------------------------------------------------
// File formats

namespace {

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "' at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) {
    if (!s.is_string()) throw ParseError(where + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<FrameEvent> frames_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("frame script must be an array");
  std::vector<FrameEvent> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& f = j[i];
    const std::string where = "frame " + std::to_string(i);
    if (!f.is_object() || !f.contains("time") || !f["time"].is_number()) {
      throw ParseError(where + ": field 'time' missing or not a number");
    }
    if (!f.contains("label") || !f["label"].is_string()) {
      throw ParseError(where + ": field 'label' missing or not a string");
    }
    out.push_back({f["time"].get<double>(), f["label"].get<std::string>()});
  }
  try {
    check_frames(out);
  } catch (const ParameterError& e) {
    throw ParseError(e.what());
  }
  return out;
}

std::vector<FrameEvent> load_frames(const std::string& path) {
  return frames_from_json(parse_file(path));
}

std::vector<ScriptRule> rules_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("policy script must be an array");
  std::vector<ScriptRule> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    const std::string where = "rule " + std::to_string(i);
    if (!r.is_object() || !r.contains("trigger") || !r["trigger"].is_string()) {
      throw ParseError(where + ": field 'trigger' missing or not a string");
    }
    if (!r.contains("fragments")) throw ParseError(where + ": field 'fragments' missing");
    ScriptRule rule;
    rule.trigger = r["trigger"].get<std::string>();
    rule.fragments = string_list(r["fragments"], where + ".fragments");
    if (auto it = r.find("revise_on"); it != r.end() && !it->is_null()) {
      if (!it->is_object() || !it->contains("label") || !(*it)["label"].is_string()) {
        throw ParseError(where + ".revise_on: field 'label' missing or not a string");
      }
      Revision rev;
      rev.label = (*it)["label"].get<std::string>();
      if (!it->contains("fragments")) throw ParseError(where + ".revise_on: field 'fragments' missing");
      rev.fragments = string_list((*it)["fragments"], where + ".revise_on.fragments");
      if (auto rs = it->find("restart"); rs != it->end()) {
        if (!rs->is_boolean()) throw ParseError(where + ".revise_on: 'restart' must be a boolean");
        rev.restart = rs->get<bool>();
      }
      rule.revise_on = std::move(rev);
    }
    if (auto it = r.find("eos"); it != r.end()) {
      if (!it->is_number()) throw ParseError(where + ": 'eos' must be a number");
      rule.eos_probability = it->get<double>();
    }
    out.push_back(std::move(rule));
  }
  return out;
}

std::vector<ScriptRule> load_rules(const std::string& path) {
  return rules_from_json(parse_file(path));
}

json event_to_json(const SimEvent& e) {
  json j = {{"time", e.time_s}, {"kind", to_string(e.kind)}};
  switch (e.kind) {
    case SimEventKind::kFrameIngested:
    case SimEventKind::kFrameQueued:
      j["label"] = e.detail;
      j["frame_time"] = e.frame_time_s;
      break;
    case SimEventKind::kTokenEmitted:
      j["text"] = e.detail;
      j["utterance"] = e.utterance;
      break;
    case SimEventKind::kUtteranceStart:
    case SimEventKind::kUtteranceEnd:
      j["utterance"] = e.utterance;
      break;
  }
  return j;
}

GeneratedRecord to_generated_record(const SimTimeline& timeline, const std::string& instance_id) {
  GeneratedRecord rec;
  rec.instance_id = instance_id;
  for (const auto& u : timeline.stream.utterances) {
    RawGeneratedUtterance raw;
    raw.start_s = u.start_s;
    if (!timeline.stream.end_time_estimated) raw.end_s = u.end_s;
    raw.text = u.text;
    raw.token_count = u.token_count;
    rec.utterances.push_back(std::move(raw));
  }
  return rec;
}

}  // namespace tglg
