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

#include "tglg/io.h"

#include "tglg/errors.h"

namespace tglg {
namespace {

const json& field(const json& j, const char* key, const char* where) {
  if (!j.is_object()) throw ParseError(std::string(where) + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

double number(const json& j, const char* key, const char* where) {
  const auto& v = field(j, key, where);
  if (!v.is_number()) throw ParseError(std::string(where) + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::string string(const json& j, const char* key, const char* where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) throw ParseError(std::string(where) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<int> optional_tokens(const json& j, const char* where) {
  auto it = j.find("tokens");
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw ParseError(std::string(where) + ": field 'tokens' must be an integer");
  return it->get<int>();
}

std::map<std::string, std::string> string_map(const json& j, const char* where) {
  std::map<std::string, std::string> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw ParseError(std::string(where) + ": 'metadata' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      out[k] = v.get<std::string>();
    } else {
      out[k] = v.dump();
    }
  }
  return out;
}

}  // namespace

json history_to_json(const InteractionHistory& h) {
  json us = json::array();
  for (const auto& u : h.utterances) {
    json ju = {{"role", u.role}, {"start", u.start_s}, {"end", u.end_s}, {"text", u.text}};
    if (u.token_count) ju["tokens"] = *u.token_count;
    if (!u.dialogue_acts.empty()) ju["acts"] = u.dialogue_acts;
    us.push_back(std::move(ju));
  }
  return {{"id", h.id}, {"metadata", h.metadata}, {"utterances", std::move(us)}};
}

InteractionHistory history_from_json(const json& j) {
  InteractionHistory h;
  h.id = string(j, "id", "history");
  if (auto it = j.find("metadata"); it != j.end()) h.metadata = string_map(*it, "history");
  const auto& us = field(j, "utterances", "history");
  if (!us.is_array()) throw ParseError("history: 'utterances' must be an array");
  for (const auto& ju : us) {
    Utterance u;
    u.role = string(ju, "role", "utterance");
    u.start_s = number(ju, "start", "utterance");
    u.end_s = number(ju, "end", "utterance");
    u.text = string(ju, "text", "utterance");
    u.token_count = optional_tokens(ju, "utterance");
    if (auto it = ju.find("acts"); it != ju.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError("utterance: 'acts' must be an array");
      for (const auto& a : *it) {
        if (!a.is_string()) throw ParseError("utterance: 'acts' entries must be strings");
        u.dialogue_acts.push_back(a.get<std::string>());
      }
    }
    h.utterances.push_back(std::move(u));
  }
  return h;
}

json generated_to_json(const GeneratedRecord& r) {
  json us = json::array();
  for (const auto& u : r.utterances) {
    json ju = {{"start", u.start_s}};
    if (u.end_s) ju["end"] = *u.end_s;
    ju["text"] = u.text;
    if (u.token_count) ju["tokens"] = *u.token_count;
    us.push_back(std::move(ju));
  }
  return {{"instance_id", r.instance_id}, {"utterances", std::move(us)}};
}

GeneratedRecord generated_from_json(const json& j) {
  GeneratedRecord r;
  r.instance_id = string(j, "instance_id", "generated record");
  const auto& us = field(j, "utterances", "generated record");
  if (!us.is_array()) throw ParseError("generated record: 'utterances' must be an array");
  for (const auto& ju : us) {
    RawGeneratedUtterance u;
    u.start_s = number(ju, "start", "generated utterance");
    if (auto it = ju.find("end"); it != ju.end() && !it->is_null()) {
      if (!it->is_number()) throw ParseError("generated utterance: field 'end' must be a number");
      u.end_s = it->get<double>();
    }
    u.text = string(ju, "text", "generated utterance");
    u.token_count = optional_tokens(ju, "generated utterance");
    r.utterances.push_back(std::move(u));
  }
  return r;
}

json params_to_json(const TraceParams& p) {
  return {{"tau_time", p.tau_time},       {"tau_win", p.tau_win},
          {"tau_pen", p.tau_pen},         {"alpha_start", p.alpha_start},
          {"alpha_end", p.alpha_end},     {"alpha", p.alpha},
          {"max_refine_passes", p.max_refine_passes}};
}

TraceParams params_from_json(const json& j, TraceParams p) {
  if (!j.is_object()) throw ParseError("params must be an object");
  auto read = [&](const char* key, double& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) throw ParseError(std::string("params: '") + key + "' must be a number");
      dst = it->get<double>();
    }
  };
  read("tau_time", p.tau_time);
  read("tau_win", p.tau_win);
  read("tau_pen", p.tau_pen);
  read("alpha_start", p.alpha_start);
  read("alpha_end", p.alpha_end);
  read("alpha", p.alpha);
  if (auto it = j.find("max_refine_passes"); it != j.end()) {
    if (!it->is_number_integer()) throw ParseError("params: 'max_refine_passes' must be an integer");
    p.max_refine_passes = it->get<int>();
  }
  return p;
}

json report_to_json(const TraceReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pair_details) {
    pairs.push_back({{"gt", p.gt_index},
                     {"gen", p.gen_index},
                     {"similarity", p.similarity},
                     {"start", p.start},
                     {"end", p.end}});
  }
  return {{"trace", r.trace},
          {"semantic", r.semantic},
          {"timing", r.timing},
          {"start", r.start},
          {"end", r.end},
          {"overlap", r.overlap},
          {"f1", r.f1},
          {"precision", r.precision},
          {"recall", r.recall},
          {"n_ground_truth", r.n_ground_truth},
          {"n_generated", r.n_generated},
          {"n_matched", r.n_matched},
          {"pairs", std::move(pairs)}};
}

TraceReport report_from_json(const json& j) {
  TraceReport r;
  r.trace = number(j, "trace", "report");
  r.semantic = number(j, "semantic", "report");
  r.timing = number(j, "timing", "report");
  r.start = number(j, "start", "report");
  r.end = number(j, "end", "report");
  r.overlap = number(j, "overlap", "report");
  r.f1 = number(j, "f1", "report");
  r.precision = number(j, "precision", "report");
  r.recall = number(j, "recall", "report");
  r.n_ground_truth = static_cast<std::size_t>(number(j, "n_ground_truth", "report"));
  r.n_generated = static_cast<std::size_t>(number(j, "n_generated", "report"));
  r.n_matched = static_cast<std::size_t>(number(j, "n_matched", "report"));
  if (auto it = j.find("pairs"); it != j.end()) {
    for (const auto& p : *it) {
      r.pair_details.push_back({static_cast<std::size_t>(number(p, "gt", "pair")),
                                static_cast<std::size_t>(number(p, "gen", "pair")),
                                number(p, "similarity", "pair"), number(p, "start", "pair"),
                                number(p, "end", "pair")});
    }
  }
  return r;
}

json report_record_to_json(const ReportRecord& rec) {
  return {{"instance_id", rec.instance_id},
          {"metadata", rec.metadata},
          {"params", params_to_json(rec.params)},
          {"report", report_to_json(rec.report)}};
}

ReportRecord report_record_from_json(const json& j) {
  ReportRecord rec;
  rec.instance_id = string(j, "instance_id", "report record");
  if (auto it = j.find("metadata"); it != j.end()) rec.metadata = string_map(*it, "report record");
  if (auto it = j.find("params"); it != j.end()) rec.params = params_from_json(*it);
  rec.report = report_from_json(field(j, "report", "report record"));
  return rec;
}

std::string dump_line(const json& j) { return j.dump(); }

}  // namespace tglg
