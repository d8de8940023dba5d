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

#include "tglg/harness.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "tglg/errors.h"

namespace tglg {
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

std::string lowercase(std::string s) {
  for (char& c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    try {
      fn(j, line_no);
    } catch (const ParseError& e) {
      if (e.line() > 0) throw;
      throw ParseError(e.what(), line_no);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Ingestion

int estimate_token_count(const std::string& text) {
  std::istringstream words(text);
  std::string w;
  long n = 0;
  while (words >> w) ++n;
  return static_cast<int>(std::ceil(static_cast<double>(n) * kTokensPerWord));
}

double estimate_end_time(double start_s, int token_count) {
  if (token_count < 1) throw ParameterError("token_count must be >= 1");
  return start_s + (static_cast<double>(token_count) / kTokensPerWord) / kWordsPerSecond;
}

HistoryLoad parse_histories(std::istream& in) {
  HistoryLoad out;
  for_each_record(in, [&](const json& j, long line_no) {
    InteractionHistory h = history_from_json(j);
    std::vector<std::string> violations;
    for (std::size_t i = 0; i < h.utterances.size(); ++i) {
      auto v = validate_utterance(h.utterances[i], i);
      violations.insert(violations.end(), v.begin(), v.end());
    }
    if (!violations.empty()) {
      ++out.skipped;
      out.warnings.push_back("line " + std::to_string(line_no) + " (history '" + h.id +
                             "') skipped: " + violations.front());
      return;
    }
    sort_utterances(h.utterances);
    for (auto& u : h.utterances) {
      if (!u.token_count && !u.text.empty()) {
        const int n = estimate_token_count(u.text);
        if (n > 0) u.token_count = n;
      }
    }
    out.histories.push_back(std::move(h));
  });
  return out;
}

HistoryLoad load_histories(const std::string& path) {
  auto in = open_input(path);
  return parse_histories(in);
}

GeneratedStream to_stream(const GeneratedRecord& record) {
  GeneratedStream s;
  for (const auto& raw : record.utterances) {
    Utterance u;
    u.role = kModelRole;
    u.start_s = raw.start_s;
    u.text = raw.text;
    u.token_count = raw.token_count;
    if (!u.token_count && !u.text.empty()) {
      const int n = estimate_token_count(u.text);
      if (n > 0) u.token_count = n;
    }
    if (raw.end_s) {
      u.end_s = *raw.end_s;
    } else {
      u.end_s = estimate_end_time(u.start_s, std::max(1, u.token_count.value_or(1)));
      s.end_time_estimated = true;
    }
    s.utterances.push_back(std::move(u));
  }
  sort_utterances(s.utterances);
  return s;
}

GeneratedLoad parse_generated(std::istream& in) {
  GeneratedLoad out;
  for_each_record(in, [&](const json& j, long) {
    auto rec = generated_from_json(j);
    for (std::size_t i = 0; i < rec.utterances.size(); ++i) {
      const auto& u = rec.utterances[i];
      if (!std::isfinite(u.start_s) || u.start_s < 0.0 || (u.end_s && *u.end_s < u.start_s)) {
        throw ParseError("instance '" + rec.instance_id + "' utterance " + std::to_string(i) +
                         ": invalid times");
      }
    }
    if (out.streams.count(rec.instance_id)) {
      throw ParseError("duplicate instance_id '" + rec.instance_id + "'");
    }
    out.streams.emplace(rec.instance_id, to_stream(rec));
  });
  return out;
}

GeneratedLoad load_generated(const std::string& path) {
  auto in = open_input(path);
  return parse_generated(in);
}

// ---------------------------------------------------------------------------
// Clusters and instances

TargetPredicate any_role() {
  return [](const Utterance&) { return true; };
}

TargetPredicate role_is(std::vector<std::string> roles) {
  return [roles = std::move(roles)](const Utterance& u) {
    return std::find(roles.begin(), roles.end(), u.role) != roles.end();
  };
}

TargetPredicate act_in(std::vector<std::string> acts) {
  return [acts = std::move(acts)](const Utterance& u) {
    return std::any_of(u.dialogue_acts.begin(), u.dialogue_acts.end(), [&](const std::string& a) {
      return std::find(acts.begin(), acts.end(), a) != acts.end();
    });
  };
}

std::vector<EvaluationCluster> extract_clusters(const InteractionHistory& history,
                                                const TargetPredicate& is_target,
                                                double window_s) {
  if (!(window_s > 0.0)) throw ParameterError("window_s must be > 0");
  std::vector<EvaluationCluster> out;
  EvaluationCluster open{{}, window_s};
  double lo = 0.0, hi = 0.0;

  auto close = [&] {
    if (!open.indices.empty()) out.push_back(std::move(open));
    open = EvaluationCluster{{}, window_s};
  };

  const auto& us = history.utterances;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const Utterance& u = us[i];
    if (!is_target(u)) {
      close();
      continue;
    }
    if (!open.indices.empty()) {
      const double new_lo = std::min(lo, u.start_s);
      const double new_hi = std::max(hi, u.end_s);
      if (new_hi - new_lo <= window_s) {
        open.indices.push_back(i);
        lo = new_lo;
        hi = new_hi;
        continue;
      }
      close();
    }
    open.indices.push_back(i);
    lo = u.start_s;
    hi = u.end_s;
  }
  close();
  return out;
}

EvaluationInstance build_instance(const InteractionHistory& history,
                                  const EvaluationCluster& cluster, double fps) {
  const auto& us = history.utterances;
  if (cluster.indices.empty()) throw StructuralError("cluster is empty");
  for (std::size_t k = 0; k < cluster.indices.size(); ++k) {
    if (cluster.indices[k] >= us.size()) {
      throw StructuralError("cluster index " + std::to_string(cluster.indices[k]) +
                            " out of range for history '" + history.id + "' with " +
                            std::to_string(us.size()) + " utterances");
    }
    if (k > 0 && cluster.indices[k] <= cluster.indices[k - 1]) {
      throw StructuralError("cluster indices must be strictly increasing");
    }
  }
  if (!(fps > 0.0)) throw ParameterError("frame rate must be > 0");

  EvaluationInstance inst;
  inst.id = history.id;
  inst.metadata = history.metadata;
  inst.frame_rate_fps = fps;
  const std::size_t first = cluster.indices.front();
  inst.context_end_s = us[first].start_s;
  inst.eval_end_s = us[cluster.indices.back()].end_s;
  inst.timeline_start_s = us.front().start_s;
  for (std::size_t i = 0; i < first; ++i) {
    if (us[i].start_s < inst.context_end_s) inst.context_utterances.push_back(us[i]);
  }
  for (std::size_t idx : cluster.indices) inst.target_utterances.push_back(us[idx]);
  return inst;
}

std::vector<EvaluationInstance> build_instances(const InteractionHistory& history,
                                                const TargetPredicate& is_target,
                                                double window_s, double fps) {
  std::vector<EvaluationInstance> out;
  const auto clusters = extract_clusters(history, is_target, window_s);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    auto inst = build_instance(history, clusters[k], fps);
    inst.id = history.id + "#" + std::to_string(k);
    out.push_back(std::move(inst));
  }
  return out;
}

EvaluationInstance whole_history_instance(const InteractionHistory& history, double fps) {
  EvaluationInstance inst;
  inst.id = history.id;
  inst.metadata = history.metadata;
  inst.frame_rate_fps = fps;
  inst.target_utterances = history.utterances;
  if (!history.utterances.empty()) {
    inst.timeline_start_s = history.utterances.front().start_s;
    inst.context_end_s = inst.timeline_start_s;
    double end = inst.timeline_start_s;
    for (const auto& u : history.utterances) end = std::max(end, u.end_s);
    inst.eval_end_s = end;
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Statistics

DatasetStats dataset_stats(const std::vector<InteractionHistory>& histories,
                           const TargetPredicate& counted) {
  DatasetStats s;
  s.size = histories.size();
  long long tokens = 0;
  std::size_t with_tokens = 0;
  std::vector<double> gaps;
  for (const auto& h : histories) {
    const Utterance* prev = nullptr;
    for (const auto& u : h.utterances) {
      if (!counted(u)) continue;
      ++s.n_utterances;
      const int t = u.token_count ? *u.token_count : estimate_token_count(u.text);
      tokens += t;
      ++with_tokens;
      if (prev) gaps.push_back(u.start_s - prev->start_s);
      prev = &u;
    }
  }
  if (s.size > 0) s.avg_utterances = static_cast<double>(s.n_utterances) / static_cast<double>(s.size);
  if (with_tokens > 0) s.avg_tokens = static_cast<double>(tokens) / static_cast<double>(with_tokens);
  if (!gaps.empty()) {
    // Sorted summation keeps the result independent of record order.
    std::sort(gaps.begin(), gaps.end());
    double sum = 0.0;
    for (double g : gaps) sum += g;
    s.avg_gap_s = sum / static_cast<double>(gaps.size());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Categories

CategoryMap::CategoryMap(std::string name,
                         std::vector<std::pair<std::string, std::vector<std::string>>> groups)
    : name_(std::move(name)), groups_(std::move(groups)) {
  std::set<std::string> labels;
  for (const auto& [label, keys] : groups_) {
    if (!labels.insert(label).second) {
      throw ParameterError("category map '" + name_ + "': duplicate group '" + label + "'");
    }
    for (const auto& k : keys) {
      if (!lookup_.emplace(lowercase(k), label).second) {
        throw ParameterError("category map '" + name_ + "': raw key '" + k +
                             "' appears in more than one group");
      }
    }
  }
}

std::optional<std::string> CategoryMap::group_of(const std::string& raw_key) const {
  auto it = lookup_.find(lowercase(raw_key));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

CategoryMap soccernet_categories() {
  return CategoryMap(
      "soccernet",
      {{"Attempts", {"Shots on target", "Shots off target", "Clearance"}},
       {"Discipline", {"Yellow card", "Red card", "Yellow->red card"}},
       {"Goal/Penalty", {"Goal", "Penalty"}},
       {"Infractions", {"Offside", "Foul"}},
       {"Restarts",
        {"Kick-off", "Ball out of play", "Throw-in", "Corner", "Direct free-kick",
         "Indirect free-kick"}},
       {"Substitution", {"Substitution"}}});
}

CategoryMap holoassist_categories() {
  return CategoryMap(
      "holoassist",
      {{"Assemble Furniture",
        {"assemble nightstand", "assemble stool", "assemble tray table", "assemble utility cart"}},
       {"Disassemble Furniture",
        {"disassemble nightstand", "disassemble stool", "disassemble tray table",
         "disassemble utility cart"}},
       {"Make Coffee", {"make coffee with nespresso machine", "make coffee with espresso machine"}},
       {"Repair Machinery", {"change belt", "change circuit breaker", "fix motorcycle"}},
       {"Setup Electronics",
        {"setup camera", "setup switch", "setup big printer", "setup small printer", "setup gopro",
         "assemble laser scanner", "assemble computer"}}});
}

CategoryMap category_map_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("groups") || !j["groups"].is_object()) {
    throw ParseError("category map needs an object field 'groups'");
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  for (const auto& [label, keys] : j["groups"].items()) {
    if (!keys.is_array()) throw ParseError("category group '" + label + "' must be an array");
    std::vector<std::string> ks;
    for (const auto& k : keys) {
      if (!k.is_string()) throw ParseError("category group '" + label + "' has a non-string key");
      ks.push_back(k.get<std::string>());
    }
    groups.emplace_back(label, std::move(ks));
  }
  return CategoryMap(j.value("name", std::string("custom")), std::move(groups));
}

CategoryMap load_category_map(const std::string& path) {
  auto in = open_input(path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::ordered_json::exception& e) {
    throw ParseError("category map '" + path + "': " + e.what());
  }
  return category_map_from_json(j);
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

struct GroupSums {
  std::size_t count = 0;
  double trace = 0, semantic = 0, timing = 0, start = 0, end = 0, overlap = 0, f1 = 0;

  void add(const TraceReport& r) {
    ++count;
    trace += r.trace;
    semantic += r.semantic;
    timing += r.timing;
    start += r.start;
    end += r.end;
    overlap += r.overlap;
    f1 += r.f1;
  }
};

std::map<std::string, GroupSums> group_reports(const std::vector<ScoredInstance>& reports,
                                               const CategoryMap& map,
                                               std::vector<std::string>* warnings) {
  std::map<std::string, GroupSums> sums;
  for (const auto& s : reports) {
    auto it = s.metadata.find(kCategoryKey);
    std::optional<std::string> group;
    if (it == s.metadata.end()) {
      if (warnings) warnings->push_back("instance '" + s.instance_id + "': no category metadata");
    } else {
      group = map.group_of(it->second);
      if (!group && warnings) {
        warnings->push_back("instance '" + s.instance_id + "': unknown category '" + it->second +
                            "'");
      }
    }
    sums[group.value_or(kUncategorized)].add(s.report);
  }
  return sums;
}

}  // namespace

AggregateResult aggregate(const std::vector<ScoredInstance>& reports, const CategoryMap& map,
                          const std::vector<ScoredInstance>* baseline) {
  AggregateResult out;
  const auto model = group_reports(reports, map, &out.warnings);
  std::map<std::string, GroupSums> base;
  if (baseline) base = group_reports(*baseline, map, &out.warnings);

  std::vector<std::string> order;
  for (const auto& [label, keys] : map.groups()) order.push_back(label);
  order.push_back(kUncategorized);

  for (const auto& label : order) {
    auto it = model.find(label);
    if (it == model.end() || it->second.count == 0) continue;
    const GroupSums& g = it->second;
    const auto n = static_cast<double>(g.count);
    AggregateRow row;
    row.group = label;
    row.count = g.count;
    row.trace = g.trace / n;
    row.semantic = g.semantic / n;
    row.timing = g.timing / n;
    row.start = g.start / n;
    row.end = g.end / n;
    row.overlap = g.overlap / n;
    row.f1 = g.f1 / n;
    if (auto b = base.find(label); b != base.end() && b->second.count > 0) {
      const auto bn = static_cast<double>(b->second.count);
      row.d_trace = row.trace - b->second.trace / bn;
      row.d_semantic = row.semantic - b->second.semantic / bn;
      row.d_timing = row.timing - b->second.timing / bn;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         bool with_deltas, Scale scale) {
  const double factor = scale == Scale::kPercent ? 100.0 : 1.0;
  const int digits = scale == Scale::kPercent ? 1 : 3;
  auto num = [&](double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v * factor;
    std::string s = os.str();
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
    return s;
  };
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  out << "group,count,trace,semantic,timing,start,end,overlap,f1";
  if (with_deltas) out << ",d_trace,d_semantic,d_timing";
  out << '\n';
  for (const auto& r : rows) {
    out << quote(r.group) << ',' << r.count << ',' << num(r.trace) << ',' << num(r.semantic) << ','
        << num(r.timing) << ',' << num(r.start) << ',' << num(r.end) << ',' << num(r.overlap)
        << ',' << num(r.f1);
    if (with_deltas) {
      auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
      out << ',' << opt(r.d_trace) << ',' << opt(r.d_semantic) << ',' << opt(r.d_timing);
    }
    out << '\n';
  }
}

}  // namespace tglg
