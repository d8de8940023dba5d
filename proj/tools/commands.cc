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

#include "commands.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "tglg/embed.h"
#include "tglg/errors.h"
#include "tglg/io.h"
#include "tglg/score.h"
#include "tglg/sim.h"

namespace tglg::cli {
namespace {

namespace fs = std::filesystem;

void require_input(const std::string& path, const char* what) {
  std::error_code ec;
  if (path.empty()) throw ParameterError(std::string(what) + " path is empty");
  if (!fs::is_regular_file(path, ec)) {
    throw ParameterError(std::string(what) + " '" + path + "' is not a readable file");
  }
  std::ifstream probe(path);
  if (!probe) throw ParameterError(std::string(what) + " '" + path + "' cannot be opened");
}

void require_output(const std::string& path, const char* what) {
  if (path.empty()) throw ParameterError(std::string(what) + " path is empty");
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) {
    throw ParameterError(std::string(what) + " directory '" + parent.string() + "' does not exist");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParameterError("cannot write '" + path + "'");
  return out;
}

// Maps toolkit errors to exit codes. ProtocolError means a bad sidecar reply
// when an embedder is involved and a bad script otherwise.
template <typename Fn>
int guarded(std::ostream& err, bool protocol_is_transport, Fn&& fn) {
  try {
    return fn();
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TransportError& e) {
    err << "error: embedding service: " << e.what() << '\n';
    return kExitTransport;
  } catch (const ProtocolError& e) {
    if (protocol_is_transport) {
      err << "error: embedding service: " << e.what() << '\n';
      return kExitTransport;
    }
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  std::string s = os.str();
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_summary(std::ostream& out, const std::vector<TraceReport>& reports, Scale scale) {
  constexpr int kColumns = 7;
  const char* names[kColumns] = {"TRACE", "S^a", "S^t", "S^start", "S^end", "S^overlap", "F1"};
  double sums[kColumns] = {};
  for (const auto& r : reports) {
    const double v[kColumns] = {r.trace, r.semantic, r.timing, r.start, r.end, r.overlap, r.f1};
    for (int c = 0; c < kColumns; ++c) sums[c] += v[c];
  }
  const double factor = scale == Scale::kPercent ? 100.0 : 1.0;
  const int digits = scale == Scale::kPercent ? 1 : 3;
  const double n = reports.empty() ? 1.0 : static_cast<double>(reports.size());

  out << std::left << std::setw(10) << "instances";
  for (const char* name : names) out << std::right << std::setw(10) << name;
  out << '\n' << std::left << std::setw(10) << reports.size();
  for (double s : sums) out << std::right << std::setw(10) << fixed(s / n * factor, digits);
  out << '\n';
}

std::string resolve_endpoint(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kEndpointEnv)) return env;
  return {};
}

}  // namespace

TraceParams resolve_params(const CommonOptions& o) {
  TraceParams p;
  if (o.params_path) {
    require_input(*o.params_path, "params file");
    std::ifstream in(*o.params_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ParameterError("params file '" + *o.params_path + "': " + e.what());
    }
    try {
      p = params_from_json(j, p);
    } catch (const ParseError& e) {
      throw ParameterError("params file '" + *o.params_path + "': " + e.what());
    }
  }
  if (o.alpha) p.alpha = *o.alpha;
  if (o.alpha_start) p.alpha_start = *o.alpha_start;
  if (o.alpha_end) p.alpha_end = *o.alpha_end;
  if (o.tau_time) p.tau_time = *o.tau_time;
  if (o.tau_win) p.tau_win = *o.tau_win;
  if (o.tau_pen) p.tau_pen = *o.tau_pen;
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// evaluate

int run_evaluate(const EvaluateOptions& o, const CommonOptions& common, std::ostream& out,
                 std::ostream& err) {
  const std::string endpoint = resolve_endpoint(common.embed_endpoint);
  return guarded(err, !endpoint.empty(), [&] {
    const TraceParams params = resolve_params(common);
    if (common.jobs < 1) throw ParameterError("--jobs must be >= 1");
    if (!(o.window_s > 0.0)) throw ParameterError("--window must be > 0");
    require_input(o.gt_path, "ground-truth file");
    require_input(o.gen_path, "generated file");
    require_output(o.out_path, "report file");

    HistoryLoad gt = load_histories(o.gt_path);
    for (const auto& w : gt.warnings) err << "warning: " << w << '\n';
    const GeneratedLoad gen = load_generated(o.gen_path);

    std::vector<EvaluationInstance> instances;
    for (const auto& h : gt.histories) {
      if (o.target_roles.empty()) {
        instances.push_back(whole_history_instance(h));
      } else {
        auto part = build_instances(h, role_is(o.target_roles), o.window_s);
        std::move(part.begin(), part.end(), std::back_inserter(instances));
      }
    }
    std::sort(instances.begin(), instances.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < instances.size(); ++i) {
      if (instances[i].id == instances[i - 1].id) {
        throw ParseError("duplicate instance id '" + instances[i].id + "' in ground truth");
      }
    }

    const GeneratedStream silent;
    std::set<std::string> known;
    std::vector<EvaluationJob> jobs;
    std::size_t matched = 0;
    for (const auto& inst : instances) {
      known.insert(inst.id);
      auto it = gen.streams.find(inst.id);
      if (it == gen.streams.end()) {
        err << "warning: no generated record for '" << inst.id << "', scored as silent\n";
        jobs.push_back({&inst.target_utterances, &silent.utterances});
      } else {
        ++matched;
        jobs.push_back({&inst.target_utterances, &it->second.utterances});
      }
    }
    for (const auto& [id, stream] : gen.streams) {
      if (!known.count(id)) err << "warning: generated record '" << id << "' has no instance, skipped\n";
    }
    if (!gen.streams.empty() && matched == 0) {
      throw ParseError("no generated record matches a ground-truth instance");
    }

    auto embedder = make_provider(endpoint);
    const std::vector<TraceReport> reports =
        common.jobs == 1 ? evaluate_batch_serial(jobs, params, *embedder)
                         : evaluate_batch_omp(jobs, params, *embedder, common.jobs);

    std::ofstream file = open_output(o.out_path);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      file << dump_line(report_record_to_json(
                  {instances[i].id, instances[i].metadata, params, reports[i]}))
           << '\n';
    }
    file.close();
    if (!file) throw ParameterError("failed writing '" + o.out_path + "'");

    write_summary(out, reports, common.scale);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, false, [&] {
    SimConfig config;
    config.frame_rate_fps = o.fps;
    config.token_rate_tps = o.token_rate_tps;
    config.duration_s = o.duration_s;
    config.eos_threshold = o.eos_threshold;
    config.validate();
    if (o.instance_id.empty()) throw ParameterError("--instance-id must not be empty");
    require_input(o.frames_path, "frame script");
    require_input(o.policy_path, "policy script");
    require_output(o.out_prefix + ".tsi.gen.jsonl", "output");

    std::vector<FrameEvent> frames;
    std::vector<ScriptRule> rules;
    try {
      frames = load_frames(o.frames_path);
    } catch (const ParseError& e) {
      throw ParseError("frame script '" + o.frames_path + "': " + e.what());
    }
    try {
      rules = load_rules(o.policy_path);
    } catch (const ParseError& e) {
      throw ParseError("policy script '" + o.policy_path + "': " + e.what());
    }
    ScriptedPolicy policy(std::move(rules));

    auto emit = [&](const char* mode, const SimTimeline& tl) {
      std::ofstream gen = open_output(o.out_prefix + "." + mode + ".gen.jsonl");
      if (!tl.stream.utterances.empty()) {
        gen << dump_line(generated_to_json(to_generated_record(tl, o.instance_id))) << '\n';
      }
      std::ofstream events = open_output(o.out_prefix + "." + mode + ".events.jsonl");
      for (const auto& e : tl.events) events << dump_line(event_to_json(e)) << '\n';
      out << mode << ": " << tl.stream.utterances.size() << " utterances, " << tl.events.size()
          << " events\n";
    };
    if (o.mode != SimMode::kTurn) emit("tsi", run_tsi(policy, frames, config));
    if (o.mode != SimMode::kTsi) emit("turn", run_turn_based(policy, frames, config));
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// aggregate

std::vector<ScoredInstance> load_reports(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<ScoredInstance> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ReportRecord rec = report_record_from_json(json::parse(line));
      out.push_back({std::move(rec.instance_id), std::move(rec.metadata), std::move(rec.report)});
    } catch (const json::exception& e) {
      throw ParseError(path + ": " + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what(), line_no);
    }
  }
  return out;
}

int run_aggregate(const AggregateOptions& o, const CommonOptions& common, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, false, [&] {
    if (o.report_paths.empty() || o.report_paths.size() > 2) {
      throw ParameterError("aggregate takes one or two report files");
    }
    for (const auto& p : o.report_paths) require_input(p, "report file");
    const bool builtin = o.category_map == "soccernet" || o.category_map == "holoassist";
    if (!builtin) require_input(o.category_map, "category map");
    if (!o.out_path.empty()) require_output(o.out_path, "CSV file");

    CategoryMap map = o.category_map == "soccernet"    ? soccernet_categories()
                      : o.category_map == "holoassist" ? holoassist_categories()
                                                       : load_category_map(o.category_map);
    const auto model = load_reports(o.report_paths[0]);
    std::optional<std::vector<ScoredInstance>> baseline;
    if (o.report_paths.size() == 2) baseline = load_reports(o.report_paths[1]);

    const AggregateResult result = aggregate(model, map, baseline ? &*baseline : nullptr);
    for (const auto& w : result.warnings) err << "warning: " << w << ", routed to "
                                              << kUncategorized << '\n';
    if (o.out_path.empty()) {
      write_aggregate_csv(out, result.rows, baseline.has_value(), common.scale);
    } else {
      std::ofstream file = open_output(o.out_path);
      write_aggregate_csv(file, result.rows, baseline.has_value(), common.scale);
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// stats

int run_stats(const StatsOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, false, [&] {
    require_input(o.history_path, "history file");
    const HistoryLoad load = load_histories(o.history_path);
    for (const auto& w : load.warnings) err << "warning: " << w << '\n';
    if (load.skipped > 0) err << "warning: " << load.skipped << " invalid records skipped\n";
    const DatasetStats s =
        dataset_stats(load.histories, o.roles.empty() ? any_role() : role_is(o.roles));
    out << "size,avg_utterances,avg_tokens,avg_gap_s,skipped\n"
        << s.size << ',' << fixed(s.avg_utterances, 2) << ',' << fixed(s.avg_tokens, 2) << ','
        << (s.avg_gap_s ? fixed(*s.avg_gap_s, 2) : std::string()) << ',' << load.skipped << '\n';
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// argument parsing

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-aligned scoring and streaming simulation for live dialogue generation",
               "tglg"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string scale = "percent";
  auto add_common = [&](CLI::App* sub, bool scoring) {
    sub->add_option("--scale", scale, "Score rendering")
        ->check(CLI::IsMember({"unit", "percent"}));
    if (!scoring) return;
    sub->add_option("--params", common.params_path, "JSON file with metric parameters");
    sub->add_option("--alpha", common.alpha, "Semantic weight");
    sub->add_option("--alpha-start", common.alpha_start, "Start-boundary weight");
    sub->add_option("--alpha-end", common.alpha_end, "End-boundary weight");
    sub->add_option("--tau-time", common.tau_time, "Assignment temperature (s)");
    sub->add_option("--tau-win", common.tau_win, "Matching window (s)");
    sub->add_option("--tau-pen", common.tau_pen, "Boundary/overlap penalty scale (s)");
    sub->add_option("--embed-endpoint", common.embed_endpoint, "Embedding service base URL")
        ->envname(kEndpointEnv);
    sub->add_option("--jobs", common.jobs, "Parallel evaluation threads")
        ->check(CLI::PositiveNumber);
  };

  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "Score generated streams against ground truth");
  evaluate->add_option("--gt", eval.gt_path, "Ground-truth history JSONL")->required();
  evaluate->add_option("--gen", eval.gen_path, "Generated stream JSONL")->required();
  evaluate->add_option("--out", eval.out_path, "Report JSONL to write")->required();
  evaluate->add_option("--target-role", eval.target_roles,
                       "Build clustered instances over these roles");
  evaluate->add_option("--window", eval.window_s, "Cluster window (s)");
  add_common(evaluate, true);

  SimulateOptions sim;
  std::string mode = "both";
  auto* simulate = app.add_subcommand("simulate", "Run scripted policies through both decoders");
  simulate->add_option("--frames", sim.frames_path, "Frame script JSON")->required();
  simulate->add_option("--policy", sim.policy_path, "Policy script JSON")->required();
  simulate->add_option("--out", sim.out_prefix, "Output path prefix")->required();
  simulate->add_option("--mode", mode, "tsi, turn or both")
      ->check(CLI::IsMember({"tsi", "turn", "both"}));
  simulate->add_option("--token-rate", sim.token_rate_tps, "Decode slots per second");
  simulate->add_option("--duration", sim.duration_s, "Simulated seconds");
  simulate->add_option("--eos-threshold", sim.eos_threshold, "Turn-based speak threshold");
  simulate->add_option("--fps", sim.fps, "Frame rate");
  simulate->add_option("--instance-id", sim.instance_id, "Instance id of the generated record");

  AggregateOptions agg;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Per-category means and deltas");
  aggregate_cmd->add_option("reports", agg.report_paths, "Model report, then optional baseline")
      ->required()
      ->expected(1, 2);
  aggregate_cmd->add_option("--category-map", agg.category_map,
                            "soccernet, holoassist or a JSON file");
  aggregate_cmd->add_option("--out", agg.out_path, "CSV file (default: standard output)");
  add_common(aggregate_cmd, false);

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics");
  stats_cmd->add_option("history", stats.history_path, "History JSONL")->required();
  stats_cmd->add_option("--role", stats.roles, "Count only these roles");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // argv[0]
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  common.scale = scale == "unit" ? Scale::kUnit : Scale::kPercent;
  if (*evaluate) return run_evaluate(eval, common, out, err);
  if (*simulate) {
    sim.mode = mode == "tsi" ? SimMode::kTsi : mode == "turn" ? SimMode::kTurn : SimMode::kBoth;
    return run_simulate(sim, out, err);
  }
  if (*aggregate_cmd) return run_aggregate(agg, common, out, err);
  return run_stats(stats, out, err);
}

}  // namespace tglg::cli
