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

// Subcommands of the tglg command-line tool. Each run_* function returns a
// process exit code and writes only to the streams it is given.

#ifndef TGLG_TOOLS_COMMANDS_H_
#define TGLG_TOOLS_COMMANDS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tglg/core.h"
#include "tglg/harness.h"
#include "tglg/sim.h"

namespace tglg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitTransport = 3;

inline constexpr const char* kEndpointEnv = "TGLG_EMBED_ENDPOINT";

struct CommonOptions {
  std::optional<std::string> params_path;
  std::optional<double> alpha;
  std::optional<double> alpha_start;
  std::optional<double> alpha_end;
  std::optional<double> tau_time;
  std::optional<double> tau_win;
  std::optional<double> tau_pen;
  std::string embed_endpoint;  // empty: mock provider
  int jobs = 1;
  Scale scale = Scale::kPercent;
};

// Params file first, then flag overrides; validated. Throws ParameterError
// or ParseError.
TraceParams resolve_params(const CommonOptions& options);

struct EvaluateOptions {
  std::string gt_path;
  std::string gen_path;
  std::string out_path;
  // Empty: one instance per history covering every utterance. Otherwise
  // instances are the clusters of utterances with one of these roles.
  std::vector<std::string> target_roles;
  double window_s = kDefaultClusterWindowS;
};

int run_evaluate(const EvaluateOptions& options, const CommonOptions& common, std::ostream& out,
                 std::ostream& err);

enum class SimMode { kTsi, kTurn, kBoth };

struct SimulateOptions {
  std::string frames_path;
  std::string policy_path;
  std::string out_prefix;  // writes <prefix>.<mode>.gen.jsonl and .events.jsonl
  SimMode mode = SimMode::kBoth;
  double token_rate_tps = 2.0;
  double duration_s = 30.0;
  double eos_threshold = kEosThresholdPerceptual;
  double fps = kDefaultFrameRateFps;
  std::string instance_id = "sim";
};

int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

struct AggregateOptions {
  std::vector<std::string> report_paths;  // model, then optional baseline
  std::string category_map = "soccernet"; // soccernet | holoassist | <file>
  std::string out_path;                   // empty: CSV to `out`
};

int run_aggregate(const AggregateOptions& options, const CommonOptions& common, std::ostream& out,
                  std::ostream& err);

struct StatsOptions {
  std::string history_path;
  std::vector<std::string> roles;  // empty: every utterance counts
};

int run_stats(const StatsOptions& options, std::ostream& out, std::ostream& err);

// Loads a report JSONL file. Throws ParseError with line numbers.
std::vector<ScoredInstance> load_reports(const std::string& path);

// Parses argv (argv[0] included) and dispatches to a subcommand.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tglg::cli

#endif  // TGLG_TOOLS_COMMANDS_H_
