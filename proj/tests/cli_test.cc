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

// Subcommands run in-process through run_main; a few cases spawn the built
// binary to cover argv handling, the environment and real exit statuses.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <httplib.h>

#include "commands.h"
#include "test_util.h"
#include "tglg/io.h"

namespace tglg {
namespace {

namespace fs = std::filesystem;
using testing::fixture;
using testing::read_file;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tglg");
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run_main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("tglg_cli_" + std::string(info->name()) + "_" +
                                        std::to_string(::getpid()));
    fs::create_directories(dir_);
    ::unsetenv(cli::kEndpointEnv);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CliResult evaluate(const std::string& gen, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"evaluate", "--gt", fixture("cli/gt.jsonl"), "--gen", gen,
                                     "--out", path("report.jsonl")};
    args.insert(args.end(), extra.begin(), extra.end());
    return cli(args);
  }

  fs::path dir_;
};

std::vector<std::string> summary_values(const std::string& out) {
  std::istringstream in(out);
  std::string header, row, cell;
  std::getline(in, header);
  std::getline(in, row);
  std::istringstream cells(row);
  std::vector<std::string> v;
  while (cells >> cell) v.push_back(cell);
  return v;
}

TEST_F(CliTest, EvaluateReportIsByteIdenticalToGolden) {
  const CliResult r = evaluate(fixture("cli/gen.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(path("report.jsonl")), read_file(fixture("cli/golden_report.jsonl")));
  EXPECT_EQ(summary_values(r.out),
            (std::vector<std::string>{"4", "55.1", "58.0", "52.3", "51.3", "44.4", "70.0", "70.0"}));
  EXPECT_NE(r.err.find("scored as silent"), std::string::npos);
  EXPECT_NE(r.err.find("has no instance, skipped"), std::string::npos);
}

TEST_F(CliTest, GoldenAgreesWithIndependentOracle) {
  const auto oracle = testing::load_oracle_csv(fixture("cli/oracle.csv"));
  std::istringstream in(read_file(fixture("cli/golden_report.jsonl")));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto rec = report_record_from_json(json::parse(line));
    ASSERT_EQ(oracle.count(rec.instance_id), 1u) << rec.instance_id;
    EXPECT_LE(testing::max_field_error(testing::report_fields(rec.report), oracle.at(rec.instance_id)),
              1e-9)
        << rec.instance_id;
    EXPECT_EQ(rec.params, TraceParams{});
    ++n;
  }
  EXPECT_EQ(n, oracle.size());
}

TEST_F(CliTest, IdenticalGenerationScoresOneHundred) {
  const CliResult r = evaluate(fixture("cli/identical_gen.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = summary_values(r.out);
  ASSERT_EQ(v.size(), 8u);
  for (std::size_t k = 1; k < v.size(); ++k) EXPECT_EQ(v[k], "100.0") << k;
}

TEST_F(CliTest, EmptyGenerationScoresZero) {
  const CliResult r = evaluate(fixture("cli/empty.jsonl"), {"--scale", "unit"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = summary_values(r.out);
  ASSERT_EQ(v.size(), 8u);
  for (std::size_t k = 1; k < v.size(); ++k) EXPECT_EQ(v[k], "0.000") << k;
}

TEST_F(CliTest, JobsDoNotChangeTheReport) {
  ASSERT_EQ(evaluate(fixture("cli/gen.jsonl")).code, 0);
  const std::string one = read_file(path("report.jsonl"));
  ASSERT_EQ(evaluate(fixture("cli/gen.jsonl"), {"--jobs", "4"}).code, 0);
  EXPECT_EQ(read_file(path("report.jsonl")), one);
}

TEST_F(CliTest, ParamsAreEchoedAndOverridable) {
  ASSERT_EQ(evaluate(fixture("cli/gen.jsonl"), {"--alpha", "0.25", "--tau-pen", "2"}).code, 0);
  std::istringstream in(read_file(path("report.jsonl")));
  std::string line;
  std::getline(in, line);
  const auto rec = report_record_from_json(json::parse(line));
  EXPECT_EQ(rec.params.alpha, 0.25);
  EXPECT_EQ(rec.params.tau_pen, 2.0);
  EXPECT_NEAR(rec.report.trace, 0.25 * rec.report.semantic + 0.75 * rec.report.timing, 1e-12);
}

TEST_F(CliTest, ParamsFileAndFlagsCombine) {
  {
    std::ofstream f(path("params.json"));
    f << R"({"alpha": 0.9, "tau_win": 2.0})";
  }
  ASSERT_EQ(evaluate(fixture("cli/gen.jsonl"), {"--params", path("params.json"), "--alpha", "0.1"}).code, 0);
  std::istringstream in(read_file(path("report.jsonl")));
  std::string line;
  std::getline(in, line);
  const auto rec = report_record_from_json(json::parse(line));
  EXPECT_EQ(rec.params.alpha, 0.1);
  EXPECT_EQ(rec.params.tau_win, 2.0);
}

TEST_F(CliTest, ClusteredInstancesUseSuffixedIds) {
  {
    std::ofstream f(path("gen.jsonl"));
    f << R"({"instance_id": "match-a#0", "utterances": []})" << '\n';
  }
  const CliResult r = evaluate(path("gen.jsonl"), {"--target-role", "model"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read_file(path("report.jsonl")).find("\"match-a#0\""), std::string::npos);
}

TEST_F(CliTest, EvaluateExitCodes) {
  EXPECT_EQ(evaluate("/nonexistent/gen.jsonl").code, cli::kExitUsage);
  EXPECT_EQ(evaluate(fixture("cli/gen.jsonl"), {"--alpha", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(evaluate(fixture("cli/gen.jsonl"), {"--jobs", "0"}).code, cli::kExitUsage);

  {
    std::ofstream f(path("broken.jsonl"));
    f << "{\"instance_id\": \"match-a\", \"utterances\": []}\n{oops\n";
  }
  const CliResult bad = evaluate(path("broken.jsonl"));
  EXPECT_EQ(bad.code, cli::kExitData);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos) << bad.err;

  {
    std::ofstream f(path("orphans.jsonl"));
    f << R"({"instance_id": "nobody", "utterances": []})" << '\n';
  }
  EXPECT_EQ(evaluate(path("orphans.jsonl")).code, cli::kExitData);

  const testing::RefusingPort refusing;
  const int port = refusing.port();
  const CliResult dead = evaluate(fixture("cli/gen.jsonl"),
                            {"--embed-endpoint", "http://127.0.0.1:" + std::to_string(port)});
  EXPECT_EQ(dead.code, cli::kExitTransport) << dead.err;
}

TEST_F(CliTest, SimulateBothWritesPairedOutputs) {
  const CliResult r = cli({"simulate", "--frames", fixture("yellow_blue/frames.json"), "--policy",
                     fixture("yellow_blue/policy.json"), "--out", path("fig"), "--token-rate", "4",
                     "--duration", "6", "--instance-id", "yellow_blue"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* mode : {"tsi", "turn"}) {
    EXPECT_TRUE(fs::exists(path(std::string("fig.") + mode + ".gen.jsonl")));
    EXPECT_TRUE(fs::exists(path(std::string("fig.") + mode + ".events.jsonl")));
  }
  EXPECT_NE(r.out.find("tsi: 2 utterances"), std::string::npos) << r.out;
  EXPECT_NE(read_file(path("fig.turn.events.jsonl")).find("frame-queued"), std::string::npos);

  auto score = [&](const std::string& gen) {
    const CliResult e = cli({"evaluate", "--gt", fixture("yellow_blue/reference.jsonl"), "--gen", gen, "--out",
                       path("r.jsonl"), "--scale", "unit"});
    EXPECT_EQ(e.code, 0) << e.err;
    std::istringstream in(read_file(path("r.jsonl")));
    std::string line;
    std::getline(in, line);
    return report_record_from_json(json::parse(line)).report;
  };
  const TraceReport tsi = score(path("fig.tsi.gen.jsonl"));
  const TraceReport turn = score(path("fig.turn.gen.jsonl"));
  EXPECT_GE(tsi.start, turn.start);
  EXPECT_GE(tsi.overlap, turn.overlap);
}

TEST_F(CliTest, SimulateZeroDurationAndBadInputs) {
  const CliResult zero = cli({"simulate", "--frames", fixture("yellow_blue/frames.json"), "--policy",
                        fixture("yellow_blue/policy.json"), "--out", path("z"), "--mode", "tsi",
                        "--duration", "0"});
  ASSERT_EQ(zero.code, 0) << zero.err;
  EXPECT_EQ(read_file(path("z.tsi.gen.jsonl")), "");
  EXPECT_EQ(read_file(path("z.tsi.events.jsonl")), "");
  EXPECT_FALSE(fs::exists(path("z.turn.gen.jsonl")));

  EXPECT_EQ(cli({"simulate", "--frames", fixture("yellow_blue/frames.json"), "--policy",
                 fixture("yellow_blue/policy.json"), "--out", path("m"), "--mode", "sideways"})
                .code,
            cli::kExitUsage);

  {
    std::ofstream f(path("frames.json"));
    f << "[{\"time\": 1.0, \"label\": \"a\"},\n {\"time\": }]";
  }
  const CliResult bad = cli({"simulate", "--frames", path("frames.json"), "--policy",
                       fixture("yellow_blue/policy.json"), "--out", path("b")});
  EXPECT_EQ(bad.code, cli::kExitData);
  EXPECT_NE(bad.err.find("byte"), std::string::npos) << bad.err;
}

TEST_F(CliTest, AggregateMatchesHandComputedTables) {
  const std::string model = fixture("aggregate/model.jsonl");
  const std::string base = fixture("aggregate/baseline.jsonl");
  CliResult r = cli({"aggregate", model, base, "--scale", "unit"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(fixture("aggregate/expected_deltas_unit.csv")));

  r = cli({"aggregate", model});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(fixture("aggregate/expected_means_percent.csv")));

  r = cli({"aggregate", model, "--category-map", fixture("aggregate/map.json"), "--scale", "unit",
           "--out", path("agg.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(path("agg.csv")), read_file(fixture("aggregate/expected_custom_unit.csv")));
}

TEST_F(CliTest, AggregateWarnsOnUncategorized) {
  const CliResult r = cli({"aggregate", fixture("aggregate/model.jsonl"), "--category-map", "holoassist"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("routed to uncategorized"), std::string::npos);
  EXPECT_NE(r.out.find("uncategorized,"), std::string::npos);
  EXPECT_EQ(cli({"aggregate", "/nonexistent.jsonl"}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"aggregate", fixture("aggregate/model.jsonl"), "--category-map", "/nope.json"}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, StatsOnFixtureAndEmptyFile) {
  CliResult r = cli({"stats", fixture("stats/history.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "size,avg_utterances,avg_tokens,avg_gap_s,skipped\n2,2.00,2.50,2.50,1\n");
  EXPECT_NE(r.err.find("1 invalid records skipped"), std::string::npos);

  r = cli({"stats", fixture("cli/empty.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "size,avg_utterances,avg_tokens,avg_gap_s,skipped\n0,0.00,0.00,,0\n");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"evaluate", "--gt", "x"}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, cli::kExitOk);
}

int spawn(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(TGLG_CLI_PATH) + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, BinaryExitStatuses) {
  EXPECT_EQ(spawn("--help"), 0);
  EXPECT_EQ(spawn("simulate --frames x --policy y --out z --mode nope"), 1);
  EXPECT_EQ(spawn("stats '" + fixture("stats/history.jsonl") + "'"), 0);
  EXPECT_EQ(spawn("evaluate --gt '" + fixture("cli/gt.jsonl") + "' --gen '" +
                  fixture("cli/gen.jsonl") + "' --out '" + path("r.jsonl") + "'"),
            0);
  EXPECT_EQ(read_file(path("r.jsonl")), read_file(fixture("cli/golden_report.jsonl")));

  const testing::RefusingPort refusing;
  const int port = refusing.port();
  EXPECT_EQ(spawn("evaluate --gt '" + fixture("cli/gt.jsonl") + "' --gen '" +
                      fixture("cli/gen.jsonl") + "' --out '" + path("r.jsonl") + "'",
                  std::string(cli::kEndpointEnv) + "=http://127.0.0.1:" + std::to_string(port)),
            3);
}

}  // namespace
}  // namespace tglg
