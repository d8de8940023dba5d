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

// Evaluation harness: ingestion, cluster extraction, instance construction,
// end-time estimation, dataset statistics and per-category aggregation.

#ifndef TGLG_HARNESS_H_
#define TGLG_HARNESS_H_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tglg/core.h"
#include "tglg/embed.h"
#include "tglg/io.h"

namespace tglg {

inline constexpr double kWordsPerSecond = 150.0 / 60.0;
inline constexpr double kTokensPerWord = 1.3;
inline constexpr double kDefaultClusterWindowS = 5.0;
inline constexpr double kDefaultFrameRateFps = 2.0;

// ---------------------------------------------------------------------------
// Ingestion

struct HistoryLoad {
  std::vector<InteractionHistory> histories;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Line-delimited history records. Blank lines are ignored. Malformed JSON or
// schema violations throw ParseError with the line number; records that
// parse but violate utterance invariants are skipped and counted. Loaded
// histories are sorted and missing token counts are filled in.
HistoryLoad parse_histories(std::istream& in);
HistoryLoad load_histories(const std::string& path);

struct GeneratedLoad {
  // Keyed by instance id; a repeated id throws ParseError.
  std::map<std::string, GeneratedStream> streams;
};

// Generated-stream records. A missing end time is filled in with
// estimate_end_time and marks the stream end_time_estimated.
GeneratedLoad parse_generated(std::istream& in);
GeneratedLoad load_generated(const std::string& path);

GeneratedStream to_stream(const GeneratedRecord& record);

// end = start + (tokens / 1.3 words-per-token) / 2.5 words-per-second.
double estimate_end_time(double start_s, int token_count);

// ceil(whitespace words * 1.3); 0 for blank text.
int estimate_token_count(const std::string& text);

// ---------------------------------------------------------------------------
// Clusters and instances

using TargetPredicate = std::function<bool(const Utterance&)>;

TargetPredicate any_role();
TargetPredicate role_is(std::vector<std::string> roles);
// Matches when any of the utterance's dialogue acts is listed.
TargetPredicate act_in(std::vector<std::string> acts);

// Greedy scan over the history: a target utterance joins the open cluster
// when the previous utterance in the history was also a member of it and the
// cluster's span stays within window_s; otherwise the open cluster is emitted
// and a new one starts. Any non-target utterance closes the open cluster.
// Every target utterance lands in exactly one cluster (a single utterance
// longer than window_s forms its own cluster).
std::vector<EvaluationCluster> extract_clusters(const InteractionHistory& history,
                                                const TargetPredicate& is_target,
                                                double window_s = kDefaultClusterWindowS);

// Throws StructuralError for empty clusters or out-of-range indices.
EvaluationInstance build_instance(const InteractionHistory& history,
                                  const EvaluationCluster& cluster,
                                  double fps = kDefaultFrameRateFps);

// All instances of one history; ids are "<history id>#<cluster ordinal>".
std::vector<EvaluationInstance> build_instances(const InteractionHistory& history,
                                                const TargetPredicate& is_target,
                                                double window_s = kDefaultClusterWindowS,
                                                double fps = kDefaultFrameRateFps);

// The whole history as a single instance with id = history id.
EvaluationInstance whole_history_instance(const InteractionHistory& history,
                                          double fps = kDefaultFrameRateFps);

// ---------------------------------------------------------------------------
// Statistics

struct DatasetStats {
  std::size_t size = 0;            // datapoints
  double avg_utterances = 0.0;     // per datapoint
  double avg_tokens = 0.0;         // per utterance
  std::optional<double> avg_gap_s; // start-to-start, absent without any pair
  std::size_t n_utterances = 0;
};

DatasetStats dataset_stats(const std::vector<InteractionHistory>& histories,
                           const TargetPredicate& counted = any_role());

// ---------------------------------------------------------------------------
// Categories and aggregation

inline constexpr const char* kCategoryKey = "category";
inline constexpr const char* kUncategorized = "uncategorized";

class CategoryMap {
 public:
  CategoryMap(std::string name,
              std::vector<std::pair<std::string, std::vector<std::string>>> groups);

  const std::string& name() const { return name_; }
  const auto& groups() const { return groups_; }

  // Group label for a raw key (ASCII case-insensitive), if any.
  std::optional<std::string> group_of(const std::string& raw_key) const;

 private:
  std::string name_;
  std::vector<std::pair<std::string, std::vector<std::string>>> groups_;
  std::map<std::string, std::string> lookup_;
};

// SoccerNet action groups.
CategoryMap soccernet_categories();
// HoloAssist task groups.
CategoryMap holoassist_categories();
// {"name": str, "groups": {label: [raw keys]}}; group order as listed.
CategoryMap load_category_map(const std::string& path);
CategoryMap category_map_from_json(const nlohmann::ordered_json& j);

struct ScoredInstance {
  std::string instance_id;
  std::map<std::string, std::string> metadata;
  TraceReport report;
};

struct AggregateRow {
  std::string group;
  std::size_t count = 0;
  double trace = 0.0;
  double semantic = 0.0;
  double timing = 0.0;
  double start = 0.0;
  double end = 0.0;
  double overlap = 0.0;
  double f1 = 0.0;
  // Model minus baseline group means; set when a baseline has the group.
  std::optional<double> d_trace;
  std::optional<double> d_semantic;
  std::optional<double> d_timing;
};

struct AggregateResult {
  std::vector<AggregateRow> rows;  // map order, uncategorized last
  std::vector<std::string> warnings;
};

AggregateResult aggregate(const std::vector<ScoredInstance>& reports, const CategoryMap& map,
                          const std::vector<ScoredInstance>* baseline = nullptr);

enum class Scale { kUnit, kPercent };

// Columns: group,count,trace,semantic,timing,start,end,overlap,f1 and, when
// with_deltas, d_trace,d_semantic,d_timing. Unit scale uses 3 decimals,
// percent scale 1.
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         bool with_deltas, Scale scale);

// ---------------------------------------------------------------------------
// Batch evaluation

struct EvaluationJob {
  const std::vector<Utterance>* ground_truth = nullptr;
  const std::vector<Utterance>* generated = nullptr;
};

// Scores each job; result i belongs to job i.
std::vector<TraceReport> evaluate_batch_serial(const std::vector<EvaluationJob>& jobs,
                                               const TraceParams& params,
                                               EmbeddingProvider& embedder);
// Same results, jobs spread over `threads` OpenMP threads. The first
// exception thrown by any job is rethrown after the loop.
std::vector<TraceReport> evaluate_batch_omp(const std::vector<EvaluationJob>& jobs,
                                            const TraceParams& params,
                                            EmbeddingProvider& embedder, int threads);

}  // namespace tglg

#endif  // TGLG_HARNESS_H_
