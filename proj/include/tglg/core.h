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

// Domain data model shared by alignment, scoring, the evaluation harness and
// the decoding simulator. All times are seconds in double precision.

#ifndef TGLG_CORE_H_
#define TGLG_CORE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tglg {

inline constexpr const char* kModelRole = "model";

// One timestamped span of speech. Per-token timestamps are not retained;
// text is stored joined together with its token count.
struct Utterance {
  std::string role;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::optional<int> token_count;
  std::vector<std::string> dialogue_acts;

  bool operator==(const Utterance&) const = default;
};

struct InteractionHistory {
  std::string id;
  std::vector<Utterance> utterances;
  std::map<std::string, std::string> metadata;

  bool operator==(const InteractionHistory&) const = default;
};

// Positions into the parent history's utterance list.
struct EvaluationCluster {
  std::vector<std::size_t> indices;
  double window_s = 5.0;

  bool operator==(const EvaluationCluster&) const = default;
};

// One evaluation datapoint: everything before the cluster is context, the
// cluster members are the reference utterances. Video frames are represented
// only by the timeline bounds and the frame rate.
struct EvaluationInstance {
  std::string id;
  std::map<std::string, std::string> metadata;
  std::vector<Utterance> context_utterances;
  std::vector<Utterance> target_utterances;
  double timeline_start_s = 0.0;
  double context_end_s = 0.0;
  double eval_end_s = 0.0;
  double frame_rate_fps = 2.0;

  // Frame timestamps in [timeline_start_s, eval_end_s] at 1/fps spacing.
  std::vector<double> frame_times() const;
};

struct GeneratedStream {
  std::vector<Utterance> utterances;
  bool end_time_estimated = false;

  bool operator==(const GeneratedStream&) const = default;
};

struct TraceParams {
  double tau_time = 3.0;
  double tau_win = 5.0;
  double tau_pen = 1.0;
  double alpha_start = 0.4;
  double alpha_end = 0.4;
  double alpha = 0.5;
  int max_refine_passes = 10;

  // Throws ParameterError naming the first broken constraint.
  void validate() const;

  bool operator==(const TraceParams&) const = default;
};

// Per-pair components are un-scaled by F1.
struct PairDetail {
  std::size_t gt_index = 0;
  std::size_t gen_index = 0;
  double similarity = 0.0;
  double start = 0.0;
  double end = 0.0;

  bool operator==(const PairDetail&) const = default;
};

// Aggregates carry the F1 factor. All scores lie in [0, 1].
struct TraceReport {
  double trace = 0.0;
  double semantic = 0.0;
  double timing = 0.0;
  double start = 0.0;
  double end = 0.0;
  double overlap = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<PairDetail> pair_details;
  std::size_t n_ground_truth = 0;
  std::size_t n_generated = 0;
  std::size_t n_matched = 0;

  bool operator==(const TraceReport&) const = default;
};

// Orders by start, then end; equal keys keep insertion order.
void sort_utterances(std::vector<Utterance>& utterances);

// Invariant violations as human-readable strings; empty when the history is
// valid. Never throws.
std::vector<std::string> validate_history(const InteractionHistory& history);

// Invariant violations of a single utterance, prefixed with its position.
std::vector<std::string> validate_utterance(const Utterance& utterance,
                                            std::size_t index);

}  // namespace tglg

#endif  // TGLG_CORE_H_
