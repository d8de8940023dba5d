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

// TRACE components. Aggregates are F1-scaled means; per-pair and
// per-utterance components are reported un-scaled.
//
//   S^a       = F1 / |B| * sum_B S_ij
//   S^start   = F1 / |B| * sum_B exp(-|s_i - s^_j| / tau_pen)
//   S^end     = F1 / |B| * sum_B exp(-|e_i - e^_j| / tau_pen)
//   S^overlap = F1 / M   * sum_j exp(-O_j / tau_pen)
//   S^t       = a_start S^start + a_end S^end + (1 - a_start - a_end) S^overlap
//   TRACE     = a S^a + (1 - a) S^t

#ifndef TGLG_SCORE_H_
#define TGLG_SCORE_H_

#include <cstddef>
#include <vector>

#include "tglg/align.h"
#include "tglg/core.h"
#include "tglg/embed.h"

namespace tglg {

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Both sets empty counts as a perfect (silent) match: (1, 1, 1).
F1Score generation_f1(std::size_t n_matched, std::size_t n_gt, std::size_t n_gen);

struct SemanticScore {
  double aggregate = 0.0;
  std::vector<double> per_pair;  // in match order
};

SemanticScore semantic_score(const MatchSet& matches, const SimilarityMatrix& sim, double f1);

struct BoundaryScores {
  double start = 0.0;
  double end = 0.0;
  std::vector<double> per_pair_start;
  std::vector<double> per_pair_end;
};

// Throws ParameterError when a matched utterance has a non-finite time; end
// times must be estimated upstream.
BoundaryScores boundary_scores(const MatchSet& matches, const std::vector<Utterance>& gt,
                               const std::vector<Utterance>& gen, double tau_pen, double f1);

struct OverlapEntry {
  std::size_t gen_index = 0;
  double total_overlap_s = 0.0;  // O_j
  double component = 1.0;        // exp(-O_j / tau_pen)
};

struct OverlapProfile {
  std::vector<OverlapEntry> per_generated;
};

struct OverlapScore {
  double aggregate = 0.0;
  OverlapProfile profile;
};

OverlapScore overlap_score(const std::vector<Utterance>& gen, double tau_pen, double f1);

double timing_score(double s_start, double s_end, double s_overlap, const TraceParams& params);

double trace_score(double s_a, double s_t, double alpha);

// Report for the both-empty case: every component 1.
TraceReport silent_match_report();

// Align, then every component. Deterministic for a deterministic provider.
TraceReport evaluate_pair(const std::vector<Utterance>& gt, const std::vector<Utterance>& gen,
                          const TraceParams& params, EmbeddingProvider& embedder);

// Scores an already-computed alignment.
TraceReport score_alignment(const std::vector<Utterance>& gt, const std::vector<Utterance>& gen,
                            const AlignResult& alignment, const TraceParams& params);

}  // namespace tglg

#endif  // TGLG_SCORE_H_
