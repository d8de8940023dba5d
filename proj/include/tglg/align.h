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

// Matching between ground-truth and generated utterances:
//
//   1. temporal assignment on cost -exp(-|s_i - s^_j| / tau_time),
//   2. semantic swap refinement restricted to a tau_win neighbourhood,
//   3. pruning of pairs whose starts differ by more than tau_win.

#ifndef TGLG_ALIGN_H_
#define TGLG_ALIGN_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tglg/assignment.h"
#include "tglg/core.h"
#include "tglg/embed.h"
#include "tglg/matrix.h"

namespace tglg {

// N x M, entries in [-1, 0).
struct CostMatrix {
  Matrix values;
};

// N x M, entries in [0, 1].
struct SimilarityMatrix {
  Matrix values;
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

// One-to-one (gt_index, gen_index) pairs, kept sorted by gt index.
struct MatchSet {
  std::vector<IndexPair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  bool operator==(const MatchSet&) const = default;
};

// True when no index repeats on either side.
bool is_one_to_one(const MatchSet& matches);

CostMatrix build_cost_matrix(std::span<const double> gt_starts,
                             std::span<const double> gen_starts, double tau_time);

MatchSet solve_assignment(const CostMatrix& cost);

// Embeds both sides (one provider call per side) and fills
// S_ij = (1 + cos) / 2. Provider failures are rethrown with the batch named.
SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& gt_texts,
                                         const std::vector<std::string>& gen_texts,
                                         EmbeddingProvider& embedder);

struct RefineOutcome {
  MatchSet matches;
  int passes = 0;  // passes executed, <= max_passes
  int swaps = 0;
  bool converged = false;  // last pass made no swap
};

// First-improvement hill climbing over pairs of matches. Each pass scans
// match positions (a, b), a < b, in gt-index order and swaps
// (i, j), (i', j') -> (i, j'), (i', j) as soon as
//   S_ij + S_i'j' < S_ij' + S_i'j
// and the four start times span at most tau_win. Stops after a pass without
// swaps or after max_passes.
RefineOutcome refine_matching_traced(const MatchSet& matches, const SimilarityMatrix& sim,
                                     std::span<const double> gt_starts,
                                     std::span<const double> gen_starts, double tau_win,
                                     int max_passes);

MatchSet refine_matching(const MatchSet& matches, const SimilarityMatrix& sim,
                         std::span<const double> gt_starts, std::span<const double> gen_starts,
                         double tau_win, int max_passes);

// Keeps pairs with |s_i - s^_j| <= tau_win (boundary inclusive).
MatchSet prune_matching(const MatchSet& matches, std::span<const double> gt_starts,
                        std::span<const double> gen_starts, double tau_win);

struct AlignResult {
  MatchSet matches;
  SimilarityMatrix similarity;
};

AlignResult align(const std::vector<Utterance>& gt, const std::vector<Utterance>& gen,
                  const TraceParams& params, EmbeddingProvider& embedder);

std::vector<double> start_times(const std::vector<Utterance>& utterances);

}  // namespace tglg

#endif  // TGLG_ALIGN_H_
