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

#include "tglg/align.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "tglg/errors.h"
#include "tglg/kernels.h"

namespace tglg {

bool is_one_to_one(const MatchSet& matches) {
  std::set<std::size_t> rows, cols;
  for (const auto& [i, j] : matches.pairs) {
    if (!rows.insert(i).second || !cols.insert(j).second) return false;
  }
  return true;
}

std::vector<double> start_times(const std::vector<Utterance>& utterances) {
  std::vector<double> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(u.start_s);
  return out;
}

CostMatrix build_cost_matrix(std::span<const double> gt_starts,
                             std::span<const double> gen_starts, double tau_time) {
  if (!(tau_time > 0.0)) throw ParameterError("tau_time must be > 0");
  CostMatrix cost;
  if (gt_starts.size() * gen_starts.size() >= kernels::kParallelThreshold) {
    kernels::cost_matrix_omp(gt_starts, gen_starts, tau_time, cost.values);
  } else {
    kernels::cost_matrix_serial(gt_starts, gen_starts, tau_time, cost.values);
  }
  return cost;
}

MatchSet solve_assignment(const CostMatrix& cost) {
  return MatchSet{solve_linear_assignment(cost.values)};
}

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& gt_texts,
                                         const std::vector<std::string>& gen_texts,
                                         EmbeddingProvider& embedder) {
  auto embed_side = [&](const std::vector<std::string>& texts, const char* side) {
    try {
      auto vs = embedder.embed(texts);
      if (vs.size() != texts.size()) {
        throw ProtocolError("provider returned " + std::to_string(vs.size()) + " vectors for " +
                            std::to_string(texts.size()) + " texts");
      }
      return vs;
    } catch (const TransportError& e) {
      throw TransportError(std::string(side) + " batch: " + e.what());
    } catch (const ProtocolError& e) {
      throw ProtocolError(std::string(side) + " batch: " + e.what());
    }
  };
  const auto a = embed_side(gt_texts, "ground-truth");
  const auto b = embed_side(gen_texts, "generated");
  SimilarityMatrix sim;
  if (a.size() * b.size() >= kernels::kParallelThreshold) {
    kernels::similarity_matrix_omp(a, b, sim.values);
  } else {
    kernels::similarity_matrix_serial(a, b, sim.values);
  }
  return sim;
}

RefineOutcome refine_matching_traced(const MatchSet& matches, const SimilarityMatrix& sim,
                                     std::span<const double> gt_starts,
                                     std::span<const double> gen_starts, double tau_win,
                                     int max_passes) {
  RefineOutcome out;
  out.matches = matches;
  auto& m = out.matches.pairs;
  std::sort(m.begin(), m.end());

  auto within_window = [&](std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) {
    const double t[4] = {gt_starts[i], gt_starts[i2], gen_starts[j], gen_starts[j2]};
    const auto [lo, hi] = std::minmax_element(std::begin(t), std::end(t));
    return *hi - *lo <= tau_win;
  };

  while (out.passes < max_passes) {
    ++out.passes;
    int swaps_this_pass = 0;
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = a + 1; b < m.size(); ++b) {
        const auto [i, j] = m[a];
        const auto [i2, j2] = m[b];
        if (sim(i, j) + sim(i2, j2) < sim(i, j2) + sim(i2, j) && within_window(i, j, i2, j2)) {
          m[a].second = j2;
          m[b].second = j;
          ++swaps_this_pass;
        }
      }
    }
    out.swaps += swaps_this_pass;
    if (swaps_this_pass == 0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

MatchSet refine_matching(const MatchSet& matches, const SimilarityMatrix& sim,
                         std::span<const double> gt_starts, std::span<const double> gen_starts,
                         double tau_win, int max_passes) {
  return refine_matching_traced(matches, sim, gt_starts, gen_starts, tau_win, max_passes).matches;
}

MatchSet prune_matching(const MatchSet& matches, std::span<const double> gt_starts,
                        std::span<const double> gen_starts, double tau_win) {
  MatchSet out;
  for (const auto& [i, j] : matches.pairs) {
    if (std::abs(gt_starts[i] - gen_starts[j]) <= tau_win) out.pairs.emplace_back(i, j);
  }
  return out;
}

AlignResult align(const std::vector<Utterance>& gt, const std::vector<Utterance>& gen,
                  const TraceParams& params, EmbeddingProvider& embedder) {
  params.validate();
  const auto gt_starts = start_times(gt);
  const auto gen_starts = start_times(gen);

  std::vector<std::string> gt_texts, gen_texts;
  for (const auto& u : gt) gt_texts.push_back(u.text);
  for (const auto& u : gen) gen_texts.push_back(u.text);

  AlignResult result;
  result.similarity = build_similarity_matrix(gt_texts, gen_texts, embedder);
  if (gt.empty() || gen.empty()) return result;

  const auto cost = build_cost_matrix(gt_starts, gen_starts, params.tau_time);
  const auto initial = solve_assignment(cost);
  const auto refined = refine_matching(initial, result.similarity, gt_starts, gen_starts,
                                       params.tau_win, params.max_refine_passes);
  result.matches = prune_matching(refined, gt_starts, gen_starts, params.tau_win);
  return result;
}

}  // namespace tglg
