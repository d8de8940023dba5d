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

#include "tglg/score.h"

#include <algorithm>
#include <cmath>

#include "tglg/errors.h"
#include "tglg/kernels.h"

namespace tglg {

F1Score generation_f1(std::size_t n_matched, std::size_t n_gt, std::size_t n_gen) {
  if (n_gt == 0 && n_gen == 0) return {1.0, 1.0, 1.0};
  if (n_matched == 0 || n_gt == 0 || n_gen == 0) return {};
  if (n_matched > n_gt || n_matched > n_gen) {
    throw ParameterError("matched count exceeds set sizes");
  }
  F1Score s;
  s.precision = static_cast<double>(n_matched) / static_cast<double>(n_gen);
  s.recall = static_cast<double>(n_matched) / static_cast<double>(n_gt);
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

SemanticScore semantic_score(const MatchSet& matches, const SimilarityMatrix& sim, double f1) {
  SemanticScore out;
  if (matches.empty()) return out;
  double sum = 0.0;
  for (const auto& [i, j] : matches.pairs) {
    out.per_pair.push_back(sim(i, j));
    sum += sim(i, j);
  }
  out.aggregate = f1 * (sum / static_cast<double>(matches.size()));
  return out;
}

BoundaryScores boundary_scores(const MatchSet& matches, const std::vector<Utterance>& gt,
                               const std::vector<Utterance>& gen, double tau_pen, double f1) {
  if (!(tau_pen > 0.0)) throw ParameterError("tau_pen must be > 0");
  BoundaryScores out;
  if (matches.empty()) return out;
  double start_sum = 0.0, end_sum = 0.0;
  for (const auto& [i, j] : matches.pairs) {
    if (i >= gt.size() || j >= gen.size()) throw StructuralError("match index out of range");
    const Utterance& g = gt[i];
    const Utterance& h = gen[j];
    if (!std::isfinite(h.end_s) || !std::isfinite(g.end_s)) {
      throw ParameterError("utterance end time missing; estimate it before scoring");
    }
    const double s = std::exp(-std::abs(g.start_s - h.start_s) / tau_pen);
    const double e = std::exp(-std::abs(g.end_s - h.end_s) / tau_pen);
    out.per_pair_start.push_back(s);
    out.per_pair_end.push_back(e);
    start_sum += s;
    end_sum += e;
  }
  const auto n = static_cast<double>(matches.size());
  out.start = f1 * (start_sum / n);
  out.end = f1 * (end_sum / n);
  return out;
}

OverlapScore overlap_score(const std::vector<Utterance>& gen, double tau_pen, double f1) {
  if (!(tau_pen > 0.0)) throw ParameterError("tau_pen must be > 0");
  OverlapScore out;
  if (gen.empty()) return out;
  std::vector<double> starts, ends;
  starts.reserve(gen.size());
  ends.reserve(gen.size());
  for (const auto& u : gen) {
    if (!std::isfinite(u.end_s)) {
      throw ParameterError("utterance end time missing; estimate it before scoring");
    }
    starts.push_back(u.start_s);
    ends.push_back(u.end_s);
  }
  std::vector<double> totals(gen.size());
  if (gen.size() * gen.size() >= kernels::kParallelThreshold) {
    kernels::overlap_totals_omp(starts, ends, totals);
  } else {
    kernels::overlap_totals_serial(starts, ends, totals);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < gen.size(); ++j) {
    const double c = std::exp(-totals[j] / tau_pen);
    out.profile.per_generated.push_back({j, totals[j], c});
    sum += c;
  }
  out.aggregate = f1 * (sum / static_cast<double>(gen.size()));
  return out;
}

double timing_score(double s_start, double s_end, double s_overlap, const TraceParams& params) {
  return params.alpha_start * s_start + params.alpha_end * s_end +
         (1.0 - params.alpha_start - params.alpha_end) * s_overlap;
}

double trace_score(double s_a, double s_t, double alpha) {
  return alpha * s_a + (1.0 - alpha) * s_t;
}

TraceReport silent_match_report() {
  TraceReport r;
  r.trace = r.semantic = r.timing = r.start = r.end = r.overlap = 1.0;
  r.f1 = r.precision = r.recall = 1.0;
  return r;
}

TraceReport score_alignment(const std::vector<Utterance>& gt, const std::vector<Utterance>& gen,
                            const AlignResult& alignment, const TraceParams& params) {
  params.validate();
  if (gt.empty() && gen.empty()) return silent_match_report();

  const MatchSet& b = alignment.matches;
  const F1Score f = generation_f1(b.size(), gt.size(), gen.size());
  const auto sem = semantic_score(b, alignment.similarity, f.f1);
  const auto bounds = boundary_scores(b, gt, gen, params.tau_pen, f.f1);
  const auto ov = overlap_score(gen, params.tau_pen, f.f1);

  TraceReport r;
  r.precision = f.precision;
  r.recall = f.recall;
  r.f1 = f.f1;
  r.semantic = sem.aggregate;
  r.start = bounds.start;
  r.end = bounds.end;
  r.overlap = ov.aggregate;
  // Clamp absorbs last-bit rounding of the weighted sums only.
  r.timing = std::clamp(timing_score(r.start, r.end, r.overlap, params), 0.0, 1.0);
  r.trace = std::clamp(trace_score(r.semantic, r.timing, params.alpha), 0.0, 1.0);
  r.n_ground_truth = gt.size();
  r.n_generated = gen.size();
  r.n_matched = b.size();
  for (std::size_t k = 0; k < b.size(); ++k) {
    r.pair_details.push_back({b.pairs[k].first, b.pairs[k].second, sem.per_pair[k],
                              bounds.per_pair_start[k], bounds.per_pair_end[k]});
  }
  return r;
}

TraceReport evaluate_pair(const std::vector<Utterance>& gt, const std::vector<Utterance>& gen,
                          const TraceParams& params, EmbeddingProvider& embedder) {
  params.validate();
  if (gt.empty() && gen.empty()) return silent_match_report();
  const auto alignment = align(gt, gen, params, embedder);
  return score_alignment(gt, gen, alignment, params);
}

}  // namespace tglg
