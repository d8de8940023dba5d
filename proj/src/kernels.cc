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

#include "tglg/kernels.h"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tglg/errors.h"

namespace tglg::kernels {
namespace {

inline double cost_entry(double a, double b, double tau) {
  return -std::exp(-std::abs(a - b) / tau);
}

inline double overlap_total(std::span<const double> starts, std::span<const double> ends,
                            std::size_t j) {
  double total = 0.0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (k == j) continue;
    const double ov = std::min(ends[j], ends[k]) - std::max(starts[j], starts[k]);
    if (ov > 0.0) total += ov;
  }
  return total;
}

std::vector<double> squared_norms(std::span<const EmbeddingVector> vs) {
  std::vector<double> out(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto v = vs[i].values();
    double s = 0.0;
    for (double x : v) s += x * x;
    out[i] = s;
  }
  return out;
}

inline double similarity_entry(const EmbeddingVector& a, double aa,
                               const EmbeddingVector& b, double bb) {
  auto x = a.values();
  auto y = b.values();
  double ab = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) ab += x[k] * y[k];
  const double cos = std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
  return std::clamp((1.0 + cos) / 2.0, 0.0, 1.0);
}

void check_dims(std::span<const EmbeddingVector> a, std::span<const EmbeddingVector> b) {
  const std::size_t d = !a.empty() ? a[0].dim() : (!b.empty() ? b[0].dim() : 0);
  for (const auto& v : a) {
    if (v.dim() != d) throw StructuralError("embedding dimensions differ");
  }
  for (const auto& v : b) {
    if (v.dim() != d) throw StructuralError("embedding dimensions differ");
  }
}

}  // namespace

void cost_matrix_serial(std::span<const double> gt, std::span<const double> gen,
                        double tau, Matrix& out) {
  out = Matrix(gt.size(), gen.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < gen.size(); ++j) out(i, j) = cost_entry(gt[i], gen[j], tau);
  }
}

void cost_matrix_omp(std::span<const double> gt, std::span<const double> gen,
                     double tau, Matrix& out) {
  out = Matrix(gt.size(), gen.size());
  const long n = static_cast<long>(gt.size());
  const std::size_t m = gen.size();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out(i, j) = cost_entry(gt[i], gen[j], tau);
  }
}

void similarity_matrix_serial(std::span<const EmbeddingVector> a,
                              std::span<const EmbeddingVector> b, Matrix& out) {
  check_dims(a, b);
  const auto na = squared_norms(a);
  const auto nb = squared_norms(b);
  out = Matrix(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = similarity_entry(a[i], na[i], b[j], nb[j]);
  }
}

void similarity_matrix_omp(std::span<const EmbeddingVector> a,
                           std::span<const EmbeddingVector> b, Matrix& out) {
  check_dims(a, b);
  const auto na = squared_norms(a);
  const auto nb = squared_norms(b);
  out = Matrix(a.size(), b.size());
  const long n = static_cast<long>(a.size());
  const std::size_t m = b.size();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out(i, j) = similarity_entry(a[i], na[i], b[j], nb[j]);
  }
}

void overlap_totals_serial(std::span<const double> starts, std::span<const double> ends,
                           std::span<double> out) {
  for (std::size_t j = 0; j < starts.size(); ++j) out[j] = overlap_total(starts, ends, j);
}

void overlap_totals_omp(std::span<const double> starts, std::span<const double> ends,
                        std::span<double> out) {
  const long n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) out[j] = overlap_total(starts, ends, j);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace tglg::kernels
