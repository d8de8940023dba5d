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

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant; each output element is computed by the same expression in
// both, so results are bit-identical. The dispatching entry points in
// align.h / score.h pick the OpenMP variant above a size threshold.

#ifndef TGLG_KERNELS_H_
#define TGLG_KERNELS_H_

#include <cstddef>
#include <span>

#include "tglg/embed.h"
#include "tglg/matrix.h"

namespace tglg::kernels {

// Element count above which dispatchers use the OpenMP variant.
inline constexpr std::size_t kParallelThreshold = 4096;

// out(i, j) = -exp(-|gt[i] - gen[j]| / tau). `out` is resized.
void cost_matrix_serial(std::span<const double> gt, std::span<const double> gen,
                        double tau, Matrix& out);
void cost_matrix_omp(std::span<const double> gt, std::span<const double> gen,
                     double tau, Matrix& out);

// out(i, j) = (1 + cos(a[i], b[j])) / 2 clamped to [0, 1].
void similarity_matrix_serial(std::span<const EmbeddingVector> a,
                              std::span<const EmbeddingVector> b, Matrix& out);
void similarity_matrix_omp(std::span<const EmbeddingVector> a,
                           std::span<const EmbeddingVector> b, Matrix& out);

// out[j] = sum over k != j of max(0, min(ends[j], ends[k]) - max(starts[j], starts[k])).
void overlap_totals_serial(std::span<const double> starts, std::span<const double> ends,
                           std::span<double> out);
void overlap_totals_omp(std::span<const double> starts, std::span<const double> ends,
                        std::span<double> out);

// Threads OpenMP would use; 1 when built without OpenMP.
int max_threads();

}  // namespace tglg::kernels

#endif  // TGLG_KERNELS_H_
