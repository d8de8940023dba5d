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

#include "tglg/assignment.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tglg/errors.h"

namespace tglg {
namespace {

// Solves for n <= m. Returns col_of_row[i] for each of the n rows.
// Index 0 in the potential/column arrays is a virtual column used as the
// root of each augmenting search.
std::vector<std::size_t> hungarian_wide(std::size_t n, std::size_t m,
                                        auto&& at) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> row_of_col(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (row_of_col[j] != 0) col_of_row[row_of_col[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace

std::vector<IndexPair> solve_linear_assignment(const Matrix& cost) {
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  std::vector<IndexPair> pairs;
  if (rows == 0 || cols == 0) return pairs;
  for (double x : cost.data()) {
    if (!std::isfinite(x)) throw ParameterError("assignment cost entries must be finite");
  }

  if (rows <= cols) {
    auto col_of_row = hungarian_wide(
        rows, cols, [&](std::size_t r, std::size_t c) { return cost(r, c); });
    pairs.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) pairs.emplace_back(r, col_of_row[r]);
  } else {
    // Tall: solve the transpose, then flip.
    auto row_of_col = hungarian_wide(
        cols, rows, [&](std::size_t c, std::size_t r) { return cost(r, c); });
    pairs.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) pairs.emplace_back(row_of_col[c], c);
    std::sort(pairs.begin(), pairs.end());
  }
  return pairs;
}

double assignment_cost(const Matrix& cost, const std::vector<IndexPair>& pairs) {
  double total = 0.0;
  for (const auto& [r, c] : pairs) total += cost(r, c);
  return total;
}

}  // namespace tglg
