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

// Rectangular linear assignment.

#ifndef TGLG_ASSIGNMENT_H_
#define TGLG_ASSIGNMENT_H_

#include <cstddef>
#include <utility>
#include <vector>

#include "tglg/matrix.h"

namespace tglg {

using IndexPair = std::pair<std::size_t, std::size_t>;

// Minimum-total-cost one-to-one matching of size min(rows, cols), returned as
// (row, col) pairs sorted by row. Shortest-augmenting-path Hungarian method
// with potentials, O(n^2 m) for n = min(rows, cols).
//
// Deterministic: rows are inserted in index order and column scans break
// ties toward the lowest index. No cost perturbation is applied.
// Entries must be finite.
std::vector<IndexPair> solve_linear_assignment(const Matrix& cost);

// Sum of cost(r, c) over pairs, accumulated in the order given.
double assignment_cost(const Matrix& cost, const std::vector<IndexPair>& pairs);

}  // namespace tglg

#endif  // TGLG_ASSIGNMENT_H_
