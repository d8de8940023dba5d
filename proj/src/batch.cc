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

#include <exception>
#include <mutex>

#include "tglg/errors.h"
#include "tglg/harness.h"
#include "tglg/score.h"

namespace tglg {

std::vector<TraceReport> evaluate_batch_serial(const std::vector<EvaluationJob>& jobs,
                                               const TraceParams& params,
                                               EmbeddingProvider& embedder) {
  std::vector<TraceReport> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) {
    if (!job.ground_truth || !job.generated) throw StructuralError("evaluation job is incomplete");
    out.push_back(evaluate_pair(*job.ground_truth, *job.generated, params, embedder));
  }
  return out;
}

std::vector<TraceReport> evaluate_batch_omp(const std::vector<EvaluationJob>& jobs,
                                            const TraceParams& params,
                                            EmbeddingProvider& embedder, int threads) {
  if (threads < 1) throw ParameterError("thread count must be >= 1");
  for (const auto& job : jobs) {
    if (!job.ground_truth || !job.generated) throw StructuralError("evaluation job is incomplete");
  }
  std::vector<TraceReport> out(jobs.size());
  std::exception_ptr first_error;
  std::mutex error_mu;
  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long k = 0; k < n; ++k) {
    try {
      out[k] = evaluate_pair(*jobs[k].ground_truth, *jobs[k].generated, params, embedder);
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace tglg
