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

#include "tglg/core.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tglg/errors.h"

namespace tglg {

std::vector<double> EvaluationInstance::frame_times() const {
  std::vector<double> times;
  if (!(frame_rate_fps > 0.0) || eval_end_s < timeline_start_s) return times;
  // Index-based to avoid accumulating the step.
  for (long k = 0;; ++k) {
    const double t = timeline_start_s + static_cast<double>(k) / frame_rate_fps;
    if (t > eval_end_s) break;
    times.push_back(t);
  }
  return times;
}

void TraceParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ParameterError(what);
  };
  require(tau_time > 0.0, "tau_time must be > 0");
  require(tau_win > 0.0, "tau_win must be > 0");
  require(tau_pen > 0.0, "tau_pen must be > 0");
  require(alpha_start >= 0.0 && alpha_start <= 1.0, "alpha_start must be in [0,1]");
  require(alpha_end >= 0.0 && alpha_end <= 1.0, "alpha_end must be in [0,1]");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must be in [0,1]");
  require(alpha_start + alpha_end <= 1.0, "alpha_start + alpha_end must be <= 1");
  require(max_refine_passes >= 1, "max_refine_passes must be >= 1");
}

void sort_utterances(std::vector<Utterance>& utterances) {
  std::stable_sort(utterances.begin(), utterances.end(),
                   [](const Utterance& a, const Utterance& b) {
                     if (a.start_s != b.start_s) return a.start_s < b.start_s;
                     return a.end_s < b.end_s;
                   });
}

std::vector<std::string> validate_utterance(const Utterance& u,
                                            std::size_t index) {
  std::vector<std::string> out;
  auto add = [&](const std::string& msg) {
    std::ostringstream os;
    os << "utterance " << index << ": " << msg;
    out.push_back(os.str());
  };
  if (!std::isfinite(u.start_s) || !std::isfinite(u.end_s)) {
    add("start_s and end_s must be finite");
    return out;
  }
  if (u.start_s < 0.0) add("start_s must be >= 0");
  if (u.start_s > u.end_s) {
    std::ostringstream os;
    os << "start_s <= end_s violated (" << u.start_s << " > " << u.end_s << ")";
    add(os.str());
  }
  if (!u.text.empty() && u.token_count && *u.token_count < 1) {
    add("non-empty text requires token_count >= 1");
  }
  return out;
}

std::vector<std::string> validate_history(const InteractionHistory& history) {
  std::vector<std::string> out;
  const auto& us = history.utterances;
  for (std::size_t i = 0; i < us.size(); ++i) {
    auto v = validate_utterance(us[i], i);
    out.insert(out.end(), v.begin(), v.end());
    if (i > 0) {
      const Utterance& prev = us[i - 1];
      const bool ordered =
          prev.start_s < us[i].start_s ||
          (prev.start_s == us[i].start_s && prev.end_s <= us[i].end_s);
      if (!ordered) {
        std::ostringstream os;
        os << "utterance " << i << ": out of order (starts at " << us[i].start_s
           << ", previous starts at " << prev.start_s << ")";
        out.push_back(os.str());
      }
    }
  }
  return out;
}

}  // namespace tglg
