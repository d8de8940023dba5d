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

// JSON record formats (one object per line).
//
// History:   {"id", "metadata": {str: str},
//             "utterances": [{"role", "start", "end", "text", "tokens"?, "acts"?}]}
// Generated: {"instance_id", "utterances": [{"start", "end"?, "text", "tokens"?}]}
// Report:    {"instance_id", "metadata", "params", "report"}

#ifndef TGLG_IO_H_
#define TGLG_IO_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tglg/core.h"

namespace tglg {

using json = nlohmann::json;

// A generated utterance as read from disk; end may be absent.
struct RawGeneratedUtterance {
  double start_s = 0.0;
  std::optional<double> end_s;
  std::string text;
  std::optional<int> token_count;
};

struct GeneratedRecord {
  std::string instance_id;
  std::vector<RawGeneratedUtterance> utterances;
};

struct ReportRecord {
  std::string instance_id;
  std::map<std::string, std::string> metadata;
  TraceParams params;
  TraceReport report;
};

json history_to_json(const InteractionHistory& history);
// Throws ParseError (without a line number) on schema violations.
InteractionHistory history_from_json(const json& j);

json generated_to_json(const GeneratedRecord& record);
GeneratedRecord generated_from_json(const json& j);

json params_to_json(const TraceParams& params);
// Missing keys keep their defaults.
TraceParams params_from_json(const json& j, TraceParams base = {});

json report_to_json(const TraceReport& report);
TraceReport report_from_json(const json& j);

json report_record_to_json(const ReportRecord& record);
ReportRecord report_record_from_json(const json& j);

// Single-line dump used for every JSONL writer.
std::string dump_line(const json& j);

}  // namespace tglg

#endif  // TGLG_IO_H_
