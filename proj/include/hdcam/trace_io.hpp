// Copyright 2026 The hdcam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdcam/search.hpp"

namespace hdcam {

// Fixed 9-decimal rendering used by every text output.
std::string format_fixed(double v);

// Rounds to 9 decimals so JSON output is as stable as the CSV output.
double round9(double v);

// `start,generation,node,parent,cr1,cr2`.
void write_records(std::ostream& os, const std::vector<PathRecord>& records);
void write_records(const std::filesystem::path& path, const std::vector<PathRecord>& records);
std::vector<PathRecord> parse_records(std::istream& in);
std::vector<PathRecord> read_records(const std::filesystem::path& path);

nlohmann::ordered_json summary_json(const std::vector<GenerationSummary>& generations);
nlohmann::ordered_json divergence_json(const DivergenceReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace hdcam
