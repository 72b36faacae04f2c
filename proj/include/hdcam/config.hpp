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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdcam/search.hpp"

namespace hdcam {

struct SweepPoint {
  std::uint32_t blocks = 0;
  unsigned depth_bits = 0;
};

// Every tunable of the pipeline. Keys in config files use the field names
// below; command-line flags use the same names with dashes.
struct RunConfig {
  // memory geometry
  std::size_t dim = 12800;
  std::uint32_t blocks = 128;
  unsigned depth_exp = 20;
  std::uint64_t seed = 42;
  double rr = 0.0;

  // search
  std::size_t fs = 100;
  std::size_t max_depth = 57;
  double cr2_halt = 0.100;
  SearchMode mode = SearchMode::dont_care;
  std::optional<PruneOrder> prune_order;
  std::size_t threads = 1;
  std::size_t top_k = 20;

  // files
  std::string edges, predicates, starts, snapshot, rescue, records, summary, out, report;
  std::string codebook_out, a, b, out_edges, out_predicates, out_starts;
  std::string out_giant, out_json, out_bars;

  // gen-dag
  std::size_t nodes = 1000;
  std::size_t max_out = 3;
  std::size_t depth = 20;
  std::size_t mutual_pairs = 0;
  std::size_t start_count = 8;

  // analysis
  std::string concept_name = "concept";
  std::vector<std::string> concept_members;
  std::string role = "FIELD";
  std::string era_field = "ERA";
  std::optional<long long> windows_start;
  std::optional<long long> windows_end;
  long long window_width = 50;
  std::vector<std::string> hubs;
  std::size_t up_gens = 20;
  std::size_t down_gens = 15;
  std::optional<long long> pivot;

  // bounds / sweep
  double cr1 = 1.0;
  std::uint32_t gens = 0;
  std::optional<double> address_space;
  std::vector<SweepPoint> sweep;
  std::optional<std::size_t> segment_bits;

  // Throws ConfigError for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);

  // `key = value` lines; blank lines and `#` comments ignored.
  void load_file(const std::filesystem::path& path);

  // Geometry and search-parameter invariants.
  void validate() const;

  SearchConfig search() const;
  std::size_t segment_size() const { return dim / blocks; }

  static const std::vector<std::string>& keys();
};

std::vector<SweepPoint> default_sweep();

}  // namespace hdcam
