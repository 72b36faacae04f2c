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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdcam/block_memory.hpp"
#include "hdcam/codebook.hpp"
#include "hdcam/galois.hpp"
#include "hdcam/graph.hpp"
#include "hdcam/rescue.hpp"

namespace hdcam {

enum class SearchMode { rescue, dont_care };
enum class PruneOrder { descending_cr2, lexicographic };

struct SearchConfig {
  std::size_t fs = 100;
  std::size_t max_depth = 57;
  double cr2_halt = 0.100;
  SearchMode mode = SearchMode::dont_care;
  // Unset means the mode default; rescue mode is always lexicographic.
  std::optional<PruneOrder> prune_order;
  std::size_t threads = 1;

  PruneOrder effective_order() const;
  void validate() const;  // ConfigError on fs = 0 or cr2_halt outside [0, 1)
};

struct PathRecord {
  std::string start;
  std::uint32_t generation = 0;
  std::string node;
  std::string parent;
  double cr1 = 1.0;
  double cr2 = 1.0;
};

struct GenerationSummary {
  std::uint32_t generation = 0;
  std::size_t frontier_size = 0;
  std::size_t queries = 0;
  std::size_t failed_queries = 0;
  std::uint64_t dont_care_blocks = 0;
  double mean_cr1 = 0.0;
  double mean_cr2 = 0.0;
  double min_cr2 = 0.0;
};

struct TraceResult {
  std::vector<PathRecord> records;
  std::vector<GenerationSummary> generations;
};

using OutDegreeMap = std::map<std::string, std::size_t>;

OutDegreeMap out_degrees(const AdjacencyIndex& adjacency);

std::string ordinal_token_name(std::size_t j);

// bind(token(node), token("__ord__" + j)).
Hypervector ordinal_key(TokenCodebook& codebook, const std::string& node, std::size_t j);

// Learns every (student, j) key with label mentor_j. Returns the edge count.
std::size_t learn_graph(BlockMemory& memory, const AdjacencyIndex& adjacency,
                        TokenCodebook& codebook, const DiffuserBank& bank,
                        RescueBuffer* rescue);

struct LearnedMemory {
  const BlockMemory& memory;
  const DiffuserBank& bank;
  TokenCodebook& codebook;
  const RescueTable* rescue = nullptr;
};

// Frontier-bounded mentor-chain traversal over the memory. Each start is
// traced with its own frontier; records come out start by start, generation
// by generation, in pruned order.
TraceResult trace(const LearnedMemory& learned, const std::vector<std::string>& starts,
                  const SearchConfig& config, const OutDegreeMap& out_degrees);

// Plain map-based traversal with CR fixed at 1 and lexicographic pruning.
TraceResult oracle_trace(const AdjacencyIndex& adjacency,
                         const std::vector<std::string>& starts,
                         const SearchConfig& config);

struct VoteTally {
  std::string node;
  std::size_t votes = 0;
};

struct DivergenceReport {
  std::size_t records_a = 0;
  std::size_t records_b = 0;
  std::size_t only_a = 0;  // multiset difference counts
  std::size_t only_b = 0;
  std::size_t symmetric_difference = 0;
  std::size_t cr_mismatches = 0;  // matched records whose cr1/cr2 differ
  double jaccard = 1.0;           // over the node sets
  std::map<std::string, std::size_t> votes_a;
  std::map<std::string, std::size_t> votes_b;
  std::vector<VoteTally> top_a;
  std::vector<VoteTally> top_b;
};

// Records are matched on (start, generation, node, parent).
DivergenceReport compare_traces(const std::vector<PathRecord>& a,
                                const std::vector<PathRecord>& b, std::size_t top_k);

std::map<std::string, std::size_t> vote_tally(const std::vector<PathRecord>& records);
std::vector<VoteTally> top_k(const std::map<std::string, std::size_t>& votes, std::size_t k);

}  // namespace hdcam
