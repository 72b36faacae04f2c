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

#include "hdcam/codebook.hpp"
#include "hdcam/graph.hpp"
#include "hdcam/hypervector.hpp"
#include "hdcam/search.hpp"

namespace hdcam {

struct NodeVector {
  std::string node;
  Hypervector hv;
};

// Bundle of bind(token(predicate), token(value)) over every pair of the
// node; the bare node token when it has none.
NodeVector build_node_vector(const std::string& node, const PredicateTable& predicates,
                             TokenCodebook& codebook);

struct ConceptVector {
  std::string name;
  std::vector<std::string> members;
  Hypervector hv;
};

ConceptVector make_concept(const std::string& name, const std::vector<std::string>& members,
                           TokenCodebook& codebook);

// Max similarity between the role filler of the node vector and any member
// token of the concept.
double field_affinity(const Hypervector& node_hv, const ConceptVector& concept_vec,
                      const std::string& role, TokenCodebook& codebook);

struct GiantScoreRow {
  std::string node;
  double s = 0.0;
  double s_hat = 0.0;
  double t_hat = 0.0;
  double g = 0.0;
  std::size_t paths = 0;
};

GiantScoreRow giant_score(double s, std::size_t paths, std::size_t max_paths);

// Number of distinct starts whose trace reaches each node.
std::map<std::string, std::size_t> path_counts(const std::vector<PathRecord>& records);

// One row per traced node, ordered by g descending then node id.
std::vector<GiantScoreRow> giant_table(const std::vector<PathRecord>& records,
                                       const PredicateTable& predicates,
                                       const ConceptVector& concept_vec,
                                       const std::string& role, TokenCodebook& codebook);

// Lineage counts around a hub. Records of one start form a graph of
// (generation, node) vertices linked child -> parent. Level k above the hub
// holds the vertices reachable k mentor steps from a hub vertex, level k
// below those k student steps back toward the start; each count is the
// number of distinct node ids on that level across all starts.
struct TrafficProfile {
  std::string node;
  std::vector<std::size_t> up_counts;    // mentor direction, level 1 first
  std::vector<std::size_t> down_counts;  // student direction, level 1 first
  double up_mean = 0.0;                  // over non-empty levels
  double down_mean = 0.0;
  std::optional<double> thickness_ratio;  // down_mean / up_mean
  bool present = false;
};

TrafficProfile traffic_profile(const std::vector<PathRecord>& records, const std::string& node,
                               std::size_t up_gens, std::size_t down_gens);

struct EraWindow {
  long long start = 0;  // inclusive
  long long end = 0;    // exclusive
};

std::vector<EraWindow> make_windows(long long first, long long last, long long width = 50);

struct WindowSignal {
  EraWindow window;
  std::size_t members = 0;
  std::optional<double> similarity;
  std::optional<double> delta;
};

// Per window: bundle the members' vectors, recover the role filler and
// compare it with the token. Nodes without a parsable era are skipped.
std::vector<WindowSignal> window_signal(const std::vector<NodeVector>& node_vectors,
                                        const PredicateTable& predicates,
                                        const std::vector<EraWindow>& windows,
                                        const Hypervector& token, const std::string& role,
                                        const std::string& era_field, TokenCodebook& codebook);

std::optional<long long> node_era(const PredicateTable& predicates, const std::string& node,
                                  const std::string& era_field);

double shannon_entropy(const std::map<std::string, std::size_t>& counts);

double continuity(const Hypervector& pre_bundle, const Hypervector& post_bundle);

// Bundle of the role fillers of the given node vectors.
Hypervector role_bundle(const std::vector<const NodeVector*>& nodes, const std::string& role,
                        TokenCodebook& codebook);

struct ParadigmIndicators {
  std::size_t pre_nodes = 0;
  std::size_t post_nodes = 0;
  std::optional<double> society_explosion;    // mean MEMBER_OF count, post / pre
  std::optional<double> hub_diversification;  // distinct EMPLOYER values, post / pre
  std::optional<double> field_continuity;
  std::optional<double> language_continuity;
  std::optional<double> employer_continuity;
  std::optional<double> language_entropy_pre;
  std::optional<double> language_entropy_post;
  std::optional<double> field_entropy_post;
};

// pre = era < pivot, post = era >= pivot.
ParadigmIndicators paradigm_indicators(const std::vector<NodeVector>& node_vectors,
                                       const PredicateTable& predicates, long long pivot,
                                       const std::string& era_field, TokenCodebook& codebook);

}  // namespace hdcam
