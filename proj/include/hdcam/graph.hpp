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
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hdcam {

struct Edge {
  std::string student;
  std::string mentor;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeList {
  std::vector<Edge> edges;  // first-occurrence order, no exact duplicates
  std::size_t rows = 0;
  std::size_t duplicates = 0;
};

// CSV with header `student,mentor`.
EdgeList parse_edges(std::istream& in);
EdgeList ingest_edges(const std::filesystem::path& path);
void write_edges(const std::filesystem::path& path, const std::vector<Edge>& edges);

struct PurificationReport {
  std::size_t removed_pairs = 0;
  std::vector<Edge> removed_edges;
  std::size_t retained_edges = 0;

  nlohmann::ordered_json to_json() const;
};

// Drops both directions of every mutual pair. Self-loops are left for the
// search-time ancestor check.
std::pair<EdgeList, PurificationReport> purify_dag(const EdgeList& edges);

// Student -> mentors in byte order; every node seen on either side has an
// entry (possibly with no mentors).
class AdjacencyIndex {
 public:
  AdjacencyIndex() = default;
  explicit AdjacencyIndex(const std::vector<Edge>& edges);

  const std::vector<std::string>& mentors(const std::string& node) const;
  std::size_t out_degree(const std::string& node) const;
  bool contains(const std::string& node) const { return map_.count(node) != 0; }
  std::size_t node_count() const { return map_.size(); }
  std::size_t edge_count() const { return edges_; }
  const std::map<std::string, std::vector<std::string>>& map() const { return map_; }

 private:
  std::map<std::string, std::vector<std::string>> map_;
  std::size_t edges_ = 0;
};

const std::vector<std::string>& default_predicate_schema();

inline constexpr std::size_t kMaxPredicateDimensions = 12;

struct PredicateTable {
  std::map<std::string, std::map<std::string, std::vector<std::string>>> nodes;
  std::vector<std::string> unknown_predicates;  // sorted, distinct
  std::size_t rows = 0;

  const std::vector<std::string>* values(const std::string& node,
                                         const std::string& predicate) const;
};

// CSV with header `node,predicate,value`. Names outside the schema are kept
// and listed in unknown_predicates.
PredicateTable parse_predicates(std::istream& in,
                                const std::vector<std::string>& schema);
PredicateTable ingest_predicates(const std::filesystem::path& path,
                                 const std::vector<std::string>& schema =
                                     default_predicate_schema());

struct DagSpec {
  std::size_t nodes = 1000;
  std::size_t max_out = 3;
  std::size_t depth = 20;
  std::uint64_t seed = 1;
  std::size_t mutual_pairs = 0;
  std::size_t starts = 8;
};

struct PredicateRow {
  std::string node;
  std::string predicate;
  std::string value;
};

struct DagFixture {
  std::vector<Edge> edges;
  std::vector<std::string> starts;
  std::vector<PredicateRow> predicates;
  std::vector<Edge> planted_reverse;  // the edges added to form mutual pairs
};

// Layered random DAG: node i sits on layer i*depth/nodes and draws its
// mentors from the next three layers. Mutual pairs are made by appending
// the reverse of randomly chosen edges.
DagFixture generate_dag(const DagSpec& spec);

void write_predicates(const std::filesystem::path& path,
                      const std::vector<PredicateRow>& rows);
void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace hdcam
