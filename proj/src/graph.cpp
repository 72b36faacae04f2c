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

#include "hdcam/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "hdcam/csv.hpp"
#include "hdcam/error.hpp"
#include "hdcam/hash.hpp"

namespace hdcam {

namespace {

void read_header(CsvReader& reader, const std::vector<std::string>& expected) {
  CsvRow row;
  if (!reader.next(row)) {
    throw FormatError("missing header, expected " + expected[0] + "," + expected[1] +
                      (expected.size() > 2 ? "," + expected[2] : ""));
  }
  if (row.fields != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw FormatError("bad header on line " + std::to_string(row.line) +
                      ", expected " + want);
  }
}

std::ofstream open_text_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_text_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  return is;
}

struct EdgeHash {
  std::size_t operator()(const Edge& e) const {
    return static_cast<std::size_t>(hash_pair(fnv1a64(e.student), fnv1a64(e.mentor)));
  }
};

}  // namespace

EdgeList parse_edges(std::istream& in) {
  CsvReader reader(in);
  read_header(reader, {"student", "mentor"});
  EdgeList out;
  std::unordered_set<Edge, EdgeHash> seen;
  CsvRow row;
  while (reader.next(row)) {
    if (row.fields.size() != 2) {
      throw ParseError(row.line, "expected 2 fields, got " +
                                     std::to_string(row.fields.size()));
    }
    if (row.fields[0].empty() || row.fields[1].empty()) {
      throw ParseError(row.line, "empty node id");
    }
    ++out.rows;
    Edge e{row.fields[0], row.fields[1]};
    if (seen.insert(e).second) {
      out.edges.push_back(std::move(e));
    } else {
      ++out.duplicates;
    }
  }
  return out;
}

EdgeList ingest_edges(const std::filesystem::path& path) {
  auto is = open_text_in(path);
  return parse_edges(is);
}

void write_edges(const std::filesystem::path& path, const std::vector<Edge>& edges) {
  auto os = open_text_out(path);
  write_csv_row(os, {"student", "mentor"});
  for (const auto& e : edges) write_csv_row(os, {e.student, e.mentor});
  if (!os) throw IoError("write failed: " + path.string());
}

nlohmann::ordered_json PurificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["removed_pairs"] = removed_pairs;
  j["removed_edge_count"] = removed_edges.size();
  j["retained_edges"] = retained_edges;
  auto list = nlohmann::ordered_json::array();
  for (const auto& e : removed_edges) list.push_back({e.student, e.mentor});
  j["removed_edges"] = std::move(list);
  return j;
}

std::pair<EdgeList, PurificationReport> purify_dag(const EdgeList& input) {
  std::unordered_set<Edge, EdgeHash> present(input.edges.begin(), input.edges.end());
  EdgeList kept;
  kept.rows = input.rows;
  kept.duplicates = input.duplicates;
  PurificationReport report;
  for (const auto& e : input.edges) {
    bool mutual = e.student != e.mentor && present.count(Edge{e.mentor, e.student}) != 0;
    if (mutual) {
      report.removed_edges.push_back(e);
    } else {
      kept.edges.push_back(e);
    }
  }
  report.removed_pairs = report.removed_edges.size() / 2;
  report.retained_edges = kept.edges.size();
  return {std::move(kept), std::move(report)};
}

AdjacencyIndex::AdjacencyIndex(const std::vector<Edge>& edges) {
  for (const auto& e : edges) {
    map_[e.student].push_back(e.mentor);
    map_.try_emplace(e.mentor);
  }
  for (auto& [node, mentors] : map_) {
    std::sort(mentors.begin(), mentors.end());
    mentors.erase(std::unique(mentors.begin(), mentors.end()), mentors.end());
    edges_ += mentors.size();
  }
}

const std::vector<std::string>& AdjacencyIndex::mentors(const std::string& node) const {
  static const std::vector<std::string> kNone;
  auto it = map_.find(node);
  return it == map_.end() ? kNone : it->second;
}

std::size_t AdjacencyIndex::out_degree(const std::string& node) const {
  return mentors(node).size();
}

const std::vector<std::string>& default_predicate_schema() {
  static const std::vector<std::string> kSchema = {
      "FIELD",       "LANGUAGE", "EMPLOYER", "MEMBER_OF",   "ERA",         "BIRTH_PLACE",
      "DEATH_PLACE", "CITIZENSHIP", "AWARD", "EDUCATED_AT", "NOTABLE_WORK", "RELIGION"};
  return kSchema;
}

const std::vector<std::string>* PredicateTable::values(const std::string& node,
                                                       const std::string& predicate) const {
  auto n = nodes.find(node);
  if (n == nodes.end()) return nullptr;
  auto p = n->second.find(predicate);
  return p == n->second.end() ? nullptr : &p->second;
}

PredicateTable parse_predicates(std::istream& in, const std::vector<std::string>& schema) {
  if (schema.size() > kMaxPredicateDimensions) {
    throw ConfigError("predicate schema has more than 12 dimensions");
  }
  CsvReader reader(in);
  read_header(reader, {"node", "predicate", "value"});
  std::set<std::string> known(schema.begin(), schema.end());
  std::set<std::string> unknown;
  PredicateTable table;
  CsvRow row;
  while (reader.next(row)) {
    if (row.fields.size() != 3) {
      throw ParseError(row.line, "expected 3 fields, got " +
                                     std::to_string(row.fields.size()));
    }
    if (row.fields[0].empty() || row.fields[1].empty()) {
      throw ParseError(row.line, "empty node or predicate");
    }
    if (known.count(row.fields[1]) == 0) unknown.insert(row.fields[1]);
    table.nodes[row.fields[0]][row.fields[1]].push_back(row.fields[2]);
    ++table.rows;
  }
  table.unknown_predicates.assign(unknown.begin(), unknown.end());
  return table;
}

PredicateTable ingest_predicates(const std::filesystem::path& path,
                                 const std::vector<std::string>& schema) {
  auto is = open_text_in(path);
  return parse_predicates(is, schema);
}

namespace {

const std::vector<std::string> kFields = {
    "calculus", "analysis", "geometry",  "algebra", "astronomy", "mechanics",
    "optics",   "logic",    "theology",  "anatomy", "medicine",  "philosophy"};
const std::vector<std::string> kLanguages = {"latin", "german", "french",
                                             "english", "italian", "dutch"};

std::string padded(const char* prefix, std::size_t i, std::size_t width) {
  std::string digits = std::to_string(i);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

DagFixture generate_dag(const DagSpec& spec) {
  if (spec.nodes == 0) throw ConfigError("gen-dag: node count must be positive");
  if (spec.depth < 2) throw ConfigError("gen-dag: depth must be at least 2");
  if (spec.max_out == 0) throw ConfigError("gen-dag: max out-degree must be positive");
  const std::size_t width = std::to_string(spec.nodes - 1).size();
  SplitMix64 rng(hash_pair(spec.seed, 0x6761672d646167ULL));

  std::vector<std::size_t> layer(spec.nodes);
  std::vector<std::vector<std::size_t>> members(spec.depth);
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    layer[i] = i * spec.depth / spec.nodes;
    members[layer[i]].push_back(i);
  }
  auto name = [&](std::size_t i) { return padded("n", i, width); };

  DagFixture fx;
  std::vector<std::size_t> pool;
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    std::size_t l = layer[i];
    if (l + 1 >= spec.depth) continue;
    pool.clear();
    for (std::size_t k = l + 1; k < std::min(spec.depth, l + 4); ++k) {
      pool.insert(pool.end(), members[k].begin(), members[k].end());
    }
    if (pool.empty()) continue;
    std::size_t d = 1 + rng.below(spec.max_out);
    d = std::min(d, pool.size());
    chosen.clear();
    while (chosen.size() < d) {
      std::size_t m = pool[rng.below(pool.size())];
      if (std::find(chosen.begin(), chosen.end(), m) == chosen.end()) chosen.push_back(m);
    }
    for (std::size_t m : chosen) fx.edges.push_back(Edge{name(i), name(m)});
  }

  if (spec.mutual_pairs > fx.edges.size()) {
    throw ConfigError("gen-dag: more mutual pairs requested than edges");
  }
  std::vector<std::size_t> picks;
  while (picks.size() < spec.mutual_pairs) {
    std::size_t e = rng.below(fx.edges.size());
    if (std::find(picks.begin(), picks.end(), e) == picks.end()) picks.push_back(e);
  }
  for (std::size_t e : picks) {
    Edge rev{fx.edges[e].mentor, fx.edges[e].student};
    fx.planted_reverse.push_back(rev);
  }
  fx.edges.insert(fx.edges.end(), fx.planted_reverse.begin(), fx.planted_reverse.end());

  for (std::size_t k = 0; k < std::min(spec.starts, members[0].size()); ++k) {
    fx.starts.push_back(name(members[0][k]));
  }

  for (std::size_t i = 0; i < spec.nodes; ++i) {
    const std::string n = name(i);
    std::size_t nfields = 1 + rng.below(2);
    for (std::size_t f = 0; f < nfields; ++f) {
      fx.predicates.push_back({n, "FIELD", kFields[rng.below(kFields.size())]});
    }
    fx.predicates.push_back({n, "LANGUAGE", kLanguages[rng.below(kLanguages.size())]});
    fx.predicates.push_back({n, "EMPLOYER", padded("u", rng.below(40), 2)});
    std::size_t nsoc = rng.below(4);
    for (std::size_t s = 0; s < nsoc; ++s) {
      fx.predicates.push_back({n, "MEMBER_OF", padded("s", rng.below(20), 2)});
    }
    long long year = 2000 - 25 * static_cast<long long>(layer[i]) -
                     static_cast<long long>(rng.below(25));
    fx.predicates.push_back({n, "ERA", std::to_string(year)});
  }
  return fx;
}

void write_predicates(const std::filesystem::path& path,
                      const std::vector<PredicateRow>& rows) {
  auto os = open_text_out(path);
  write_csv_row(os, {"node", "predicate", "value"});
  for (const auto& r : rows) write_csv_row(os, {r.node, r.predicate, r.value});
  if (!os) throw IoError("write failed: " + path.string());
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  auto os = open_text_out(path);
  for (const auto& l : lines) os << l << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  auto is = open_text_in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (!t.empty() && t[0] != '#') out.push_back(std::move(t));
  }
  return out;
}

}  // namespace hdcam
