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

#include "hdcam/trace_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "hdcam/csv.hpp"
#include "hdcam/error.hpp"

namespace hdcam {

std::string format_fixed(double v) { return fmt::format("{:.9f}", v); }

double round9(double v) { return std::round(v * 1e9) / 1e9; }

void write_records(std::ostream& os, const std::vector<PathRecord>& records) {
  os << "start,generation,node,parent,cr1,cr2\n";
  for (const auto& r : records) {
    write_csv_row(os, {r.start, std::to_string(r.generation), r.node, r.parent,
                       format_fixed(r.cr1), format_fixed(r.cr2)});
  }
}

void write_records(const std::filesystem::path& path, const std::vector<PathRecord>& records) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  write_records(os, records);
  if (!os) throw IoError("write failed: " + path.string());
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno != 0) {
    throw ParseError(line, "bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<PathRecord> parse_records(std::istream& in) {
  CsvReader reader(in);
  CsvRow row;
  const std::vector<std::string> header = {"start", "generation", "node",
                                           "parent", "cr1", "cr2"};
  if (!reader.next(row) || row.fields != header) {
    throw FormatError("record file must start with start,generation,node,parent,cr1,cr2");
  }
  std::vector<PathRecord> out;
  while (reader.next(row)) {
    if (row.fields.size() != 6) {
      throw ParseError(row.line, "expected 6 fields, got " + std::to_string(row.fields.size()));
    }
    PathRecord r;
    r.start = row.fields[0];
    double g = parse_double(row.fields[1], row.line);
    if (g < 0 || g != std::floor(g)) throw ParseError(row.line, "bad generation");
    r.generation = static_cast<std::uint32_t>(g);
    r.node = row.fields[2];
    r.parent = row.fields[3];
    r.cr1 = parse_double(row.fields[4], row.line);
    r.cr2 = parse_double(row.fields[5], row.line);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PathRecord> read_records(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  return parse_records(is);
}

nlohmann::ordered_json summary_json(const std::vector<GenerationSummary>& generations) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& g : generations) {
    nlohmann::ordered_json j;
    j["generation"] = g.generation;
    j["frontier_size"] = g.frontier_size;
    j["queries"] = g.queries;
    j["failed_queries"] = g.failed_queries;
    j["dont_care_blocks"] = g.dont_care_blocks;
    j["mean_cr1"] = round9(g.mean_cr1);
    j["mean_cr2"] = round9(g.mean_cr2);
    j["min_cr2"] = round9(g.min_cr2);
    arr.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["generations"] = std::move(arr);
  return out;
}

nlohmann::ordered_json divergence_json(const DivergenceReport& r) {
  auto tops = [](const std::vector<VoteTally>& t) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& v : t) arr.push_back({{"node", v.node}, {"votes", v.votes}});
    return arr;
  };
  nlohmann::ordered_json j;
  j["records_a"] = r.records_a;
  j["records_b"] = r.records_b;
  j["only_a"] = r.only_a;
  j["only_b"] = r.only_b;
  j["symmetric_difference"] = r.symmetric_difference;
  j["cr_mismatches"] = r.cr_mismatches;
  j["jaccard"] = round9(r.jaccard);
  j["nodes_a"] = r.votes_a.size();
  j["nodes_b"] = r.votes_b.size();
  j["top_a"] = tops(r.top_a);
  j["top_b"] = tops(r.top_b);
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace hdcam
