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

#include "hdcam/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include "hdcam/csv.hpp"
#include "hdcam/error.hpp"
#include "hdcam/rescue.hpp"

namespace hdcam {

namespace {

template <typename T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
  return out;
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (b <= v.size()) {
    std::size_t e = v.find(',', b);
    if (e == std::string::npos) e = v.size();
    std::string item = trim(std::string_view(v).substr(b, e - b));
    if (!item.empty()) out.push_back(std::move(item));
    b = e + 1;
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter int_field(T RunConfig::*f) {
  return [f](RunConfig& c, const std::string& k, const std::string& v) {
    c.*f = parse_int<T>(k, v);
  };
}

Setter real_field(double RunConfig::*f) {
  return [f](RunConfig& c, const std::string& k, const std::string& v) {
    c.*f = parse_real(k, v);
  };
}

Setter text_field(std::string RunConfig::*f) {
  return [f](RunConfig& c, const std::string&, const std::string& v) { c.*f = v; };
}

Setter list_field(std::vector<std::string> RunConfig::*f) {
  return [f](RunConfig& c, const std::string&, const std::string& v) { c.*f = parse_list(v); };
}

Setter year_field(std::optional<long long> RunConfig::*f) {
  return [f](RunConfig& c, const std::string& k, const std::string& v) {
    c.*f = parse_int<long long>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> kSetters = {
      {"dim", int_field(&RunConfig::dim)},
      {"blocks", int_field(&RunConfig::blocks)},
      {"depth_exp", int_field(&RunConfig::depth_exp)},
      {"seed", int_field(&RunConfig::seed)},
      {"rr", real_field(&RunConfig::rr)},
      {"fs", int_field(&RunConfig::fs)},
      {"max_depth", int_field(&RunConfig::max_depth)},
      {"cr2_halt", real_field(&RunConfig::cr2_halt)},
      {"mode",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "rescue") {
           c.mode = SearchMode::rescue;
         } else if (v == "dont_care") {
           c.mode = SearchMode::dont_care;
         } else {
           throw ConfigError("bad value for " + k + ": '" + v + "' (rescue|dont_care)");
         }
       }},
      {"prune_order",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "descending_cr2") {
           c.prune_order = PruneOrder::descending_cr2;
         } else if (v == "lexicographic") {
           c.prune_order = PruneOrder::lexicographic;
         } else {
           throw ConfigError("bad value for " + k + ": '" + v +
                             "' (descending_cr2|lexicographic)");
         }
       }},
      {"threads", int_field(&RunConfig::threads)},
      {"top_k", int_field(&RunConfig::top_k)},
      {"edges", text_field(&RunConfig::edges)},
      {"predicates", text_field(&RunConfig::predicates)},
      {"starts", text_field(&RunConfig::starts)},
      {"snapshot", text_field(&RunConfig::snapshot)},
      {"rescue", text_field(&RunConfig::rescue)},
      {"records", text_field(&RunConfig::records)},
      {"summary", text_field(&RunConfig::summary)},
      {"out", text_field(&RunConfig::out)},
      {"report", text_field(&RunConfig::report)},
      {"codebook_out", text_field(&RunConfig::codebook_out)},
      {"a", text_field(&RunConfig::a)},
      {"b", text_field(&RunConfig::b)},
      {"out_edges", text_field(&RunConfig::out_edges)},
      {"out_predicates", text_field(&RunConfig::out_predicates)},
      {"out_starts", text_field(&RunConfig::out_starts)},
      {"out_giant", text_field(&RunConfig::out_giant)},
      {"out_json", text_field(&RunConfig::out_json)},
      {"out_bars", text_field(&RunConfig::out_bars)},
      {"nodes", int_field(&RunConfig::nodes)},
      {"max_out", int_field(&RunConfig::max_out)},
      {"depth", int_field(&RunConfig::depth)},
      {"mutual_pairs", int_field(&RunConfig::mutual_pairs)},
      {"start_count", int_field(&RunConfig::start_count)},
      {"concept", text_field(&RunConfig::concept_name)},
      {"concept_members", list_field(&RunConfig::concept_members)},
      {"role", text_field(&RunConfig::role)},
      {"era_field", text_field(&RunConfig::era_field)},
      {"windows_start", year_field(&RunConfig::windows_start)},
      {"windows_end", year_field(&RunConfig::windows_end)},
      {"window_width", int_field(&RunConfig::window_width)},
      {"hubs", list_field(&RunConfig::hubs)},
      {"up_gens", int_field(&RunConfig::up_gens)},
      {"down_gens", int_field(&RunConfig::down_gens)},
      {"pivot", year_field(&RunConfig::pivot)},
      {"cr1", real_field(&RunConfig::cr1)},
      {"gens", int_field(&RunConfig::gens)},
      {"address_space",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.address_space = parse_real(k, v);
       }},
      {"segment_bits",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.segment_bits = parse_int<std::size_t>(k, v);
       }},
      {"sweep",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sweep.clear();
         for (const auto& item : parse_list(v)) {
           auto colon = item.find(':');
           if (colon == std::string::npos) {
             throw ConfigError("bad " + k + " entry '" + item + "', expected B:m");
           }
           SweepPoint p;
           p.blocks = parse_int<std::uint32_t>(k, item.substr(0, colon));
           p.depth_bits = parse_int<unsigned>(k, item.substr(colon + 1));
           c.sweep.push_back(p);
         }
       }},
  };
  return kSetters;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> out;
    for (const auto& [k, s] : setters()) out.push_back(k);
    return out;
  }();
  return kKeys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(*this, key, trim(value));
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected key = value");
    }
    set(trim(std::string_view(t).substr(0, eq)), t.substr(eq + 1));
  }
}

void RunConfig::validate() const {
  if (blocks == 0) throw ConfigError("blocks must be positive");
  if (dim == 0 || dim % blocks != 0) {
    throw ConfigError("dim must be a positive multiple of blocks");
  }
  if (dim % 8 != 0) throw ConfigError("dim must be a multiple of 8");
  if (depth_exp < 1 || depth_exp > 32) throw ConfigError("depth_exp must be in [1, 32]");
  check_rescue_rate(rr);
  search().validate();
}

SearchConfig RunConfig::search() const {
  SearchConfig s;
  s.fs = fs;
  s.max_depth = max_depth;
  s.cr2_halt = cr2_halt;
  s.mode = mode;
  s.prune_order = prune_order;
  s.threads = threads;
  return s;
}

std::vector<SweepPoint> default_sweep() {
  return {{64, 28}, {128, 27}, {256, 26}, {512, 25}, {1024, 24}};
}

}  // namespace hdcam
