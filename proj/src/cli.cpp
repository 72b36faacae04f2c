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

#include "hdcam/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdcam/analysis.hpp"
#include "hdcam/block_memory.hpp"
#include "hdcam/bounds.hpp"
#include "hdcam/codebook.hpp"
#include "hdcam/config.hpp"
#include "hdcam/csv.hpp"
#include "hdcam/error.hpp"
#include "hdcam/galois.hpp"
#include "hdcam/graph.hpp"
#include "hdcam/hash.hpp"
#include "hdcam/rescue.hpp"
#include "hdcam/search.hpp"
#include "hdcam/trace_io.hpp"

namespace hdcam {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kRescueSeedSalt = 0x7265736375650001ULL;

void emit(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_json(path, j);
  }
}

const std::string& require(const std::string& value, const char* key) {
  if (value.empty()) throw ConfigError(std::string("missing required setting '") + key + "'");
  return value;
}

std::string rescue_path(const RunConfig& c) {
  return c.rescue.empty() ? c.snapshot + ".rescue" : c.rescue;
}

json stats_json(const CollisionStats& s) {
  json j;
  j["learns"] = s.learns;
  j["write_attempts"] = s.write_attempts;
  j["flagged_attempts"] = s.flagged_attempts;
  j["flagged_cells"] = s.flagged_cells;
  j["total_cells"] = s.total_cells;
  j["location_rate"] = round9(s.location_rate());
  j["count_rate"] = round9(s.count_rate());
  return j;
}

json tally_json(const std::vector<VoteTally>& t) {
  auto arr = json::array();
  for (const auto& v : t) arr.push_back({{"node", v.node}, {"votes", v.votes}});
  return arr;
}

// ---------------------------------------------------------------------------

void cmd_gen_dag(RunConfig& c, std::ostream& out) {
  DagSpec spec;
  spec.nodes = c.nodes;
  spec.max_out = c.max_out;
  spec.depth = c.depth;
  spec.seed = c.seed;
  spec.mutual_pairs = c.mutual_pairs;
  spec.starts = c.start_count;
  DagFixture fx = generate_dag(spec);
  std::string edges = c.out_edges.empty() ? "edges.csv" : c.out_edges;
  std::string preds = c.out_predicates.empty() ? "predicates.csv" : c.out_predicates;
  std::string starts = c.out_starts.empty() ? "starts.txt" : c.out_starts;
  write_edges(edges, fx.edges);
  write_predicates(preds, fx.predicates);
  write_lines(starts, fx.starts);
  json j;
  j["nodes"] = spec.nodes;
  j["edges"] = fx.edges.size();
  j["planted_mutual_pairs"] = fx.planted_reverse.size();
  j["starts"] = fx.starts.size();
  j["predicate_rows"] = fx.predicates.size();
  emit(j, c.report, out);
}

void cmd_ingest(RunConfig& c, std::ostream& out) {
  EdgeList edges = ingest_edges(require(c.edges, "edges"));
  AdjacencyIndex adj(edges.edges);
  json j;
  j["rows"] = edges.rows;
  j["edges"] = edges.edges.size();
  j["duplicates"] = edges.duplicates;
  j["nodes"] = adj.node_count();
  if (!c.predicates.empty()) {
    PredicateTable t = ingest_predicates(c.predicates);
    j["predicate_rows"] = t.rows;
    j["predicate_nodes"] = t.nodes.size();
    j["unknown_predicates"] = t.unknown_predicates;
  }
  emit(j, c.report, out);
}

void cmd_purify(RunConfig& c, std::ostream& out) {
  EdgeList edges = ingest_edges(require(c.edges, "edges"));
  auto [kept, report] = purify_dag(edges);
  write_edges(c.out.empty() ? "purified.csv" : c.out, kept.edges);
  json j = report.to_json();
  j["duplicates"] = edges.duplicates;
  emit(j, c.report, out);
}

void cmd_learn(RunConfig& c, std::ostream& out) {
  c.validate();
  EdgeList edges = ingest_edges(require(c.edges, "edges"));
  require(c.snapshot, "snapshot");
  AdjacencyIndex adj(edges.edges);
  DiffuserBank bank(c.seed, c.blocks, c.depth_exp, c.segment_size());
  TokenCodebook codebook(c.seed, c.dim);
  BlockMemory memory(c.blocks, c.depth_exp, c.dim, c.seed);
  std::unique_ptr<RescueBuffer> buffer;
  if (c.rr > 0.0) buffer = std::make_unique<RescueBuffer>(c.blocks, bank.segment_bytes());
  std::size_t learned = learn_graph(memory, adj, codebook, bank, buffer.get());
  memory.finalize();
  memory.save(c.snapshot);
  json j;
  j["learned_edges"] = learned;
  j["labels"] = memory.labels().size();
  j["storage"] = memory.storage() == StorageKind::dense ? "dense" : "sparse";
  j["collisions"] = stats_json(memory.stats());
  if (buffer) {
    RescueTable table = finalize(*buffer, c.rr, hash_pair(c.seed, kRescueSeedSalt));
    table.save(rescue_path(c));
    j["rescue_entries"] = table.total_entries();
  }
  if (!c.codebook_out.empty()) codebook.save(c.codebook_out);
  emit(j, c.report, out);
}

struct Loaded {
  BlockMemory memory;
  std::unique_ptr<DiffuserBank> bank;
  std::unique_ptr<TokenCodebook> codebook;
  std::unique_ptr<RescueTable> rescue;
};

Loaded load_learned(const RunConfig& c, bool want_rescue) {
  Loaded l{BlockMemory::load(require(c.snapshot, "snapshot")), nullptr, nullptr, nullptr};
  const BlockMemory& m = l.memory;
  l.bank = std::make_unique<DiffuserBank>(m.master_seed(), m.blocks(), m.depth_bits(),
                                          m.dimension() / m.blocks());
  l.codebook = std::make_unique<TokenCodebook>(m.master_seed(), m.dimension());
  if (want_rescue) {
    std::string p = rescue_path(c);
    if (!std::filesystem::exists(p)) {
      throw IoError("rescue mode needs a rescue table at " + p + " (learn with rr > 0)");
    }
    l.rescue = std::make_unique<RescueTable>(RescueTable::load(p));
  }
  return l;
}

void cmd_trace(RunConfig& c, std::ostream& out) {
  SearchConfig sc = c.search();
  sc.validate();
  Loaded l = load_learned(c, c.mode == SearchMode::rescue);
  AdjacencyIndex adj(ingest_edges(require(c.edges, "edges")).edges);
  std::vector<std::string> starts = read_lines(require(c.starts, "starts"));
  LearnedMemory lm{l.memory, *l.bank, *l.codebook, l.rescue.get()};
  TraceResult r = trace(lm, starts, sc, out_degrees(adj));
  write_records(c.out.empty() ? "records.csv" : c.out, r.records);
  json s = summary_json(r.generations);
  if (!c.summary.empty()) write_json(c.summary, s);
  json j;
  j["records"] = r.records.size();
  j["generations"] = r.generations.size();
  emit(j, c.report, out);
}

void cmd_oracle(RunConfig& c, std::ostream& out) {
  SearchConfig sc = c.search();
  sc.validate();
  AdjacencyIndex adj(ingest_edges(require(c.edges, "edges")).edges);
  std::vector<std::string> starts = read_lines(require(c.starts, "starts"));
  TraceResult r = oracle_trace(adj, starts, sc);
  write_records(c.out.empty() ? "oracle.csv" : c.out, r.records);
  if (!c.summary.empty()) write_json(c.summary, summary_json(r.generations));
  json j;
  j["records"] = r.records.size();
  j["generations"] = r.generations.size();
  emit(j, c.report, out);
}

void cmd_compare(RunConfig& c, std::ostream& out) {
  auto a = read_records(require(c.a, "a"));
  auto b = read_records(require(c.b, "b"));
  emit(divergence_json(compare_traces(a, b, c.top_k)), c.out, out);
}

void write_bars(const std::string& path, const std::vector<TrafficProfile>& profiles) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  for (const auto& p : profiles) {
    os << "# hub " << p.node << '\n';
    for (std::size_t k = 0; k < p.up_counts.size(); ++k) {
      os << "up " << (k + 1) << ' ' << p.up_counts[k] << '\n';
    }
    for (std::size_t k = 0; k < p.down_counts.size(); ++k) {
      os << "down " << (k + 1) << ' ' << p.down_counts[k] << '\n';
    }
  }
  if (!os) throw IoError("write failed: " + path);
}

json optional_json(const std::optional<double>& v) {
  return v ? json(round9(*v)) : json(nullptr);
}

void cmd_analyze(RunConfig& c, std::ostream& out) {
  if (c.dim == 0 || c.dim % 8 != 0) throw ConfigError("dim must be a positive multiple of 8");
  if (c.concept_members.empty()) throw ConfigError("missing required setting 'concept_members'");
  auto records = read_records(require(c.records, "records"));
  PredicateTable preds = ingest_predicates(require(c.predicates, "predicates"));
  TokenCodebook codebook(c.seed, c.dim);
  ConceptVector concept_vec = make_concept(c.concept_name, c.concept_members, codebook);

  auto rows = giant_table(records, preds, concept_vec, c.role, codebook);
  {
    std::ofstream os(c.out_giant.empty() ? "giant.csv" : c.out_giant,
                     std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open giant-score output");
    os << "node,s,s_hat,t_hat,g,paths\n";
    for (const auto& r : rows) {
      write_csv_row(os, {r.node, format_fixed(r.s), format_fixed(r.s_hat), format_fixed(r.t_hat),
                         format_fixed(r.g), std::to_string(r.paths)});
    }
    if (!os) throw IoError("write failed: giant-score output");
  }

  std::set<std::string> traced;
  for (const auto& r : records) {
    traced.insert(r.start);
    traced.insert(r.node);
  }
  std::vector<NodeVector> nvs;
  for (const auto& n : traced) nvs.push_back(build_node_vector(n, preds, codebook));

  json j;
  j["records"] = records.size();
  j["nodes"] = traced.size();
  std::size_t max_paths = 0;
  for (const auto& r : rows) max_paths = std::max(max_paths, r.paths);
  j["max_paths"] = max_paths;
  auto giant = json::array();
  for (std::size_t i = 0; i < std::min(rows.size(), c.top_k); ++i) {
    const auto& r = rows[i];
    giant.push_back({{"node", r.node}, {"s", round9(r.s)}, {"g", round9(r.g)}, {"paths", r.paths}});
  }
  j["giant_top"] = std::move(giant);

  long long lo = 0;
  long long hi = 0;
  bool any = false;
  for (const auto& nv : nvs) {
    if (auto e = node_era(preds, nv.node, c.era_field)) {
      lo = any ? std::min(lo, *e) : *e;
      hi = any ? std::max(hi, *e) : *e;
      any = true;
    }
  }
  auto windows_json = json::array();
  if (any || (c.windows_start && c.windows_end)) {
    long long w = c.window_width;
    long long first = c.windows_start.value_or(lo - (((lo % w) + w) % w));
    long long last = c.windows_end.value_or(hi + 1);
    auto windows = make_windows(first, last, w);
    const Hypervector& token = codebook.get(c.concept_members.front());
    for (const auto& s : window_signal(nvs, preds, windows, token, c.role, c.era_field, codebook)) {
      windows_json.push_back({{"start", s.window.start},
                              {"end", s.window.end},
                              {"members", s.members},
                              {"similarity", optional_json(s.similarity)},
                              {"delta", optional_json(s.delta)}});
    }
  }
  j["window_token"] = c.concept_members.front();
  j["windows"] = std::move(windows_json);

  std::vector<std::string> hubs = c.hubs;
  if (hubs.empty() && !rows.empty()) hubs.push_back(rows.front().node);
  std::vector<TrafficProfile> profiles;
  auto profiles_json = json::array();
  for (const auto& h : hubs) {
    profiles.push_back(traffic_profile(records, h, c.up_gens, c.down_gens));
    const auto& p = profiles.back();
    profiles_json.push_back({{"node", p.node},
                             {"present", p.present},
                             {"up_counts", p.up_counts},
                             {"down_counts", p.down_counts},
                             {"up_mean", round9(p.up_mean)},
                             {"down_mean", round9(p.down_mean)},
                             {"thickness_ratio", optional_json(p.thickness_ratio)}});
  }
  j["profiles"] = std::move(profiles_json);
  if (!c.out_bars.empty()) write_bars(c.out_bars, profiles);

  if (c.pivot) {
    ParadigmIndicators ind = paradigm_indicators(nvs, preds, *c.pivot, c.era_field, codebook);
    j["indicators"] = {{"pivot", *c.pivot},
                       {"pre_nodes", ind.pre_nodes},
                       {"post_nodes", ind.post_nodes},
                       {"society_explosion", optional_json(ind.society_explosion)},
                       {"hub_diversification", optional_json(ind.hub_diversification)},
                       {"field_continuity", optional_json(ind.field_continuity)},
                       {"language_continuity", optional_json(ind.language_continuity)},
                       {"employer_continuity", optional_json(ind.employer_continuity)},
                       {"language_entropy_pre", optional_json(ind.language_entropy_pre)},
                       {"language_entropy_post", optional_json(ind.language_entropy_post)},
                       {"field_entropy_post", optional_json(ind.field_entropy_post)}};
  }

  double mean_cr1 = 1.0;
  std::uint32_t max_gen = 0;
  if (!records.empty()) {
    double sum = 0.0;
    for (const auto& r : records) {
      sum += r.cr1;
      max_gen = std::max(max_gen, r.generation);
    }
    mean_cr1 = sum / static_cast<double>(records.size());
  }
  if (mean_cr1 > 0.0) j["bounds"] = bounds(c.blocks, c.depth_exp, mean_cr1, max_gen).to_json();
  emit(j, c.out_json, out);
}

void cmd_sweep(RunConfig& c, std::ostream& out) {
  SearchConfig sc = c.search();
  sc.validate();
  check_rescue_rate(c.rr);
  std::vector<SweepPoint> points = c.sweep.empty() ? default_sweep() : c.sweep;
  const std::size_t q = c.segment_bits.value_or(c.segment_size());
  if (q == 0) throw ConfigError("segment_bits must be positive");
  AdjacencyIndex adj(ingest_edges(require(c.edges, "edges")).edges);
  std::vector<std::string> starts = read_lines(require(c.starts, "starts"));

  long double capacity = 0;
  auto rows = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& pt = points[i];
    long double cap = static_cast<long double>(pt.blocks) * std::ldexp(1.0L, pt.depth_bits);
    if (i == 0) capacity = cap;
    if (cap != capacity) throw ConfigError("sweep points must share B * 2^m");
    const std::size_t dim = q * pt.blocks;
    if (dim % 8 != 0) throw ConfigError("sweep: B * segment_bits must be a multiple of 8");
    DiffuserBank bank(c.seed, pt.blocks, pt.depth_bits, q);
    TokenCodebook codebook(c.seed, dim);
    BlockMemory memory(pt.blocks, pt.depth_bits, dim, c.seed);
    std::unique_ptr<RescueBuffer> buffer;
    if (c.rr > 0.0) buffer = std::make_unique<RescueBuffer>(pt.blocks, bank.segment_bytes());
    learn_graph(memory, adj, codebook, bank, buffer.get());
    memory.finalize();
    std::unique_ptr<RescueTable> table;
    if (buffer) {
      table = std::make_unique<RescueTable>(
          finalize(*buffer, c.rr, hash_pair(c.seed, kRescueSeedSalt)));
      buffer.reset();
    }
    LearnedMemory lm{memory, bank, codebook, table.get()};
    TraceResult r = trace(lm, starts, sc, out_degrees(adj));
    json row;
    row["B"] = pt.blocks;
    row["m"] = pt.depth_bits;
    row["L"] = dim;
    row["collisions"] = stats_json(memory.stats());
    row["records"] = r.records.size();
    row["top"] = tally_json(top_k(vote_tally(r.records), c.top_k));
    auto traj = json::array();
    for (const auto& g : r.generations) {
      traj.push_back({{"generation", g.generation},
                      {"mean_cr1", round9(g.mean_cr1)},
                      {"mean_cr2", round9(g.mean_cr2)},
                      {"frontier_size", g.frontier_size}});
    }
    row["trajectory"] = std::move(traj);
    rows.push_back(std::move(row));
  }
  json j;
  j["capacity_log2"] = static_cast<double>(std::log2(capacity));
  j["segment_bits"] = q;
  j["configs"] = std::move(rows);
  emit(j, c.out, out);
}

void cmd_bounds(RunConfig& c, std::ostream& out) {
  BoundsReport r = c.address_space
                       ? bounds_for_address_space(c.blocks, *c.address_space, c.cr1, c.gens)
                       : bounds(c.blocks, c.depth_exp, c.cr1, c.gens);
  emit(r.to_json(), c.out, out);
}

// ---------------------------------------------------------------------------

struct Command {
  const char* name;
  const char* help;
  std::vector<std::string> keys;
  std::function<void(RunConfig&, std::ostream&)> run;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> kCommands = {
      {"gen-dag", "write a synthetic layered DAG fixture",
       {"nodes", "max_out", "depth", "mutual_pairs", "start_count", "out_edges", "out_predicates",
        "out_starts", "report"},
       cmd_gen_dag},
      {"ingest", "parse edge and predicate files and report counts",
       {"edges", "predicates", "report"},
       cmd_ingest},
      {"purify", "remove mutual edge pairs",
       {"edges", "out", "report"},
       cmd_purify},
      {"learn", "write the graph into a block memory snapshot",
       {"dim", "blocks", "depth_exp", "rr", "edges", "snapshot", "rescue", "codebook_out",
        "report"},
       cmd_learn},
      {"trace", "frontier-bounded mentor traversal over a snapshot",
       {"snapshot", "rescue", "rr", "edges", "starts", "fs", "max_depth", "cr2_halt", "mode",
        "prune_order", "out", "summary", "report"},
       cmd_trace},
      {"oracle", "map-based reference traversal",
       {"edges", "starts", "fs", "max_depth", "out", "summary", "report"},
       cmd_oracle},
      {"compare", "divergence between two record files",
       {"a", "b", "top_k", "out"},
       cmd_compare},
      {"analyze", "giant scores, window signals, traffic profiles, indicators",
       {"dim", "blocks", "depth_exp", "records", "predicates", "concept", "concept_members",
        "role", "era_field", "windows_start", "windows_end", "window_width", "hubs", "up_gens",
        "down_gens", "pivot", "top_k", "out_giant", "out_json", "out_bars"},
       cmd_analyze},
      {"sweep", "learn and trace over (B, m) pairs of equal capacity",
       {"sweep", "segment_bits", "rr", "edges", "starts", "fs", "max_depth", "cr2_halt", "mode",
        "prune_order", "top_k", "out"},
       cmd_sweep},
      {"bounds", "Chernoff, Poisson and CR2 decay figures",
       {"blocks", "depth_exp", "address_space", "cr1", "gens", "out"},
       cmd_bounds},
  };
  return kCommands;
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return 1;
    case ErrorKind::io: return 2;
    case ErrorKind::domain: return 3;
  }
  return 3;
}

void report_error(std::ostream& err, const std::string& name, int code,
                  const std::string& message) {
  static const char* const kKinds[] = {"", "config", "io", "domain"};
  json j;
  j["error"] = name;
  j["kind"] = kKinds[code];
  j["exit_code"] = code;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hdcam: block-partitioned hypervector associative memory toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  struct Bound {
    std::string key;
    CLI::Option* opt;
    std::string value;
  };
  std::map<std::string, std::vector<std::unique_ptr<Bound>>> bound;
  std::map<std::string, std::string> config_file;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_file[cmd.name], "key = value config file");
    std::vector<std::string> keys = cmd.keys;
    for (const char* common : {"seed", "threads"}) keys.emplace_back(common);
    for (const auto& key : keys) {
      auto b = std::make_unique<Bound>();
      b->key = key;
      b->opt = sub->add_option("--" + dashed(key), b->value);
      bound[cmd.name].push_back(std::move(b));
    }
  }

  std::vector<std::string> argv_store = args;
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "config", 1, e.what());
    return 1;
  }

  for (const auto& cmd : commands()) {
    CLI::App* sub = app.get_subcommand(cmd.name);
    if (!sub->parsed()) continue;
    try {
      RunConfig cfg;
      if (!config_file[cmd.name].empty()) cfg.load_file(config_file[cmd.name]);
      if (const char* env = std::getenv("VACOAL_SEED"); env != nullptr && *env != '\0') {
        cfg.set("seed", env);
      }
      for (const auto& b : bound[cmd.name]) {
        if (b->opt->count() > 0) cfg.set(b->key, b->value);
      }
      if (cfg.threads == 0) throw ConfigError("threads must be at least 1");
      cmd.run(cfg, out);
      return 0;
    } catch (const Error& e) {
      int code = exit_code(e.kind());
      report_error(err, e.name(), code, e.what());
      return code;
    } catch (const nlohmann::json::exception& e) {
      report_error(err, "format", 2, e.what());
      return 2;
    } catch (const std::bad_alloc&) {
      report_error(err, "capacity", 3, "out of memory");
      return 3;
    }
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace hdcam
