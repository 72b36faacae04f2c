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

#include "hdcam/search.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>
#include <unordered_map>

#include "hdcam/error.hpp"
#include "hdcam/parallel.hpp"

namespace hdcam {

PruneOrder SearchConfig::effective_order() const {
  if (mode == SearchMode::rescue) return PruneOrder::lexicographic;
  return prune_order.value_or(PruneOrder::descending_cr2);
}

void SearchConfig::validate() const {
  if (fs < 1) throw ConfigError("fs must be at least 1");
  if (!(cr2_halt >= 0.0 && cr2_halt < 1.0)) {
    throw ConfigError("cr2_halt must lie in [0, 1)");
  }
}

OutDegreeMap out_degrees(const AdjacencyIndex& adjacency) {
  OutDegreeMap out;
  for (const auto& [node, mentors] : adjacency.map()) out.emplace(node, mentors.size());
  return out;
}

std::string ordinal_token_name(std::size_t j) { return "__ord__" + std::to_string(j); }

Hypervector ordinal_key(TokenCodebook& codebook, const std::string& node, std::size_t j) {
  return bind(codebook.get(node), codebook.get(ordinal_token_name(j)));
}

std::size_t learn_graph(BlockMemory& memory, const AdjacencyIndex& adjacency,
                        TokenCodebook& codebook, const DiffuserBank& bank,
                        RescueBuffer* rescue) {
  std::size_t learned = 0;
  for (const auto& [student, mentors] : adjacency.map()) {
    for (std::size_t j = 0; j < mentors.size(); ++j) {
      memory.learn(ordinal_key(codebook, student, j), mentors[j], bank, rescue);
      ++learned;
    }
  }
  return learned;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct Entry {
  std::uint32_t node;
  std::uint32_t parent;  // arena index, kNone for the start
  double cr2;
};

struct Candidate {
  std::uint32_t node;
  std::uint32_t parent_entry;
  std::uint32_t parent_node;
  double cr1;
  double cr2;
};

struct Outcome {
  std::uint32_t mentor = kNone;  // node index of the winning label
  double cr1 = 0.0;
  std::uint32_t dont_care = 0;
};

// Per-generation accumulator shared across starts.
struct GenAccumulator {
  GenerationSummary s;
  double sum_cr1 = 0.0;
  double sum_cr2 = 0.0;
  std::size_t records = 0;
};

void accumulate(std::vector<GenAccumulator>& gens, std::uint32_t generation,
                std::size_t queries, std::size_t failed, std::uint64_t dc,
                const std::vector<Candidate>& kept) {
  if (gens.size() <= generation) gens.resize(generation + 1);
  GenAccumulator& g = gens[generation];
  g.s.generation = generation;
  g.s.queries += queries;
  g.s.failed_queries += failed;
  g.s.dont_care_blocks += dc;
  g.s.frontier_size += kept.size();
  for (const auto& c : kept) {
    if (g.records == 0 || c.cr2 < g.s.min_cr2) g.s.min_cr2 = c.cr2;
    g.sum_cr1 += c.cr1;
    g.sum_cr2 += c.cr2;
    ++g.records;
  }
}

std::vector<GenerationSummary> finish(std::vector<GenAccumulator>& gens) {
  std::vector<GenerationSummary> out;
  for (std::size_t i = 1; i < gens.size(); ++i) {
    GenAccumulator& g = gens[i];
    if (g.records > 0) {
      g.s.mean_cr1 = g.sum_cr1 / static_cast<double>(g.records);
      g.s.mean_cr2 = g.sum_cr2 / static_cast<double>(g.records);
    }
    g.s.generation = static_cast<std::uint32_t>(i);
    out.push_back(g.s);
  }
  return out;
}

}  // namespace

TraceResult trace(const LearnedMemory& learned, const std::vector<std::string>& starts,
                  const SearchConfig& config, const OutDegreeMap& degrees) {
  config.validate();
  if (!learned.memory.finalized()) throw StateError("trace requires a finalized memory");
  learned.memory.check_bank(learned.bank);

  std::vector<std::string> unknown;
  for (const auto& s : starts) {
    if (degrees.count(s) == 0) unknown.push_back(s);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    throw UnknownNodeError("unknown start node(s): " + list);
  }

  // Node indices follow byte order of ids, so index comparisons are
  // lexicographic comparisons.
  std::vector<std::string> names;
  std::vector<std::size_t> degree;
  std::unordered_map<std::string, std::uint32_t> index;
  names.reserve(degrees.size());
  for (const auto& [node, d] : degrees) {
    index.emplace(node, static_cast<std::uint32_t>(names.size()));
    names.push_back(node);
    degree.push_back(d);
  }
  const auto& labels = learned.memory.labels();
  std::vector<std::uint32_t> label_node(labels.size(), kNone);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    auto it = index.find(labels.labels()[t]);
    if (it != index.end()) label_node[t] = it->second;
  }

  const bool use_rescue = config.mode == SearchMode::rescue && learned.rescue != nullptr;
  const PruneOrder order = config.effective_order();

  auto evaluate = [&](std::uint32_t node, std::size_t j) {
    Hypervector key = ordinal_key(learned.codebook, names[node], j);
    VoteResult v = use_rescue
                       ? vote_with_rescue(learned.memory, *learned.rescue, key, learned.bank)
                       : learned.memory.vote(key, learned.bank);
    Outcome o;
    o.cr1 = v.cr1;
    o.dont_care = v.dont_care_blocks;
    if (v.winner) o.mentor = label_node[static_cast<std::size_t>(*v.winner)];
    return o;
  };

  // Memory is read-only here, so a (node, ordinal) query always returns the
  // same outcome and can be shared across paths and starts.
  std::unordered_map<std::uint64_t, Outcome> memo;
  auto memo_key = [](std::uint32_t node, std::size_t j) {
    return (static_cast<std::uint64_t>(node) << 32) | static_cast<std::uint64_t>(j);
  };

  TraceResult result;
  std::vector<GenAccumulator> gens;
  std::vector<Entry> arena;
  std::vector<std::uint32_t> frontier;
  std::vector<Candidate> candidates;
  std::vector<std::uint64_t> pending;

  for (const auto& start : starts) {
    arena.clear();
    frontier.clear();
    arena.push_back(Entry{index.at(start), kNone, 1.0});
    frontier.push_back(0);

    for (std::size_t gen = 0; gen < config.max_depth && !frontier.empty(); ++gen) {
      pending.clear();
      for (std::uint32_t e : frontier) {
        std::uint32_t node = arena[e].node;
        for (std::size_t j = 0; j < degree[node]; ++j) {
          std::uint64_t k = memo_key(node, j);
          if (memo.find(k) == memo.end()) {
            memo.emplace(k, Outcome{});
            pending.push_back(k);
          }
        }
      }
      std::vector<Outcome> fresh(pending.size());
      parallel_for(pending.size(), config.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          fresh[i] = evaluate(static_cast<std::uint32_t>(pending[i] >> 32),
                              static_cast<std::size_t>(pending[i] & 0xFFFFFFFFu));
        }
      });
      for (std::size_t i = 0; i < pending.size(); ++i) memo[pending[i]] = fresh[i];

      candidates.clear();
      std::size_t queries = 0;
      std::size_t failed = 0;
      std::uint64_t dc = 0;
      for (std::uint32_t e : frontier) {
        const Entry entry = arena[e];
        for (std::size_t j = 0; j < degree[entry.node]; ++j) {
          const Outcome& o = memo.at(memo_key(entry.node, j));
          ++queries;
          dc += o.dont_care;
          if (o.mentor == kNone) {
            ++failed;
            continue;
          }
          bool cycle = false;
          for (std::uint32_t a = e; a != kNone; a = arena[a].parent) {
            if (arena[a].node == o.mentor) {
              cycle = true;
              break;
            }
          }
          if (cycle) continue;
          double cr2 = entry.cr2 * o.cr1;
          if (cr2 < config.cr2_halt) continue;
          candidates.push_back(Candidate{o.mentor, e, entry.node, o.cr1, cr2});
        }
      }

      if (order == PruneOrder::descending_cr2) {
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& x, const Candidate& y) {
                           if (x.cr2 != y.cr2) return x.cr2 > y.cr2;
                           if (x.node != y.node) return x.node < y.node;
                           return x.parent_node < y.parent_node;
                         });
      } else {
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& x, const Candidate& y) {
                           if (x.node != y.node) return x.node < y.node;
                           return x.parent_node < y.parent_node;
                         });
      }
      if (candidates.size() > config.fs) candidates.resize(config.fs);

      accumulate(gens, static_cast<std::uint32_t>(gen + 1), queries, failed, dc, candidates);
      frontier.clear();
      for (const auto& c : candidates) {
        frontier.push_back(static_cast<std::uint32_t>(arena.size()));
        arena.push_back(Entry{c.node, c.parent_entry, c.cr2});
        result.records.push_back(PathRecord{start, static_cast<std::uint32_t>(gen + 1),
                                            names[c.node], names[c.parent_node], c.cr1,
                                            c.cr2});
      }
    }
  }
  result.generations = finish(gens);
  return result;
}

TraceResult oracle_trace(const AdjacencyIndex& adjacency,
                         const std::vector<std::string>& starts,
                         const SearchConfig& config) {
  config.validate();
  std::vector<std::string> unknown;
  for (const auto& s : starts) {
    if (!adjacency.contains(s)) unknown.push_back(s);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    throw UnknownNodeError("unknown start node(s): " + list);
  }

  struct Path {
    std::vector<std::string> nodes;
  };
  struct Child {
    std::string node;
    std::string parent;
    std::size_t from;
  };

  TraceResult result;
  std::map<std::uint32_t, GenerationSummary> gens;
  for (const auto& start : starts) {
    std::vector<Path> frontier{Path{{start}}};
    for (std::size_t gen = 0; gen < config.max_depth && !frontier.empty(); ++gen) {
      std::vector<Child> children;
      std::size_t queries = 0;
      for (std::size_t p = 0; p < frontier.size(); ++p) {
        const auto& path = frontier[p].nodes;
        for (const auto& mentor : adjacency.mentors(path.back())) {
          ++queries;
          if (std::find(path.begin(), path.end(), mentor) != path.end()) continue;
          children.push_back(Child{mentor, path.back(), p});
        }
      }
      std::stable_sort(children.begin(), children.end(),
                       [](const Child& x, const Child& y) {
                         if (x.node != y.node) return x.node < y.node;
                         return x.parent < y.parent;
                       });
      if (children.size() > config.fs) children.resize(config.fs);

      std::vector<Path> next;
      next.reserve(children.size());
      auto g = static_cast<std::uint32_t>(gen + 1);
      GenerationSummary& s = gens[g];
      s.generation = g;
      s.queries += queries;
      s.frontier_size += children.size();
      for (const auto& c : children) {
        Path p = frontier[c.from];
        p.nodes.push_back(c.node);
        next.push_back(std::move(p));
        result.records.push_back(PathRecord{start, g, c.node, c.parent, 1.0, 1.0});
      }
      if (!children.empty()) {
        s.mean_cr1 = 1.0;
        s.mean_cr2 = 1.0;
        s.min_cr2 = 1.0;
      }
      frontier = std::move(next);
    }
  }
  for (auto& [g, s] : gens) result.generations.push_back(s);
  return result;
}

std::map<std::string, std::size_t> vote_tally(const std::vector<PathRecord>& records) {
  std::map<std::string, std::size_t> votes;
  for (const auto& r : records) votes[r.node]++;
  return votes;
}

std::vector<VoteTally> top_k(const std::map<std::string, std::size_t>& votes, std::size_t k) {
  std::vector<VoteTally> all;
  all.reserve(votes.size());
  for (const auto& [node, n] : votes) all.push_back(VoteTally{node, n});
  std::stable_sort(all.begin(), all.end(), [](const VoteTally& x, const VoteTally& y) {
    return x.votes > y.votes;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

DivergenceReport compare_traces(const std::vector<PathRecord>& a,
                                const std::vector<PathRecord>& b, std::size_t k) {
  using Key = std::tuple<std::string, std::uint32_t, std::string, std::string>;
  struct Bag {
    std::size_t count = 0;
    std::vector<std::pair<double, double>> crs;
  };
  auto collect = [](const std::vector<PathRecord>& rs) {
    std::map<Key, Bag> m;
    for (const auto& r : rs) {
      Bag& bag = m[Key{r.start, r.generation, r.node, r.parent}];
      bag.count++;
      bag.crs.emplace_back(r.cr1, r.cr2);
    }
    return m;
  };
  auto ma = collect(a);
  auto mb = collect(b);

  DivergenceReport rep;
  rep.records_a = a.size();
  rep.records_b = b.size();
  for (auto& [key, bag] : ma) {
    auto it = mb.find(key);
    std::size_t other = it == mb.end() ? 0 : it->second.count;
    if (bag.count > other) rep.only_a += bag.count - other;
    if (it != mb.end()) {
      auto& x = bag.crs;
      auto& y = it->second.crs;
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (x[i] != y[i]) ++rep.cr_mismatches;
      }
    }
  }
  for (const auto& [key, bag] : mb) {
    auto it = ma.find(key);
    std::size_t other = it == ma.end() ? 0 : it->second.count;
    if (bag.count > other) rep.only_b += bag.count - other;
  }
  rep.symmetric_difference = rep.only_a + rep.only_b;

  rep.votes_a = vote_tally(a);
  rep.votes_b = vote_tally(b);
  std::size_t inter = 0;
  for (const auto& [node, n] : rep.votes_a) inter += rep.votes_b.count(node);
  std::size_t uni = rep.votes_a.size() + rep.votes_b.size() - inter;
  rep.jaccard = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  rep.top_a = top_k(rep.votes_a, k);
  rep.top_b = top_k(rep.votes_b, k);
  return rep;
}

}  // namespace hdcam
