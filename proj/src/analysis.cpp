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

#include "hdcam/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <tuple>

#include "hdcam/error.hpp"

namespace hdcam {

NodeVector build_node_vector(const std::string& node, const PredicateTable& predicates,
                             TokenCodebook& codebook) {
  std::vector<Hypervector> pairs;
  auto it = predicates.nodes.find(node);
  if (it != predicates.nodes.end()) {
    for (const auto& [pred, values] : it->second) {
      for (const auto& v : values) pairs.push_back(bind(codebook.get(pred), codebook.get(v)));
    }
  }
  if (pairs.empty()) return NodeVector{node, codebook.get(node)};
  return NodeVector{node, bundle(pairs, codebook.tiebreak())};
}

ConceptVector make_concept(const std::string& name, const std::vector<std::string>& members,
                           TokenCodebook& codebook) {
  if (members.empty()) throw EmptyInputError("concept '" + name + "' has no member tokens");
  std::vector<const Hypervector*> hvs;
  for (const auto& m : members) hvs.push_back(&codebook.get(m));
  return ConceptVector{name, members, bundle(hvs, codebook.tiebreak())};
}

double field_affinity(const Hypervector& node_hv, const ConceptVector& concept_vec,
                      const std::string& role, TokenCodebook& codebook) {
  if (concept_vec.members.empty()) {
    throw EmptyInputError("concept '" + concept_vec.name + "' has no member tokens");
  }
  Hypervector filler = unbind_role(node_hv, codebook.get(role));
  double best = 0.0;
  for (const auto& m : concept_vec.members) {
    best = std::max(best, similarity(filler, codebook.get(m)));
  }
  return best;
}

GiantScoreRow giant_score(double s, std::size_t paths, std::size_t max_paths) {
  if (max_paths == 0) throw NormalizationError("giant_score: max_paths is zero");
  if (paths > max_paths) throw NormalizationError("giant_score: paths exceed max_paths");
  GiantScoreRow r;
  r.s = s;
  r.paths = paths;
  r.s_hat = std::max(s - 0.5, 0.0) * 10.0;
  r.t_hat = static_cast<double>(paths) / static_cast<double>(max_paths);
  r.g = r.s_hat * r.t_hat;
  return r;
}

std::map<std::string, std::size_t> path_counts(const std::vector<PathRecord>& records) {
  std::map<std::string, std::set<std::string>> starts;
  for (const auto& r : records) starts[r.node].insert(r.start);
  std::map<std::string, std::size_t> out;
  for (const auto& [node, s] : starts) out.emplace(node, s.size());
  return out;
}

std::vector<GiantScoreRow> giant_table(const std::vector<PathRecord>& records,
                                       const PredicateTable& predicates,
                                       const ConceptVector& concept_vec,
                                       const std::string& role, TokenCodebook& codebook) {
  auto counts = path_counts(records);
  std::vector<GiantScoreRow> rows;
  if (counts.empty()) return rows;
  std::size_t max_paths = 0;
  for (const auto& [node, n] : counts) max_paths = std::max(max_paths, n);
  for (const auto& [node, n] : counts) {
    NodeVector nv = build_node_vector(node, predicates, codebook);
    GiantScoreRow row = giant_score(field_affinity(nv.hv, concept_vec, role, codebook), n,
                                    max_paths);
    row.node = node;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const GiantScoreRow& a, const GiantScoreRow& b) {
    return a.g > b.g;
  });
  return rows;
}

TrafficProfile traffic_profile(const std::vector<PathRecord>& records, const std::string& node,
                               std::size_t up_gens, std::size_t down_gens) {
  TrafficProfile prof;
  prof.node = node;
  prof.up_counts.assign(up_gens, 0);
  prof.down_counts.assign(down_gens, 0);

  // Vertex = (start, generation, node). Generation 0 is the start itself.
  using Vertex = std::tuple<std::string, std::uint32_t, std::string>;
  std::map<Vertex, std::set<Vertex>> children;
  std::map<Vertex, std::set<Vertex>> parents;
  std::vector<Vertex> hubs;
  for (const auto& r : records) {
    if (r.generation == 0) continue;
    Vertex child{r.start, r.generation, r.node};
    Vertex parent{r.start, r.generation - 1, r.generation == 1 ? r.start : r.parent};
    children[parent].insert(child);
    parents[child].insert(parent);
    if (r.node == node) hubs.push_back(child);
  }
  std::sort(hubs.begin(), hubs.end());
  hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
  if (hubs.empty()) return prof;
  prof.present = true;

  auto walk = [](const std::vector<Vertex>& seeds, std::map<Vertex, std::set<Vertex>>& links,
                 std::vector<std::size_t>& counts) {
    std::vector<std::set<std::string>> names(counts.size());
    for (const auto& seed : seeds) {
      std::set<Vertex> level{seed};
      for (std::size_t k = 0; k < counts.size() && !level.empty(); ++k) {
        std::set<Vertex> next;
        for (const auto& v : level) {
          auto it = links.find(v);
          if (it != links.end()) next.insert(it->second.begin(), it->second.end());
        }
        for (const auto& v : next) names[k].insert(std::get<2>(v));
        level = std::move(next);
      }
    }
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] = names[k].size();
  };
  walk(hubs, children, prof.up_counts);
  walk(hubs, parents, prof.down_counts);

  auto mean_nonzero = [](const std::vector<std::size_t>& c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t v : c) {
      if (v > 0) {
        sum += static_cast<double>(v);
        ++n;
      }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  };
  prof.up_mean = mean_nonzero(prof.up_counts);
  prof.down_mean = mean_nonzero(prof.down_counts);
  if (prof.up_mean > 0) prof.thickness_ratio = prof.down_mean / prof.up_mean;
  return prof;
}

std::vector<EraWindow> make_windows(long long first, long long last, long long width) {
  if (width <= 0) throw ConfigError("window width must be positive");
  std::vector<EraWindow> out;
  for (long long s = first; s < last; s += width) out.push_back(EraWindow{s, s + width});
  return out;
}

std::optional<long long> node_era(const PredicateTable& predicates, const std::string& node,
                                  const std::string& era_field) {
  const auto* values = predicates.values(node, era_field);
  if (values == nullptr || values->empty()) return std::nullopt;
  const std::string& v = values->front();
  long long year = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), year);
  if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
  return year;
}

std::vector<WindowSignal> window_signal(const std::vector<NodeVector>& node_vectors,
                                        const PredicateTable& predicates,
                                        const std::vector<EraWindow>& windows,
                                        const Hypervector& token, const std::string& role,
                                        const std::string& era_field, TokenCodebook& codebook) {
  std::vector<WindowSignal> out;
  for (const auto& w : windows) {
    WindowSignal sig;
    sig.window = w;
    std::vector<const Hypervector*> members;
    for (const auto& nv : node_vectors) {
      auto era = node_era(predicates, nv.node, era_field);
      if (era && *era >= w.start && *era < w.end) members.push_back(&nv.hv);
    }
    sig.members = members.size();
    if (!members.empty()) {
      Hypervector b = bundle(members, codebook.tiebreak());
      sig.similarity = similarity(unbind_role(b, codebook.get(role)), token);
    }
    if (!out.empty() && out.back().similarity && sig.similarity) {
      sig.delta = *sig.similarity - *out.back().similarity;
    }
    out.push_back(sig);
  }
  return out;
}

double shannon_entropy(const std::map<std::string, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [k, n] : counts) total += n;
  if (total == 0) throw EmptyInputError("shannon_entropy: all counts are zero");
  double h = 0.0;
  for (const auto& [k, n] : counts) {
    if (n == 0) continue;
    double p = static_cast<double>(n) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;
}

double continuity(const Hypervector& pre_bundle, const Hypervector& post_bundle) {
  return similarity(pre_bundle, post_bundle);
}

Hypervector role_bundle(const std::vector<const NodeVector*>& nodes, const std::string& role,
                        TokenCodebook& codebook) {
  std::vector<Hypervector> fillers;
  fillers.reserve(nodes.size());
  const Hypervector& r = codebook.get(role);
  for (const NodeVector* nv : nodes) fillers.push_back(unbind_role(nv->hv, r));
  return bundle(fillers, codebook.tiebreak());
}

ParadigmIndicators paradigm_indicators(const std::vector<NodeVector>& node_vectors,
                                       const PredicateTable& predicates, long long pivot,
                                       const std::string& era_field, TokenCodebook& codebook) {
  std::vector<const NodeVector*> pre;
  std::vector<const NodeVector*> post;
  for (const auto& nv : node_vectors) {
    auto era = node_era(predicates, nv.node, era_field);
    if (!era) continue;
    (*era < pivot ? pre : post).push_back(&nv);
  }
  ParadigmIndicators ind;
  ind.pre_nodes = pre.size();
  ind.post_nodes = post.size();

  auto value_counts = [&](const std::vector<const NodeVector*>& group, const std::string& pred) {
    std::map<std::string, std::size_t> counts;
    for (const NodeVector* nv : group) {
      if (const auto* vs = predicates.values(nv->node, pred)) {
        for (const auto& v : *vs) counts[v]++;
      }
    }
    return counts;
  };
  auto total = [](const std::map<std::string, std::size_t>& c) {
    std::size_t n = 0;
    for (const auto& [k, v] : c) n += v;
    return n;
  };
  auto entropy_or_none = [&](const std::map<std::string, std::size_t>& c) -> std::optional<double> {
    if (total(c) == 0) return std::nullopt;
    return shannon_entropy(c);
  };

  if (!pre.empty() && !post.empty()) {
    double pre_mean = static_cast<double>(total(value_counts(pre, "MEMBER_OF"))) /
                      static_cast<double>(pre.size());
    double post_mean = static_cast<double>(total(value_counts(post, "MEMBER_OF"))) /
                       static_cast<double>(post.size());
    if (pre_mean > 0) ind.society_explosion = post_mean / pre_mean;
    std::size_t pre_hubs = value_counts(pre, "EMPLOYER").size();
    std::size_t post_hubs = value_counts(post, "EMPLOYER").size();
    if (pre_hubs > 0) {
      ind.hub_diversification = static_cast<double>(post_hubs) / static_cast<double>(pre_hubs);
    }
    ind.field_continuity =
        continuity(role_bundle(pre, "FIELD", codebook), role_bundle(post, "FIELD", codebook));
    ind.language_continuity = continuity(role_bundle(pre, "LANGUAGE", codebook),
                                         role_bundle(post, "LANGUAGE", codebook));
    ind.employer_continuity = continuity(role_bundle(pre, "EMPLOYER", codebook),
                                         role_bundle(post, "EMPLOYER", codebook));
  }
  ind.language_entropy_pre = entropy_or_none(value_counts(pre, "LANGUAGE"));
  ind.language_entropy_post = entropy_or_none(value_counts(post, "LANGUAGE"));
  ind.field_entropy_post = entropy_or_none(value_counts(post, "FIELD"));
  return ind;
}

}  // namespace hdcam
