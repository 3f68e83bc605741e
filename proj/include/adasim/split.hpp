#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "adasim/error.hpp"
#include "adasim/graph.hpp"
#include "adasim/rng.hpp"

namespace adasim {

struct LabeledPair {
  NodeId u = 0;
  NodeId v = 0;
  int label = 0;  // 1 = held-out edge, 0 = non-edge

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

struct SplitResult {
  Graph subgraph;
  std::vector<LabeledPair> positives;
  std::vector<LabeledPair> negatives;
  std::uint64_t seed = 0;
  double ratio = 0.0;

  /// positives followed by negatives.
  std::vector<LabeledPair> pairs() const {
    std::vector<LabeledPair> all(positives);
    all.insert(all.end(), negatives.begin(), negatives.end());
    return all;
  }
};

struct SplitOptions {
  // Off only for graphs too sparse to spare any edge (every edge becomes a
  // positive). Walks then truncate at isolated nodes.
  bool protect_forest = true;
};

namespace detail {

inline std::uint64_t pair_key(NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

// Edges eligible for removal: all edges minus the spanning forest, ascending.
inline std::vector<Edge> removable_edges(const Graph& g, bool protect_forest) {
  auto all = g.edges();
  if (!protect_forest) return all;
  auto forest = spanning_forest(g);
  std::sort(forest.begin(), forest.end());
  std::vector<Edge> out;
  out.reserve(all.size() - forest.size());
  std::set_difference(all.begin(), all.end(), forest.begin(), forest.end(), std::back_inserter(out));
  return out;
}

inline std::size_t removal_count(const Graph& g, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(g.edge_count()) * fraction));
}

inline std::vector<Edge> pick_removed(const Graph& g, double fraction, std::uint64_t seed, bool protect_forest,
                                      const char* what) {
  auto candidates = removable_edges(g, protect_forest);
  const std::size_t n = removal_count(g, fraction);
  if (n > candidates.size()) {
    const double max_ratio = static_cast<double>(candidates.size()) / static_cast<double>(g.edge_count());
    std::ostringstream msg;
    msg << what << ": cannot remove " << n << " of " << g.edge_count() << " edges while keeping "
        << "components connected; maximum feasible ratio is " << max_ratio;
    throw InfeasibleRatio(msg.str(), max_ratio);
  }
  Rng rng(seed);
  rng.shuffle(std::span<Edge>(candidates));
  candidates.resize(n);
  return candidates;
}

}  // namespace detail

/// Uniform distinct non-adjacent pairs (u < v), label 0. Rejection sampling,
/// capped at 100·count draws.
inline std::vector<LabeledPair> sample_negatives(const Graph& g, std::size_t count, std::uint64_t seed) {
  std::vector<LabeledPair> out;
  if (count == 0) return out;
  const auto n = static_cast<std::uint64_t>(g.node_count());
  const std::uint64_t possible = n < 2 ? 0 : n * (n - 1) / 2;
  const std::uint64_t available = possible - g.edge_count();
  if (count > available) {
    throw SamplingError("requested " + std::to_string(count) + " non-edges but the graph has only " +
                        std::to_string(available));
  }
  Rng rng(seed);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  out.reserve(count);
  const std::uint64_t max_draws = 100 * static_cast<std::uint64_t>(count);
  for (std::uint64_t draws = 0; out.size() < count; ++draws) {
    if (draws >= max_draws) {
      throw SamplingError("negative sampling gave up after " + std::to_string(max_draws) +
                          " draws; graph is too dense");
    }
    const auto a = static_cast<NodeId>(rng.below(n));
    const auto b = static_cast<NodeId>(rng.below(n));
    if (a == b) continue;
    const Edge e = Edge::canonical(a, b);
    if (g.has_edge(e.u, e.v)) continue;
    if (!seen.insert(detail::pair_key(e.u, e.v)).second) continue;
    out.push_back({e.u, e.v, 0});
  }
  return out;
}

/// Holds out floor(|E|·ratio) edges as positives, never touching the
/// spanning forest, and draws as many non-edges as negatives.
inline SplitResult generate_split(const Graph& g, double ratio, std::uint64_t seed, SplitOptions opts = {}) {
  if (!(ratio > 0.0)) throw InvalidArgument("split ratio must be positive");
  auto removed = detail::pick_removed(g, ratio, derive_seed(seed, 1), opts.protect_forest, "split");
  SplitResult s;
  s.seed = seed;
  s.ratio = ratio;
  s.positives.reserve(removed.size());
  for (const Edge& e : removed) s.positives.push_back({e.u, e.v, 1});
  s.negatives = sample_negatives(g, removed.size(), derive_seed(seed, 2));
  s.subgraph = g.without_edges(removed);
  return s;
}

/// Removes floor(|E|·fraction) non-forest edges.
inline Graph sparsify(const Graph& g, double fraction, std::uint64_t seed) {
  if (fraction < 0.0) throw InvalidArgument("sparsify fraction must be non-negative");
  if (fraction == 0.0) return g;
  auto removed = detail::pick_removed(g, fraction, derive_seed(seed, 3), true, "sparsify");
  return g.without_edges(removed);
}

// ---------------------------------------------------------------------------
// Cross-validation folds

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::uint32_t> assignment;  // fold index per pair

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != fold) out.push_back(i);
    }
    return out;
  }
};

/// Stratified k-fold: each label class is shuffled and dealt round-robin.
/// Negatives start where positives stopped so total fold sizes also differ by
/// at most one.
inline FoldPlan k_fold(const std::vector<LabeledPair>& pairs, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k_fold needs k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < pairs.size(); ++i) (pairs[i].label == 1 ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k) {
    throw InvalidArgument("k_fold needs at least k pairs of each label (k=" + std::to_string(k) + ")");
  }
  Rng rng(derive_seed(seed, 4));
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));
  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(pairs.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) plan.assignment[pos[i]] = static_cast<std::uint32_t>(i % k);
  for (std::size_t i = 0; i < neg.size(); ++i) {
    plan.assignment[neg[i]] = static_cast<std::uint32_t>((i + pos.size()) % k);
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Persistence: subgraph.edgelist, positives.csv, negatives.csv

inline void write_pairs_csv(std::ostream& out, const Graph& g, const std::vector<LabeledPair>& pairs) {
  out << "u,v,label\n";
  for (const auto& p : pairs) out << g.label(p.u) << ',' << g.label(p.v) << ',' << p.label << '\n';
}

inline void save_split(const std::filesystem::path& dir, const SplitResult& s) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "subgraph.edgelist");
    write_edge_list(out, s.subgraph);
  }
  {
    std::ofstream out(dir / "positives.csv");
    write_pairs_csv(out, s.subgraph, s.positives);
  }
  std::ofstream out(dir / "negatives.csv");
  write_pairs_csv(out, s.subgraph, s.negatives);
  if (!out) throw Error("failed writing split to '" + dir.string() + "'");
}

struct PairRecord {
  std::string u, v;
  int label = 0;
};

inline std::vector<PairRecord> read_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<PairRecord> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line.rfind("u,v,label", 0) != 0) throw ParseError("expected header 'u,v,label'", line_no, path.string() + ": ");
      continue;
    }
    std::istringstream fields(line);
    PairRecord r;
    std::string label;
    if (!std::getline(fields, r.u, ',') || !std::getline(fields, r.v, ',') || !std::getline(fields, label, ',')) {
      throw ParseError("expected u,v,label", line_no, path.string() + ": ");
    }
    if (label != "0" && label != "1") throw ParseError("label must be 0 or 1", line_no, path.string() + ": ");
    r.label = label == "1" ? 1 : 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Reloads a saved split. Node labels that appear only in pair files (nodes
/// left isolated by the removal) are appended to the subgraph as isolated
/// nodes.
inline SplitResult load_split(const std::filesystem::path& dir) {
  Graph sub = load_edge_list(dir / "subgraph.edgelist");
  auto pos = read_pairs_csv(dir / "positives.csv");
  auto neg = read_pairs_csv(dir / "negatives.csv");

  std::vector<std::string> labels = sub.labels();
  std::unordered_map<std::string, NodeId> index;
  for (NodeId i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(s);
    return it->second;
  };
  SplitResult s;
  for (const auto& r : pos) s.positives.push_back({intern(r.u), intern(r.v), r.label});
  for (const auto& r : neg) s.negatives.push_back({intern(r.u), intern(r.v), r.label});
  for (auto* set : {&s.positives, &s.negatives}) {
    for (auto& p : *set) {
      if (p.u > p.v) std::swap(p.u, p.v);
    }
  }
  if (labels.size() != sub.node_count()) {
    auto edges = sub.edges();
    const auto n = labels.size();
    sub = Graph::from_edges(n, edges, std::move(labels));
  }
  s.subgraph = std::move(sub);
  return s;
}

}  // namespace adasim
