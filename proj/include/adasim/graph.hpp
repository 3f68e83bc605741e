#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adasim/error.hpp"

namespace adasim {

using NodeId = std::uint32_t;

// Undirected edge in canonical form (u < v).
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge canonical(NodeId a, NodeId b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph over dense node ids [0, node_count).
///
/// Adjacency is stored CSR-style with every neighbor list strictly
/// ascending. Each id maps back to the label it was read under.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from arbitrary edges. Self-loops are dropped and duplicate
  /// or reversed-duplicate edges merged. `labels` may be empty, in which case
  /// decimal ids are used.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges,
                          std::vector<std::string> labels = {}) {
    Graph g;
    if (labels.empty()) {
      labels.reserve(node_count);
      for (std::size_t i = 0; i < node_count; ++i) labels.push_back(std::to_string(i));
    }
    if (labels.size() != node_count) throw InvalidArgument("label table size differs from node count");

    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const Edge& e : edges) {
      if (e.u >= node_count || e.v >= node_count) throw InvalidArgument("edge endpoint out of range");
      if (e.u == e.v) continue;
      canon.push_back(Edge::canonical(e.u, e.v));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    g.offsets_.assign(node_count + 1, 0);
    for (const Edge& e : canon) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.targets_.resize(2 * canon.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : canon) {
      g.targets_[cursor[e.u]++] = e.v;
      g.targets_[cursor[e.v]++] = e.u;
    }
    for (std::size_t u = 0; u < node_count; ++u) {
      std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
                g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));
    }
    g.edge_count_ = canon.size();
    g.labels_ = std::move(labels);
    g.index_.reserve(g.labels_.size());
    for (std::size_t i = 0; i < g.labels_.size(); ++i) {
      if (!g.index_.emplace(g.labels_[i], static_cast<NodeId>(i)).second) {
        throw InvalidArgument("duplicate node label '" + g.labels_[i] + "'");
      }
    }
    return g;
  }

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  bool valid(NodeId u) const noexcept { return u < node_count(); }

  std::span<const NodeId> neighbors(NodeId u) const {
    check(u);
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  std::size_t degree(NodeId u) const {
    check(u);
    return offsets_[u + 1] - offsets_[u];
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto nu = neighbors(u);
    check(v);
    return std::binary_search(nu.begin(), nu.end(), v);
  }

  const std::string& label(NodeId u) const {
    check(u);
    return labels_[u];
  }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<NodeId> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeId id_of(const std::string& label) const {
    auto id = find(label);
    if (!id) throw InvalidArgument("unknown node label '" + label + "'");
    return *id;
  }

  /// All edges in canonical form, ascending by (u, v).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  /// Same node set and labels, with the given edges removed.
  Graph without_edges(std::span<const Edge> removed) const {
    std::vector<Edge> drop(removed.begin(), removed.end());
    for (Edge& e : drop) e = Edge::canonical(e.u, e.v);
    std::sort(drop.begin(), drop.end());
    std::vector<Edge> kept;
    kept.reserve(edge_count_);
    for (const Edge& e : edges()) {
      if (!std::binary_search(drop.begin(), drop.end(), e)) kept.push_back(e);
    }
    return from_edges(node_count(), kept, labels_);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_ && a.labels_ == b.labels_;
  }

 private:
  void check(NodeId u) const {
    if (u >= node_count()) throw InvalidArgument("node id " + std::to_string(u) + " out of range");
  }

  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::size_t edge_count_ = 0;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

// ---------------------------------------------------------------------------
// Edge-list text format

/// Reads `<label> <label>` lines. `#` comments and blank lines are skipped;
/// labels are numbered in first-seen order.
inline Graph load_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(s);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ParseError("expected two node labels", line_no);
    }
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    edges.push_back({u, v});
  }
  const std::size_t n = labels.size();
  Graph g = Graph::from_edges(n, edges, std::move(labels));
  if (g.edge_count() == 0) throw ParseError("empty graph: no edges", 0);
  return g;
}

inline Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path.string() + "'");
  try {
    return load_edge_list(in);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), path.string() + ": ");
  }
}

inline Graph load_edge_list_text(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

/// One edge per line as `min_label max_label`, lines sorted lexicographically.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    const auto& a = g.label(e.u);
    const auto& b = g.label(e.v);
    rows.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& [a, b] : rows) out << a << ' ' << b << '\n';
}

// ---------------------------------------------------------------------------
// Neighborhood primitives

/// Calls fn(z) for every z in Γ(u) ∩ Γ(v), ascending.
template <typename Fn>
void for_each_common_neighbor(const Graph& g, NodeId u, NodeId v, Fn&& fn) {
  auto a = g.neighbors(u);
  auto b = g.neighbors(v);
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      fn(a[i]);
      ++i;
      ++j;
    }
  }
}

inline std::size_t common_neighbor_count(const Graph& g, NodeId u, NodeId v) {
  if (u == v) throw InvalidArgument("common_neighbor_count needs two distinct nodes");
  std::size_t count = 0;
  for_each_common_neighbor(g, u, v, [&](NodeId) { ++count; });
  return count;
}

/// Number of triangles through z.
inline std::size_t triangle_count(const Graph& g, NodeId z) {
  std::size_t twice = 0;
  for (NodeId w : g.neighbors(z)) {
    for_each_common_neighbor(g, z, w, [&](NodeId) { ++twice; });
  }
  return twice / 2;
}

/// Local clustering coefficient; 0 for degree < 2.
inline double local_clustering(const Graph& g, NodeId z) {
  const auto k = g.degree(z);
  if (k < 2) return 0.0;
  return static_cast<double>(triangle_count(g, z)) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

// ---------------------------------------------------------------------------
// Traversal

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Unweighted shortest-path lengths from `source`; kUnreachable otherwise.
inline std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source) {
  std::vector<std::uint32_t> dist(g.node_count(), kUnreachable);
  if (!g.valid(source)) throw InvalidArgument("bfs source out of range");
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const NodeId u = frontier[head];
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[u] + 1;
        frontier.push_back(w);
      }
    }
  }
  return dist;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns false if already joined.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct Components {
  std::vector<std::uint32_t> component;  // per node
  std::size_t count = 0;
};

inline Components connected_components(const Graph& g) {
  Components c;
  c.component.assign(g.node_count(), kUnreachable);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (c.component[s] != kUnreachable) continue;
    const auto id = static_cast<std::uint32_t>(c.count++);
    c.component[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId w : g.neighbors(u)) {
        if (c.component[w] == kUnreachable) {
          c.component[w] = id;
          stack.push_back(w);
        }
      }
    }
  }
  return c;
}

/// Kruskal over unit weights: union-find across edges in ascending (u, v)
/// order. One spanning tree per connected component.
inline std::vector<Edge> spanning_forest(const Graph& g) {
  UnionFind uf(g.node_count());
  std::vector<Edge> forest;
  forest.reserve(g.node_count());
  for (const Edge& e : g.edges()) {
    if (uf.unite(e.u, e.v)) forest.push_back(e);
  }
  return forest;
}

// ---------------------------------------------------------------------------
// Summary statistics

struct TopologyReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double avg_degree = 0.0;
  double avg_clustering = 0.0;
  double density = 0.0;
  std::optional<std::uint32_t> diameter;  // longest finite geodesic
};

/// Exact averages. Diameter uses one BFS per node, O(|V|·|E|); only computed
/// when asked for.
inline TopologyReport topology_report(const Graph& g, bool compute_diameter) {
  TopologyReport r;
  r.node_count = g.node_count();
  r.edge_count = g.edge_count();
  const auto n = static_cast<double>(r.node_count);
  const auto m = static_cast<double>(r.edge_count);
  if (r.node_count == 0) return r;
  r.avg_degree = 2.0 * m / n;
  r.density = r.node_count > 1 ? 2.0 * m / (n * (n - 1.0)) : 0.0;
  double cc = 0.0;
  for (NodeId z = 0; z < g.node_count(); ++z) cc += local_clustering(g, z);
  r.avg_clustering = cc / n;
  if (compute_diameter) {
    std::uint32_t best = 0;
    for (NodeId s = 0; s < g.node_count(); ++s) {
      for (auto d : bfs_distances(g, s)) {
        if (d != kUnreachable) best = std::max(best, d);
      }
    }
    r.diameter = best;
  }
  return r;
}

}  // namespace adasim
