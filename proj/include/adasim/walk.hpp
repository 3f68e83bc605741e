#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <sstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "adasim/error.hpp"
#include "adasim/graph.hpp"
#include "adasim/rng.hpp"

namespace adasim {

// Second-order walk parameters (node2vec's p and q).
struct WalkBias {
  double return_p = 1.0;
  double inout_q = 1.0;
};

struct WalkConfig {
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;
  std::uint64_t seed = 42;
  std::optional<WalkBias> bias;
  unsigned jobs = 1;  // output does not depend on this

  void validate() const {
    if (walks_per_node < 1) throw InvalidArgument("walks_per_node must be >= 1");
    if (walk_length < 1) throw InvalidArgument("walk_length must be >= 1");
    if (bias && !(bias->return_p > 0.0 && bias->inout_q > 0.0)) {
      throw InvalidArgument("walk bias parameters must be positive");
    }
  }
};

/// Token sequences plus per-token occurrence counts. Tokens are node ids for
/// walk corpora and edge ids for derived edge corpora.
struct Corpus {
  std::vector<std::vector<NodeId>> sequences;
  std::vector<std::uint64_t> frequency;  // indexed by token, size = vocabulary

  std::size_t vocab_size() const noexcept { return frequency.size(); }

  std::uint64_t token_count() const noexcept {
    return std::accumulate(frequency.begin(), frequency.end(), std::uint64_t{0});
  }

  void recount(std::size_t vocab) {
    frequency.assign(vocab, 0);
    for (const auto& s : sequences) {
      for (auto t : s) ++frequency.at(t);
    }
  }
};

namespace detail {

// Calls fn(i) for i in [0, n), split across `jobs` threads by contiguous
// blocks. fn must only write to slot i.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(jobs, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Next step of a second-order walk at `cur`, having arrived from `prev`.
inline NodeId biased_step(const Graph& g, NodeId prev, NodeId cur, const WalkBias& bias, Rng& rng,
                          std::vector<double>& weights) {
  auto nbrs = g.neighbors(cur);
  auto prev_nbrs = g.neighbors(prev);
  weights.resize(nbrs.size());
  double total = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const NodeId x = nbrs[i];
    double w;
    if (x == prev) {
      w = 1.0 / bias.return_p;
    } else {
      // Both lists ascend, so a single forward cursor answers adjacency.
      while (j < prev_nbrs.size() && prev_nbrs[j] < x) ++j;
      w = (j < prev_nbrs.size() && prev_nbrs[j] == x) ? 1.0 : 1.0 / bias.inout_q;
    }
    weights[i] = w;
    total += w;
  }
  double target = rng.uniform() * total;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    target -= weights[i];
    if (target < 0.0) return nbrs[i];
  }
  return nbrs.back();
}

inline std::vector<NodeId> walk_from(const Graph& g, NodeId root, std::size_t length,
                                     const std::optional<WalkBias>& bias, Rng& rng) {
  std::vector<NodeId> walk;
  walk.reserve(length);
  walk.push_back(root);
  std::vector<double> weights;
  while (walk.size() < length) {
    const NodeId cur = walk.back();
    auto nbrs = g.neighbors(cur);
    if (nbrs.empty()) break;  // isolated node: truncate
    if (!bias || walk.size() == 1) {
      walk.push_back(nbrs[rng.below(nbrs.size())]);
    } else {
      walk.push_back(biased_step(g, walk[walk.size() - 2], cur, *bias, rng, weights));
    }
  }
  return walk;
}

inline Corpus generate_walks(const Graph& g, const WalkConfig& cfg) {
  cfg.validate();
  if (g.node_count() == 0) throw InvalidArgument("cannot walk an empty graph");
  const std::size_t n = g.node_count();
  std::vector<std::vector<NodeId>> orders(cfg.walks_per_node);
  for (std::size_t pass = 0; pass < cfg.walks_per_node; ++pass) {
    orders[pass].resize(n);
    std::iota(orders[pass].begin(), orders[pass].end(), NodeId{0});
    Rng rng(derive_seed(cfg.seed, pass));
    rng.shuffle(std::span<NodeId>(orders[pass]));
  }
  Corpus c;
  c.sequences.resize(cfg.walks_per_node * n);
  parallel_for(c.sequences.size(), cfg.jobs, [&](std::size_t slot) {
    const std::size_t pass = slot / n;
    const std::size_t idx = slot % n;
    Rng rng(derive_seed(cfg.seed, pass, idx));
    c.sequences[slot] = walk_from(g, orders[pass][idx], cfg.walk_length, cfg.bias, rng);
  });
  c.recount(n);
  return c;
}

}  // namespace detail

/// Uniform random walks: walks_per_node passes over a shuffled node order,
/// one walk per root per pass.
inline Corpus random_walks(const Graph& g, WalkConfig cfg) {
  if (cfg.bias) throw InvalidArgument("random_walks takes no bias; use biased_walks");
  return detail::generate_walks(g, cfg);
}

/// Second-order walks. Moving from t to v, candidate x gets weight 1/p when
/// x = t, 1 when x is adjacent to t, and 1/q otherwise.
inline Corpus biased_walks(const Graph& g, const WalkConfig& cfg) {
  if (!cfg.bias) throw InvalidArgument("biased_walks needs a bias");
  return detail::generate_walks(g, cfg);
}

/// Corpus whose tokens index `edges` (canonical, ascending).
struct EdgeCorpus {
  Corpus corpus;
  std::vector<Edge> edges;
};

/// Maps each node walk [v1..vm] to [e(v1,v2)..e(vm-1,vm)].
inline EdgeCorpus derive_edge_sequences(const Corpus& nodes, const Graph& g) {
  EdgeCorpus out;
  out.edges = g.edges();
  out.corpus.sequences.reserve(nodes.sequences.size());
  for (const auto& walk : nodes.sequences) {
    std::vector<NodeId> seq;
    if (walk.size() > 1) seq.reserve(walk.size() - 1);
    for (std::size_t i = 1; i < walk.size(); ++i) {
      const Edge e = Edge::canonical(walk[i - 1], walk[i]);
      auto it = std::lower_bound(out.edges.begin(), out.edges.end(), e);
      if (it == out.edges.end() || *it != e) {
        throw Error("corrupt walk: nodes " + std::to_string(walk[i - 1]) + " and " + std::to_string(walk[i]) +
                    " are not adjacent");
      }
      seq.push_back(static_cast<NodeId>(it - out.edges.begin()));
    }
    out.corpus.sequences.push_back(std::move(seq));
  }
  out.corpus.recount(out.edges.size());
  return out;
}

/// One walk per line, tokens rendered by `label`.
inline void write_corpus(std::ostream& out, const Corpus& c, const std::function<std::string(NodeId)>& label) {
  for (const auto& s : c.sequences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << label(s[i]);
    }
    out << '\n';
  }
}

inline void write_corpus(std::ostream& out, const Corpus& c, const Graph& g) {
  write_corpus(out, c, [&](NodeId v) { return g.label(v); });
}

/// Reads the format above back, mapping labels through `g`. Blank lines are
/// skipped.
inline Corpus read_corpus(std::istream& in, const Graph& g) {
  Corpus c;
  std::string line, token;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::vector<NodeId> seq;
    while (words >> token) {
      const auto id = g.find(token);
      if (!id) throw ParseError("unknown node '" + token + "'", line_no);
      seq.push_back(*id);
    }
    if (!seq.empty()) c.sequences.push_back(std::move(seq));
  }
  c.recount(g.node_count());
  return c;
}

}  // namespace adasim
