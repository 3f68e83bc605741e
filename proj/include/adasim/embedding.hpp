#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "adasim/error.hpp"
#include "adasim/graph.hpp"
#include "adasim/rng.hpp"
#include "adasim/walk.hpp"

namespace adasim {

enum class TrainMode {
  ContextAverage,  // predict the center node from the mean of its window
  SkipGram,        // predict each window node from the center node
};

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t window = 10;
  std::size_t epochs = 1;
  double alpha0 = 0.025;
  double alpha_min = 1e-4;
  std::uint64_t seed = 42;
  TrainMode mode = TrainMode::ContextAverage;
  // >1 enables lock-free shared updates; results are then not reproducible.
  unsigned jobs = 1;

  void validate() const {
    if (dim < 1) throw InvalidArgument("embedding dim must be >= 1");
    if (window < 1) throw InvalidArgument("window must be >= 1");
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (!(alpha_min > 0.0 && alpha_min <= alpha0)) throw InvalidArgument("need 0 < alpha_min <= alpha0");
  }
};

// ---------------------------------------------------------------------------
// Huffman coding of the vocabulary

struct HuffmanTree {
  // Per leaf, root first: the internal node visited and the branch taken.
  std::vector<std::vector<std::uint8_t>> codes;
  std::vector<std::vector<std::uint32_t>> paths;

  std::size_t leaf_count() const noexcept { return codes.size(); }
  std::size_t internal_count() const noexcept { return codes.empty() ? 0 : codes.size() - 1; }
};

/// Optimal prefix code. Ties are broken by (count, node id); internal nodes
/// take ids after the leaves in creation order. The smaller of the two merged
/// subtrees takes bit 0.
inline HuffmanTree build_huffman(std::span<const std::uint64_t> counts) {
  const std::size_t n = counts.size();
  if (n < 2) throw InvalidArgument("huffman tree needs at least two symbols");
  for (auto c : counts) {
    if (c == 0) throw InvalidArgument("huffman counts must be >= 1");
  }
  using Item = std::pair<std::uint64_t, std::size_t>;  // (count, node id)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < n; ++i) heap.emplace(counts[i], i);

  std::vector<std::size_t> parent(2 * n - 1, 0);
  std::vector<std::uint8_t> bit(2 * n - 1, 0);
  std::size_t next = n;
  while (heap.size() > 1) {
    auto [ca, a] = heap.top();
    heap.pop();
    auto [cb, b] = heap.top();
    heap.pop();
    parent[a] = next;
    parent[b] = next;
    bit[a] = 0;
    bit[b] = 1;
    heap.emplace(ca + cb, next++);
  }
  const std::size_t root = next - 1;

  HuffmanTree t;
  t.codes.resize(n);
  t.paths.resize(n);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    for (std::size_t node = leaf; node != root; node = parent[node]) {
      t.codes[leaf].push_back(bit[node]);
      t.paths[leaf].push_back(static_cast<std::uint32_t>(parent[node] - n));
    }
    std::reverse(t.codes[leaf].begin(), t.codes[leaf].end());
    std::reverse(t.paths[leaf].begin(), t.paths[leaf].end());
  }
  return t;
}

// ---------------------------------------------------------------------------
// Exact hierarchical-softmax terms (double precision, no table). Training
// uses the same model through the tabulated sigmoid below.
//
// Pr(leaf | x) = prod_j sigma((1 - 2 c_j) * x . w_{path_j}), so the branch
// with code 0 has probability sigma(x . w).

inline double exact_sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double hs_probability(const HuffmanTree& tree, std::size_t leaf, std::span<const double> x,
                             std::span<const double> internal) {
  const std::size_t d = x.size();
  double prob = 1.0;
  for (std::size_t j = 0; j < tree.codes[leaf].size(); ++j) {
    const double* w = internal.data() + tree.paths[leaf][j] * d;
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += x[k] * w[k];
    prob *= exact_sigmoid(tree.codes[leaf][j] ? -dot : dot);
  }
  return prob;
}

/// -log Pr(leaf | x); adds its gradient w.r.t. x into grad_x and w.r.t. the
/// internal vectors into grad_internal (same layout as `internal`).
inline double hs_loss_gradient(const HuffmanTree& tree, std::size_t leaf, std::span<const double> x,
                               std::span<const double> internal, std::span<double> grad_x,
                               std::span<double> grad_internal) {
  const std::size_t d = x.size();
  double loss = 0.0;
  for (std::size_t j = 0; j < tree.codes[leaf].size(); ++j) {
    const std::size_t row = tree.paths[leaf][j] * d;
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += x[k] * internal[row + k];
    const double code = tree.codes[leaf][j];
    const double f = exact_sigmoid(dot);
    loss -= std::log(code ? 1.0 - f : f);
    const double g = f - (1.0 - code);  // d loss / d dot
    for (std::size_t k = 0; k < d; ++k) {
      grad_x[k] += g * internal[row + k];
      grad_internal[row + k] += g * x[k];
    }
  }
  return loss;
}

// Sigmoid lookup on [-6, 6]; arguments outside are clipped.
class SigmoidTable {
 public:
  static constexpr double kMaxArg = 6.0;
  static constexpr std::size_t kSize = 1024;

  SigmoidTable() {
    for (std::size_t i = 0; i < kSize; ++i) {
      const double t = (static_cast<double>(i) / kSize * 2.0 - 1.0) * kMaxArg;
      table_[i] = static_cast<float>(exact_sigmoid(t));
    }
  }

  float operator()(float t) const {
    if (t >= kMaxArg) return table_[kSize - 1];
    if (t <= -kMaxArg) return table_[0];
    auto i = static_cast<std::size_t>((t + kMaxArg) * (kSize / kMaxArg / 2.0));
    return table_[std::min(i, kSize - 1)];
  }

 private:
  std::array<float, kSize> table_{};
};

// ---------------------------------------------------------------------------

/// Row-major |V| x d matrix of node vectors with their labels.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<std::string> labels = {})
      : rows_(rows), dim_(dim), data_(rows * dim, 0.0f), labels_(std::move(labels)) {
    if (labels_.empty()) {
      for (std::size_t i = 0; i < rows; ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != rows) throw InvalidArgument("embedding label count differs from row count");
    for (std::size_t i = 0; i < rows; ++i) index_.emplace(labels_[i], i);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<float> row(std::size_t i) {
    check(i);
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const float> row(std::size_t i) const {
    check(i);
    return {data_.data() + i * dim_, dim_};
  }

  const std::string& label(std::size_t i) const {
    check(i);
    return labels_[i];
  }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

 private:
  void check(std::size_t i) const {
    if (i >= rows_) throw InvalidArgument("embedding row " + std::to_string(i) + " out of range");
  }

  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Mean -log Pr per trained position, in roughly 100 equal chunks of the run.
struct TrainStats {
  std::vector<double> chunk_loss;
  std::uint64_t positions = 0;
};

namespace detail {

struct HsTrainer {
  const Corpus& corpus;
  const TrainConfig& cfg;
  const HuffmanTree& tree;
  const std::vector<std::int64_t>& leaf_of;  // token -> leaf, -1 if unseen
  std::span<float> syn0;
  std::span<float> syn1;
  SigmoidTable sigmoid;
  std::atomic<std::uint64_t> processed{0};
  std::uint64_t total = 0;

  // Accumulates -log Pr for one prediction of `leaf` from `input`, adds the
  // input gradient step into `err`, updates internal vectors in place.
  double predict(std::int64_t leaf, const float* input, float* err, float alpha) {
    const std::size_t d = cfg.dim;
    double loss = 0.0;
    const auto& code = tree.codes[static_cast<std::size_t>(leaf)];
    const auto& path = tree.paths[static_cast<std::size_t>(leaf)];
    for (std::size_t j = 0; j < code.size(); ++j) {
      float* w = syn1.data() + static_cast<std::size_t>(path[j]) * d;
      float dot = 0.0f;
      for (std::size_t k = 0; k < d; ++k) dot += input[k] * w[k];
      const float f = sigmoid(dot);
      const float p = code[j] ? 1.0f - f : f;
      loss -= std::log(std::max(p, 1e-7f));
      const float g = (1.0f - static_cast<float>(code[j]) - f) * alpha;
      for (std::size_t k = 0; k < d; ++k) err[k] += g * w[k];
      for (std::size_t k = 0; k < d; ++k) w[k] += g * input[k];
    }
    return loss;
  }

  float alpha_now() const {
    const double frac = static_cast<double>(processed.load(std::memory_order_relaxed)) / static_cast<double>(total + 1);
    return static_cast<float>(std::max(cfg.alpha_min, cfg.alpha0 * (1.0 - frac)));
  }

  // Trains sequences [lo, hi) once. Returns (loss sum, predicted positions)
  // per chunk via the callback.
  template <typename OnPosition>
  void run(std::size_t lo, std::size_t hi, OnPosition&& on_position) {
    const std::size_t d = cfg.dim;
    const auto lambda = static_cast<std::ptrdiff_t>(cfg.window);
    std::vector<float> neu1(d), neu1e(d);
    for (std::size_t s = lo; s < hi; ++s) {
      const auto& seq = corpus.sequences[s];
      const auto len = static_cast<std::ptrdiff_t>(seq.size());
      for (std::ptrdiff_t i = 0; i < len; ++i) {
        const float alpha = alpha_now();
        const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, i - lambda);
        const std::ptrdiff_t b = std::min<std::ptrdiff_t>(len - 1, i + lambda);
        const std::int64_t center_leaf = leaf_of[seq[static_cast<std::size_t>(i)]];
        double loss = 0.0;
        std::size_t predictions = 0;
        if (cfg.mode == TrainMode::ContextAverage) {
          const std::size_t count = static_cast<std::size_t>(b - a);  // window minus center
          if (count > 0) {
            std::fill(neu1.begin(), neu1.end(), 0.0f);
            std::fill(neu1e.begin(), neu1e.end(), 0.0f);
            for (std::ptrdiff_t j = a; j <= b; ++j) {
              if (j == i) continue;
              const float* v = syn0.data() + static_cast<std::size_t>(seq[static_cast<std::size_t>(j)]) * d;
              for (std::size_t k = 0; k < d; ++k) neu1[k] += v[k];
            }
            const float inv = 1.0f / static_cast<float>(count);
            for (auto& x : neu1) x *= inv;
            loss = predict(center_leaf, neu1.data(), neu1e.data(), alpha);
            predictions = 1;
            for (std::ptrdiff_t j = a; j <= b; ++j) {
              if (j == i) continue;
              float* v = syn0.data() + static_cast<std::size_t>(seq[static_cast<std::size_t>(j)]) * d;
              for (std::size_t k = 0; k < d; ++k) v[k] += neu1e[k];
            }
          }
        } else {
          float* center = syn0.data() + static_cast<std::size_t>(seq[static_cast<std::size_t>(i)]) * d;
          for (std::ptrdiff_t j = a; j <= b; ++j) {
            if (j == i) continue;
            std::fill(neu1e.begin(), neu1e.end(), 0.0f);
            loss += predict(leaf_of[seq[static_cast<std::size_t>(j)]], center, neu1e.data(), alpha);
            ++predictions;
            for (std::size_t k = 0; k < d; ++k) center[k] += neu1e[k];
          }
        }
        processed.fetch_add(1, std::memory_order_relaxed);
        on_position(loss, predictions);
      }
    }
  }
};

}  // namespace detail

/// Learns one vector per token by hierarchical-softmax SGD over the corpus.
///
/// Context-average mode predicts each position from the mean of the up to
/// 2·window vectors around it (windows truncate at sequence ends). Skip-gram
/// mode predicts each window token from the center vector. The learning rate
/// decays linearly from alpha0 to alpha_min over all trained positions.
/// Tokens that never occur keep their random initial vector.
inline EmbeddingMatrix train(const Corpus& corpus, const TrainConfig& cfg, std::vector<std::string> labels = {},
                             TrainStats* stats = nullptr) {
  cfg.validate();
  const std::size_t vocab = corpus.vocab_size();
  if (corpus.sequences.empty() || corpus.token_count() == 0) throw InvalidArgument("cannot train on an empty corpus");

  std::vector<std::int64_t> leaf_of(vocab, -1);
  std::vector<std::uint64_t> counts;
  for (std::size_t t = 0; t < vocab; ++t) {
    if (corpus.frequency[t] > 0) {
      leaf_of[t] = static_cast<std::int64_t>(counts.size());
      counts.push_back(corpus.frequency[t]);
    }
  }
  if (counts.size() < 2) throw InvalidArgument("corpus must contain at least two distinct tokens");
  const HuffmanTree tree = build_huffman(counts);

  const std::size_t d = cfg.dim;
  EmbeddingMatrix emb(vocab, d, std::move(labels));
  {
    Rng rng(derive_seed(cfg.seed, 0x656d62));
    const double half = 0.5 / static_cast<double>(d);
    for (auto& x : emb.data()) x = static_cast<float>(rng.uniform(-half, half));
  }
  std::vector<float> syn1(tree.internal_count() * d, 0.0f);

  detail::HsTrainer trainer{corpus, cfg, tree, leaf_of, emb.data(), syn1, {}};
  trainer.total = cfg.epochs * corpus.token_count();

  const std::uint64_t chunk = std::max<std::uint64_t>(1, trainer.total / 100);
  double chunk_loss = 0.0;
  std::uint64_t chunk_predictions = 0, chunk_positions = 0;
  auto record = [&](double loss, std::size_t predictions) {
    chunk_loss += loss;
    chunk_predictions += predictions;
    if (++chunk_positions == chunk) {
      if (!std::isfinite(chunk_loss)) throw NumericError("embedding training diverged: non-finite loss");
      if (stats && chunk_predictions) stats->chunk_loss.push_back(chunk_loss / static_cast<double>(chunk_predictions));
      chunk_loss = 0.0;
      chunk_predictions = 0;
      chunk_positions = 0;
    }
  };

  const std::size_t nseq = corpus.sequences.size();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.jobs <= 1) {
      trainer.run(0, nseq, record);
    } else {
      const std::size_t workers = std::min<std::size_t>(cfg.jobs, nseq);
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] { trainer.run(nseq * w / workers, nseq * (w + 1) / workers, [](double, std::size_t) {}); });
      }
      for (auto& t : pool) t.join();
    }
  }
  if (stats) {
    if (chunk_predictions) stats->chunk_loss.push_back(chunk_loss / static_cast<double>(chunk_predictions));
    stats->positions = trainer.processed.load();
  }
  for (float x : emb.data()) {
    if (!std::isfinite(x)) throw NumericError("embedding training produced non-finite values");
  }
  return emb;
}

/// Trains on a node corpus of `g`, rows labelled with the graph's labels.
inline EmbeddingMatrix train(const Corpus& corpus, const TrainConfig& cfg, const Graph& g,
                             TrainStats* stats = nullptr) {
  if (corpus.vocab_size() != g.node_count()) throw InvalidArgument("corpus vocabulary differs from graph size");
  return train(corpus, cfg, g.labels(), stats);
}

// ---------------------------------------------------------------------------
// word2vec text format: "<rows> <dim>" then "<label> v1 ... vd" per row.

inline void save_embeddings(std::ostream& out, const EmbeddingMatrix& emb) {
  out << emb.rows() << ' ' << emb.dim() << '\n';
  out << std::setprecision(std::numeric_limits<float>::max_digits10);
  for (std::size_t i = 0; i < emb.rows(); ++i) {
    out << emb.label(i);
    for (float x : emb.row(i)) out << ' ' << x;
    out << '\n';
  }
}

inline EmbeddingMatrix load_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  std::istringstream header(line);
  std::size_t rows = 0, dim = 0;
  std::string extra;
  if (!(header >> rows >> dim) || (header >> extra) || dim == 0) {
    throw ParseError("header must be '<rows> <dim>'", line_no);
  }
  std::vector<std::string> labels;
  std::vector<float> values;
  labels.reserve(rows);
  values.reserve(rows * dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (labels.size() == rows) throw ParseError("more rows than the header declares", line_no);
    std::istringstream fields(line);
    std::string label, tok;
    fields >> label;
    std::size_t cols = 0;
    while (fields >> tok) {
      ++cols;
      if (cols > dim) break;
      try {
        std::size_t used = 0;
        values.push_back(std::stof(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + tok + "'", line_no);
      }
    }
    if (cols != dim) {
      throw ParseError("expected " + std::to_string(dim) + " values, found " + (cols > dim ? "more" : std::to_string(cols)),
                       line_no);
    }
    labels.push_back(std::move(label));
  }
  if (labels.size() != rows) {
    throw ParseError("header declares " + std::to_string(rows) + " rows, found " + std::to_string(labels.size()), 0);
  }
  EmbeddingMatrix emb(rows, dim, std::move(labels));
  std::copy(values.begin(), values.end(), emb.data().begin());
  return emb;
}

inline void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path);
  save_embeddings(out, emb);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file '" + path.string() + "'");
  try {
    return load_embeddings(in);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), path.string() + ": ");
  }
}

/// Reorders rows to follow `g`'s node ids (matched by label).
inline EmbeddingMatrix align_to_graph(const EmbeddingMatrix& emb, const Graph& g) {
  EmbeddingMatrix out(g.node_count(), emb.dim(), g.labels());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto r = emb.find(g.label(v));
    if (!r) throw InvalidArgument("node '" + g.label(v) + "' has no embedding");
    std::copy(emb.row(*r).begin(), emb.row(*r).end(), out.row(v).begin());
  }
  return out;
}

}  // namespace adasim
