#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adasim/embedding.hpp"
#include "adasim/error.hpp"
#include "adasim/graph.hpp"
#include "adasim/metrics.hpp"
#include "adasim/split.hpp"

namespace adasim {

// ---------------------------------------------------------------------------
// Neighborhood similarity indices

enum class Heuristic { CN, RA, PA, SI, CCLP, HEI };

inline const char* heuristic_name(Heuristic h) {
  switch (h) {
    case Heuristic::CN: return "cn";
    case Heuristic::RA: return "ra";
    case Heuristic::PA: return "pa";
    case Heuristic::SI: return "si";
    case Heuristic::CCLP: return "cclp";
    case Heuristic::HEI: return "hei";
  }
  return "?";
}

inline std::optional<Heuristic> parse_heuristic(const std::string& s) {
  for (auto h : {Heuristic::CN, Heuristic::RA, Heuristic::PA, Heuristic::SI, Heuristic::CCLP, Heuristic::HEI}) {
    if (s == heuristic_name(h)) return h;
  }
  return std::nullopt;
}

struct HeuristicIndex {
  Heuristic kind = Heuristic::CN;
  std::optional<double> hei_alpha;  // set iff kind == HEI

  static HeuristicIndex of(Heuristic h) {
    if (h == Heuristic::HEI) throw InvalidArgument("HEI needs an exponent; use HeuristicIndex::hei(alpha)");
    return {h, std::nullopt};
  }
  static HeuristicIndex hei(double alpha) { return {Heuristic::HEI, alpha}; }
};

/// |k_u - k_v|^alpha, with 0^alpha taken as 0 for every alpha.
inline double hei_value(std::size_t ku, std::size_t kv, double alpha) {
  const double diff = std::abs(static_cast<double>(ku) - static_cast<double>(kv));
  return diff == 0.0 ? 0.0 : std::pow(diff, alpha);
}

namespace detail {

// `clustering(z)` supplies the local clustering coefficient of z.
template <typename Clustering>
double heuristic_score_with(const Graph& g, const HeuristicIndex& index, NodeId u, NodeId v, Clustering&& clustering) {
  if (!g.valid(u) || !g.valid(v)) throw InvalidArgument("heuristic_score: node id out of range");
  if (u == v) throw InvalidArgument("heuristic_score needs two distinct nodes");
  const auto ku = g.degree(u);
  const auto kv = g.degree(v);
  switch (index.kind) {
    case Heuristic::CN:
      return static_cast<double>(common_neighbor_count(g, u, v));
    case Heuristic::RA: {
      double s = 0.0;
      for_each_common_neighbor(g, u, v, [&](NodeId z) { s += 1.0 / static_cast<double>(g.degree(z)); });
      return s;
    }
    case Heuristic::PA:
      return static_cast<double>(ku) * static_cast<double>(kv);
    case Heuristic::SI:
      if (ku == 0 || kv == 0) return 0.0;
      return static_cast<double>(common_neighbor_count(g, u, v)) /
             std::sqrt(static_cast<double>(ku) * static_cast<double>(kv));
    case Heuristic::CCLP: {
      double s = 0.0;
      for_each_common_neighbor(g, u, v, [&](NodeId z) { s += clustering(z); });
      return s;
    }
    case Heuristic::HEI:
      if (!index.hei_alpha) throw InvalidArgument("HEI needs an exponent");
      return hei_value(ku, kv, *index.hei_alpha);
  }
  return 0.0;
}

}  // namespace detail

/// Scores pairs against `g`, which should be the residual graph: scoring on
/// the full graph would see the held-out edges.
inline double heuristic_score(const Graph& g, const HeuristicIndex& index, NodeId u, NodeId v) {
  return detail::heuristic_score_with(g, index, u, v, [&](NodeId z) { return local_clustering(g, z); });
}

/// Batch form of heuristic_score with clustering coefficients computed once.
class HeuristicScorer {
 public:
  explicit HeuristicScorer(const Graph& g) : g_(&g), clustering_(g.node_count()) {
    for (NodeId z = 0; z < g.node_count(); ++z) clustering_[z] = local_clustering(g, z);
  }

  double operator()(const HeuristicIndex& index, NodeId u, NodeId v) const {
    return detail::heuristic_score_with(*g_, index, u, v, [&](NodeId z) { return clustering_[z]; });
  }

  std::vector<double> score_all(const HeuristicIndex& index, std::span<const LabeledPair> pairs) const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back((*this)(index, p.u, p.v));
    return out;
  }

 private:
  const Graph* g_;
  std::vector<double> clustering_;
};

/// HEI exponent maximising training AUC on the grid -2.0, -1.9, ..., 2.0.
/// Ties go to the smallest |alpha| (then the smaller alpha).
inline double tune_hei_alpha(const Graph& g, std::span<const LabeledPair> train_pairs) {
  std::vector<int> labels;
  labels.reserve(train_pairs.size());
  for (const auto& p : train_pairs) labels.push_back(p.label);
  double best_alpha = 0.0;
  double best_auc = -1.0;
  constexpr double kTie = 1e-12;
  for (int step = -20; step <= 20; ++step) {
    const double alpha = step / 10.0;
    std::vector<double> scores;
    scores.reserve(train_pairs.size());
    for (const auto& p : train_pairs) scores.push_back(hei_value(g.degree(p.u), g.degree(p.v), alpha));
    const double a = auc(scores, labels);
    const bool better = a > best_auc + kTie;
    const bool tie = std::abs(a - best_auc) <= kTie;
    if (better || (tie && (std::abs(alpha) < std::abs(best_alpha) ||
                           (std::abs(alpha) == std::abs(best_alpha) && alpha < best_alpha)))) {
      best_auc = std::max(best_auc, a);
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

// ---------------------------------------------------------------------------
// Binary operators on node vectors

enum class EdgeOperator { Hadamard, Average, Division, WeightedL1, WeightedL2 };

inline constexpr EdgeOperator kAllOperators[] = {EdgeOperator::Hadamard, EdgeOperator::Average,
                                                 EdgeOperator::Division, EdgeOperator::WeightedL1,
                                                 EdgeOperator::WeightedL2};

inline const char* operator_name(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::Hadamard: return "hadamard";
    case EdgeOperator::Average: return "average";
    case EdgeOperator::Division: return "division";
    case EdgeOperator::WeightedL1: return "weighted-l1";
    case EdgeOperator::WeightedL2: return "weighted-l2";
  }
  return "?";
}

struct EdgeFeatureVector {
  std::vector<double> values;
  EdgeOperator op = EdgeOperator::Hadamard;
  bool guarded = false;  // a Division denominator was replaced by ±1e-12
};

inline constexpr double kDivisionGuard = 1e-12;

template <typename T>
EdgeFeatureVector edge_features(std::span<const T> fu, std::span<const T> fv, EdgeOperator op) {
  if (fu.size() != fv.size()) throw InvalidArgument("edge_features: dimension mismatch");
  EdgeFeatureVector out;
  out.op = op;
  out.values.resize(fu.size());
  for (std::size_t i = 0; i < fu.size(); ++i) {
    const auto x = static_cast<double>(fu[i]);
    const auto y = static_cast<double>(fv[i]);
    switch (op) {
      case EdgeOperator::Hadamard: out.values[i] = x * y; break;
      case EdgeOperator::Average: out.values[i] = (x + y) / 2.0; break;
      case EdgeOperator::Division: {
        double den = y;
        if (std::abs(den) < kDivisionGuard) {
          den = std::signbit(den) ? -kDivisionGuard : kDivisionGuard;
          out.guarded = true;
        }
        out.values[i] = x / den;
        break;
      }
      case EdgeOperator::WeightedL1: out.values[i] = std::abs(x - y); break;
      case EdgeOperator::WeightedL2: out.values[i] = (x - y) * (x - y); break;
    }
  }
  return out;
}

inline EdgeFeatureVector edge_features(const EmbeddingMatrix& emb, std::size_t u, std::size_t v, EdgeOperator op) {
  return edge_features(emb.row(u), emb.row(v), op);
}

// ---------------------------------------------------------------------------
// Logistic regression on edge features

struct LogRegConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 300;
  double l2 = 1e-4;
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogRegConfig config;

  double predict(std::span<const double> x) const {
    if (x.size() != weights.size()) throw InvalidArgument("logreg: feature dimension mismatch");
    double z = bias;
    for (std::size_t i = 0; i < x.size(); ++i) z += weights[i] * x[i];
    return 1.0 / (1.0 + std::exp(-z));
  }
};

using FeatureRows = std::vector<std::vector<double>>;

/// Mean cross-entropy plus (l2/2)·‖w‖².
inline double logreg_objective(std::span<const double> w, double b, const FeatureRows& x, std::span<const int> y,
                               double l2) {
  double sum = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[n][i];
    // log(1 + e^z) - y z, stable for both signs
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    sum += softplus - y[n] * z;
  }
  double reg = 0.0;
  for (double wi : w) reg += wi * wi;
  return sum / static_cast<double>(x.size()) + 0.5 * l2 * reg;
}

/// Gradient of logreg_objective; returns d/db, fills grad_w.
inline double logreg_gradient(std::span<const double> w, double b, const FeatureRows& x, std::span<const int> y,
                              double l2, std::span<double> grad_w) {
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  double grad_b = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[n][i];
    const double r = 1.0 / (1.0 + std::exp(-z)) - y[n];
    for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] += r * x[n][i];
    grad_b += r;
  }
  const double inv = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] = grad_w[i] * inv + l2 * w[i];
  return grad_b * inv;
}

/// Full-batch gradient descent from zero weights. Columns are standardised
/// for the descent and the result mapped back to raw-feature weights, so the
/// penalty applies to standardised weights.
inline LogRegModel train_logreg(const FeatureRows& x, std::span<const int> y, const LogRegConfig& cfg = {}) {
  if (x.empty() || x.size() != y.size()) throw InvalidArgument("logreg: need one label per feature row");
  const std::size_t d = x.front().size();
  bool has_pos = false, has_neg = false;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n].size() != d) throw InvalidArgument("logreg: inconsistent feature dimension");
    (y[n] == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw InvalidArgument("logreg needs at least one sample of each class");

  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (const auto& row : x) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += row[i];
  }
  for (auto& m : mean) m /= static_cast<double>(x.size());
  for (const auto& row : x) {
    for (std::size_t i = 0; i < d; ++i) scale[i] += (row[i] - mean[i]) * (row[i] - mean[i]);
  }
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(x.size()));
    if (!(s > 1e-12)) s = 0.0;
  }
  FeatureRows z(x.size(), std::vector<double>(d));
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (std::size_t i = 0; i < d; ++i) z[n][i] = scale[i] > 0.0 ? (x[n][i] - mean[i]) / scale[i] : 0.0;
  }

  std::vector<double> w(d, 0.0), grad(d);
  double b = 0.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double gb = logreg_gradient(w, b, z, y, cfg.l2, grad);
    for (std::size_t i = 0; i < d; ++i) w[i] -= cfg.learning_rate * grad[i];
    b -= cfg.learning_rate * gb;
  }

  LogRegModel m;
  m.config = cfg;
  m.weights.assign(d, 0.0);
  m.bias = b;
  for (std::size_t i = 0; i < d; ++i) {
    if (scale[i] > 0.0) {
      m.weights[i] = w[i] / scale[i];
      m.bias -= w[i] * mean[i] / scale[i];
    }
  }
  for (double wi : m.weights) {
    if (!std::isfinite(wi)) throw NumericError("logreg diverged");
  }
  return m;
}

inline LogRegModel train_logreg(const FeatureRows& x, const std::vector<int>& y, const LogRegConfig& cfg = {}) {
  return train_logreg(x, std::span<const int>(y), cfg);
}

}  // namespace adasim
