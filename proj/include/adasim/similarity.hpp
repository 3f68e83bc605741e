#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "adasim/embedding.hpp"
#include "adasim/error.hpp"
#include "adasim/rng.hpp"

namespace adasim {

/// Dot product a = u·v and norm product b = ‖u‖‖v‖ of a node pair.
struct PairFeatures {
  double a = 0.0;
  double b = 1.0;
};

struct LabeledFeatures {
  PairFeatures f;
  int label = 0;
};

inline constexpr double kDegenerateNorm = 1e-12;

template <typename T>
PairFeatures pair_features(std::span<const T> u, std::span<const T> v, bool substitute_degenerate = false) {
  if (u.size() != v.size()) throw InvalidArgument("pair_features: dimension mismatch");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto x = static_cast<double>(u[i]);
    const auto y = static_cast<double>(v[i]);
    dot += x * y;
    uu += x * x;
    vv += y * y;
  }
  double nu = std::sqrt(uu);
  double nv = std::sqrt(vv);
  if (nu == 0.0 || nv == 0.0) {
    if (!substitute_degenerate) throw NumericError("pair_features: zero-norm vector");
    nu = std::max(nu, kDegenerateNorm);
    nv = std::max(nv, kDegenerateNorm);
  }
  return {dot, nu * nv};
}

inline PairFeatures pair_features(const EmbeddingMatrix& emb, std::size_t u, std::size_t v,
                                  bool substitute_degenerate = false) {
  return pair_features(emb.row(u), emb.row(v), substitute_degenerate);
}

/// Cosine similarity computed directly from the vectors.
template <typename T>
double cosine(std::span<const T> u, std::span<const T> v) {
  const auto f = pair_features(u, v);
  return f.a / f.b;
}

enum class PenaltyOptimizer {
  Newton,           // safeguarded Newton steps on the full batch
  GradientDescent,  // fixed-step full-batch descent
  Sgd,              // shuffled mini-batches
};

struct PenaltyConfig {
  PenaltyOptimizer optimizer = PenaltyOptimizer::Newton;
  double learning_rate = 0.1;  // GradientDescent / Sgd step
  std::size_t epochs = 500;
  double tolerance = 1e-8;     // stop when |Δp| falls below
  std::size_t batch_size = 32; // Sgd only
  std::uint64_t seed = 42;     // Sgd only
};

/// The learned penalty p of K(u,v) = (u·v + p) / (‖u‖‖v‖).
struct AdaSimModel {
  double p = 0.0;
  std::vector<double> loss_trace;  // loss after each epoch / iteration
  PenaltyConfig config;
};

inline double score(double p, const PairFeatures& f) { return (f.a + p) / f.b; }
inline double score(const AdaSimModel& m, const PairFeatures& f) { return score(m.p, f); }

namespace detail {
inline double logistic(double z) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(1.0 / (1.0 + std::exp(-z)), lo, hi);
}
}  // namespace detail

/// Logistic of the similarity, kept inside the open interval (0, 1).
inline double predict_prob(double p, const PairFeatures& f) { return detail::logistic(score(p, f)); }
inline double predict_prob(const AdaSimModel& m, const PairFeatures& f) { return predict_prob(m.p, f); }

inline constexpr double kProbClamp = 1e-12;

namespace detail {
inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// -log of the probability given to the true label, before clamping. Computed
// from the logit so confident predictions keep full precision.
inline double surprise(const LabeledFeatures& s, double p) {
  const double z = score(p, s.f);
  return softplus(s.label ? -z : z);
}

// Clamping the probability to [eps, 1 - eps] bounds the surprise.
inline const double kSurpriseMin = -std::log1p(-kProbClamp);
inline const double kSurpriseMax = -std::log(kProbClamp);

inline bool clamped(const LabeledFeatures& s, double p) {
  const double e = surprise(s, p);
  return e <= kSurpriseMin || e >= kSurpriseMax;
}
}  // namespace detail

/// Mean binary cross-entropy at penalty p, probabilities clamped to
/// [1e-12, 1 - 1e-12].
inline double loss(std::span<const LabeledFeatures> pairs, double p) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : pairs) sum += std::clamp(detail::surprise(s, p), detail::kSurpriseMin, detail::kSurpriseMax);
  return sum / static_cast<double>(pairs.size());
}

/// dC/dp = (1/N) Σ (ŷ - y) / b over unclamped samples.
inline double loss_gradient(std::span<const LabeledFeatures> pairs, double p) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : pairs) {
    if (!detail::clamped(s, p)) sum += (predict_prob(p, s.f) - s.label) / s.f.b;
  }
  return sum / static_cast<double>(pairs.size());
}

/// d²C/dp² = (1/N) Σ ŷ(1 - ŷ) / b², same samples. Non-negative: C is convex in p.
inline double loss_curvature(std::span<const LabeledFeatures> pairs, double p) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : pairs) {
    const double y = predict_prob(p, s.f);
    if (!detail::clamped(s, p)) sum += y * (1.0 - y) / (s.f.b * s.f.b);
  }
  return sum / static_cast<double>(pairs.size());
}

/// Fits p by minimising the cross-entropy, starting from p = 0 (plain cosine).
inline AdaSimModel train_penalty(std::span<const LabeledFeatures> pairs, const PenaltyConfig& cfg = {}) {
  bool has_pos = false, has_neg = false;
  for (const auto& s : pairs) {
    (s.label ? has_pos : has_neg) = true;
    if (!(s.f.b > 0.0) || !std::isfinite(s.f.a) || !std::isfinite(s.f.b)) {
      throw InvalidArgument("train_penalty: pair features must be finite with b > 0");
    }
  }
  if (!has_pos || !has_neg) throw InvalidArgument("train_penalty needs at least one pair of each label");

  AdaSimModel m;
  m.config = cfg;
  auto check = [&](double c) {
    if (!std::isfinite(c) || !std::isfinite(m.p)) {
      throw NumericError("penalty training diverged (p=" + std::to_string(m.p) + ")");
    }
  };

  double current = loss(pairs, m.p);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double before = m.p;
    switch (cfg.optimizer) {
      case PenaltyOptimizer::Newton: {
        const double g = loss_gradient(pairs, m.p);
        const double h = loss_curvature(pairs, m.p);
        double step = h > 0.0 ? g / h : g;
        if (!std::isfinite(step)) step = g;
        // Halve until the loss does not increase; C is convex so a descent
        // step always exists along -g.
        double candidate = m.p - step;
        double next = loss(pairs, candidate);
        for (int halvings = 0; next > current && halvings < 60; ++halvings) {
          step *= 0.5;
          candidate = m.p - step;
          next = loss(pairs, candidate);
        }
        if (next <= current) {
          m.p = candidate;
          current = next;
        }
        break;
      }
      case PenaltyOptimizer::GradientDescent:
        m.p -= cfg.learning_rate * loss_gradient(pairs, m.p);
        current = loss(pairs, m.p);
        break;
      case PenaltyOptimizer::Sgd: {
        std::vector<std::size_t> order(pairs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(derive_seed(cfg.seed, epoch));
        rng.shuffle(std::span<std::size_t>(order));
        const std::size_t bs = std::max<std::size_t>(1, cfg.batch_size);
        for (std::size_t lo = 0; lo < order.size(); lo += bs) {
          const std::size_t hi = std::min(order.size(), lo + bs);
          double g = 0.0;
          for (std::size_t i = lo; i < hi; ++i) {
            const auto& s = pairs[order[i]];
            g += (predict_prob(m.p, s.f) - s.label) / s.f.b;
          }
          m.p -= cfg.learning_rate * g / static_cast<double>(hi - lo);
        }
        current = loss(pairs, m.p);
        break;
      }
    }
    check(current);
    m.loss_trace.push_back(current);
    if (std::abs(m.p - before) < cfg.tolerance) break;
  }
  if (m.loss_trace.empty()) m.loss_trace.push_back(current);
  return m;
}

inline AdaSimModel train_penalty(const std::vector<LabeledFeatures>& pairs, const PenaltyConfig& cfg = {}) {
  return train_penalty(std::span<const LabeledFeatures>(pairs), cfg);
}

// ---------------------------------------------------------------------------
// Model file: `p=<value>` followed by `key=value` metadata lines.

inline const char* optimizer_name(PenaltyOptimizer o) {
  switch (o) {
    case PenaltyOptimizer::Newton: return "newton";
    case PenaltyOptimizer::GradientDescent: return "gd";
    case PenaltyOptimizer::Sgd: return "sgd";
  }
  return "?";
}

inline PenaltyOptimizer parse_optimizer(const std::string& s) {
  if (s == "newton") return PenaltyOptimizer::Newton;
  if (s == "gd") return PenaltyOptimizer::GradientDescent;
  if (s == "sgd") return PenaltyOptimizer::Sgd;
  throw InvalidArgument("unknown optimizer '" + s + "' (newton, gd, sgd)");
}

inline void save_model(std::ostream& out, const AdaSimModel& m) {
  out << std::setprecision(17);
  out << "p=" << m.p << '\n';
  out << "optimizer=" << optimizer_name(m.config.optimizer) << '\n';
  out << "learning_rate=" << m.config.learning_rate << '\n';
  out << "epochs_run=" << m.loss_trace.size() << '\n';
  out << "tolerance=" << m.config.tolerance << '\n';
  out << "final_loss=" << (m.loss_trace.empty() ? 0.0 : m.loss_trace.back()) << '\n';
}

inline AdaSimModel load_model(std::istream& in) {
  AdaSimModel m;
  bool have_p = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "p") {
        m.p = std::stod(value);
        have_p = true;
      } else if (key == "optimizer") {
        m.config.optimizer = parse_optimizer(value);
      } else if (key == "learning_rate") {
        m.config.learning_rate = std::stod(value);
      } else if (key == "tolerance") {
        m.config.tolerance = std::stod(value);
      }
    } catch (const std::logic_error&) {
      throw ParseError("bad value for '" + key + "'", line_no);
    }
  }
  if (!have_p) throw ParseError("model file has no 'p=' line", 0);
  return m;
}

inline void save_model(const std::filesystem::path& path, const AdaSimModel& m) {
  std::ofstream out(path);
  save_model(out, m);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline AdaSimModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  return load_model(in);
}

inline void write_loss_trace(std::ostream& out, const AdaSimModel& m) {
  out << "epoch,loss\n" << std::setprecision(17);
  for (std::size_t i = 0; i < m.loss_trace.size(); ++i) out << i + 1 << ',' << m.loss_trace[i] << '\n';
}

}  // namespace adasim
