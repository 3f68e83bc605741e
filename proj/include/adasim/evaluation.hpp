#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adasim/baselines.hpp"
#include "adasim/embedding.hpp"
#include "adasim/error.hpp"
#include "adasim/graph.hpp"
#include "adasim/metrics.hpp"
#include "adasim/similarity.hpp"
#include "adasim/split.hpp"
#include "adasim/walk.hpp"

namespace adasim {

struct ScoredPair {
  NodeId u = 0;
  NodeId v = 0;
  int label = 0;
  double score = 0.0;
};

inline double auc(std::span<const ScoredPair> scored) {
  std::vector<double> s;
  std::vector<int> y;
  s.reserve(scored.size());
  y.reserve(scored.size());
  for (const auto& p : scored) {
    if (!std::isfinite(p.score)) throw InvalidArgument("auc: non-finite score");
    s.push_back(p.score);
    y.push_back(p.label);
  }
  return auc(s, y);
}

// ---------------------------------------------------------------------------
// Methods

enum class MethodKind { AdaSim, Cosine, Heuristic, DeepWalk, Node2Vec };

struct MethodSpec {
  std::string name;
  MethodKind kind = MethodKind::AdaSim;
  Heuristic heuristic = Heuristic::CN;  // kind == Heuristic
};

inline MethodSpec parse_method(const std::string& name) {
  if (name == "adasim") return {name, MethodKind::AdaSim};
  if (name == "cosine") return {name, MethodKind::Cosine};
  if (name == "deepwalk") return {name, MethodKind::DeepWalk};
  if (name == "node2vec") return {name, MethodKind::Node2Vec};
  if (auto h = parse_heuristic(name)) return {name, MethodKind::Heuristic, *h};
  throw InvalidArgument("unknown method '" + name +
                        "' (adasim, cosine, cn, ra, pa, si, cclp, hei, deepwalk, node2vec)");
}

inline std::vector<MethodSpec> parse_methods(const std::vector<std::string>& names) {
  std::vector<MethodSpec> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

inline std::vector<std::string> default_methods() {
  return {"adasim", "cosine", "cn", "ra", "pa", "si", "cclp", "hei"};
}

struct ExperimentConfig {
  double ratio = 0.5;
  std::size_t folds = 10;
  std::size_t repeats = 10;
  std::uint64_t seed = 42;
  SplitOptions split;
  WalkConfig walk;   // seed is overridden per repeat
  TrainConfig train; // seed and mode are overridden per repeat / method
  PenaltyConfig penalty;
  LogRegConfig logreg;
  std::vector<double> node2vec_grid = {0.25, 0.5, 1.0, 2.0};
  unsigned jobs = 1;  // repeats evaluated concurrently; results do not depend on it
};

/// Per-method outcome of one experiment.
struct EvaluationReport {
  std::string method;
  std::vector<double> fold_auc;    // repeats × folds, repeat-major
  std::vector<double> repeat_auc;  // mean over folds, per repeat
  double mean_auc = 0.0;
  double std_auc = 0.0;            // population std over fold_auc
  double seconds = 0.0;            // scoring/training time, excluding shared embeddings
  std::map<std::string, std::vector<double>> params;  // learned values per fold, e.g. "p"

  void finalize() {
    if (fold_auc.empty()) return;
    const double n = static_cast<double>(fold_auc.size());
    mean_auc = std::accumulate(fold_auc.begin(), fold_auc.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : fold_auc) ss += (a - mean_auc) * (a - mean_auc);
    std_auc = std::sqrt(ss / n);
  }
};

/// Everything one repeat needs: the split, labelled pairs, folds and the
/// node embeddings (computed on demand, once).
class RepeatContext {
 public:
  RepeatContext(const Graph& g, const ExperimentConfig& cfg, std::size_t repeat)
      : cfg_(&cfg), repeat_(repeat), split_seed_(cfg.seed + repeat) {
    split_ = generate_split(g, cfg.ratio, split_seed_, cfg.split);
    pairs_ = split_.pairs();
    labels_.reserve(pairs_.size());
    for (const auto& p : pairs_) labels_.push_back(p.label);
    folds_ = k_fold(pairs_, cfg.folds, split_seed_);
  }

  const SplitResult& split() const { return split_; }
  const std::vector<LabeledPair>& pairs() const { return pairs_; }
  const std::vector<int>& labels() const { return labels_; }
  const FoldPlan& folds() const { return folds_; }
  std::uint64_t split_seed() const { return split_seed_; }
  double embedding_seconds() const { return embedding_seconds_; }

  /// Embedding of the residual graph. `bias` selects second-order walks;
  /// mode picks the training objective.
  const EmbeddingMatrix& embedding(TrainMode mode, std::optional<WalkBias> bias = std::nullopt) {
    const std::string key = std::to_string(static_cast<int>(mode)) +
                            (bias ? ":" + std::to_string(bias->return_p) + "," + std::to_string(bias->inout_q) : "");
    auto it = embeddings_.find(key);
    if (it != embeddings_.end()) return it->second;
    const auto start = std::chrono::steady_clock::now();
    WalkConfig wc = cfg_->walk;
    wc.seed = derive_seed(split_seed_, 11);
    wc.bias = bias;
    wc.jobs = 1;
    TrainConfig tc = cfg_->train;
    tc.seed = derive_seed(split_seed_, 12);
    tc.mode = mode;
    const Corpus corpus = bias ? biased_walks(split_.subgraph, wc) : random_walks(split_.subgraph, wc);
    auto [pos, inserted] = embeddings_.emplace(key, train(corpus, tc, split_.subgraph));
    embedding_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return pos->second;
  }

 private:
  const ExperimentConfig* cfg_;
  std::size_t repeat_;
  std::uint64_t split_seed_;
  SplitResult split_;
  std::vector<LabeledPair> pairs_;
  std::vector<int> labels_;
  FoldPlan folds_;
  std::map<std::string, EmbeddingMatrix> embeddings_;
  double embedding_seconds_ = 0.0;
};

/// One report row: name plus the per-fold AUCs of one repeat.
struct MethodRun {
  std::string name;
  std::vector<double> fold_auc;
  std::map<std::string, std::vector<double>> params;
};

namespace detail {

template <typename T>
std::vector<T> gather(const std::vector<T>& xs, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(xs[i]);
  return out;
}

inline double fold_auc(const std::vector<double>& scores, const std::vector<int>& labels,
                       const std::vector<std::size_t>& idx) {
  return auc(gather(scores, idx), gather(labels, idx));
}

inline std::vector<LabeledFeatures> features_of(const EmbeddingMatrix& emb, const std::vector<LabeledPair>& pairs) {
  std::vector<LabeledFeatures> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({pair_features(emb, p.u, p.v), p.label});
  return out;
}

inline FeatureRows operator_rows(const EmbeddingMatrix& emb, const std::vector<LabeledPair>& pairs,
                                 EdgeOperator op) {
  FeatureRows rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) rows.push_back(edge_features(emb, p.u, p.v, op).values);
  return rows;
}

inline std::vector<double> logreg_scores(const LogRegModel& m, const FeatureRows& rows,
                                         const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(m.predict(rows[i]));
  return out;
}

// Embedding + logistic regression per operator; `candidates` are the walk
// biases to choose between, by training AUC, within each fold.
inline std::vector<MethodRun> run_embedding_classifier(RepeatContext& ctx, const std::string& name,
                                                       const std::vector<std::optional<WalkBias>>& candidates,
                                                       const LogRegConfig& lr) {
  const auto& pairs = ctx.pairs();
  const auto& labels = ctx.labels();
  const auto& folds = ctx.folds();
  std::vector<MethodRun> runs;
  for (EdgeOperator op : kAllOperators) {
    std::vector<FeatureRows> rows;
    for (const auto& bias : candidates) rows.push_back(operator_rows(ctx.embedding(TrainMode::SkipGram, bias), pairs, op));
    MethodRun run{name + ":" + operator_name(op), {}, {}};
    for (std::size_t f = 0; f < folds.k; ++f) {
      const auto train_idx = folds.train_indices(f);
      const auto test_idx = folds.test_indices(f);
      const auto train_labels = gather(labels, train_idx);
      double best_train = -1.0;
      double best_test = 0.0;
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto model = train_logreg(gather(rows[c], train_idx), train_labels, lr);
        const double train_auc = auc(logreg_scores(model, rows[c], train_idx), train_labels);
        if (train_auc > best_train) {
          best_train = train_auc;
          best_c = c;
          best_test = auc(logreg_scores(model, rows[c], test_idx), gather(labels, test_idx));
        }
      }
      run.fold_auc.push_back(best_test);
      if (candidates.size() > 1) {
        run.params["return_p"].push_back(candidates[best_c]->return_p);
        run.params["inout_q"].push_back(candidates[best_c]->inout_q);
      }
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace detail

/// Evaluates one method on one repeat. Supervised methods train on k-1 folds
/// and score the held-out fold; training-free heuristics score every pair
/// once and are cut per fold. Embedding classifiers yield one row per edge
/// operator.
inline std::vector<MethodRun> run_method(RepeatContext& ctx, const MethodSpec& method, const ExperimentConfig& cfg) {
  const auto& pairs = ctx.pairs();
  const auto& labels = ctx.labels();
  const auto& folds = ctx.folds();
  const Graph& sub = ctx.split().subgraph;
  MethodRun run{method.name, {}, {}};

  switch (method.kind) {
    case MethodKind::AdaSim:
    case MethodKind::Cosine: {
      const auto features = detail::features_of(ctx.embedding(TrainMode::ContextAverage), pairs);
      for (std::size_t f = 0; f < folds.k; ++f) {
        const auto test_idx = folds.test_indices(f);
        double p = 0.0;
        if (method.kind == MethodKind::AdaSim) {
          p = train_penalty(detail::gather(features, folds.train_indices(f)), cfg.penalty).p;
          run.params["p"].push_back(p);
        }
        std::vector<double> scores;
        scores.reserve(test_idx.size());
        for (auto i : test_idx) scores.push_back(score(p, features[i].f));
        run.fold_auc.push_back(auc(scores, detail::gather(labels, test_idx)));
      }
      return {run};
    }
    case MethodKind::Heuristic: {
      const HeuristicScorer scorer(sub);
      if (method.heuristic == Heuristic::HEI) {
        for (std::size_t f = 0; f < folds.k; ++f) {
          const double alpha = tune_hei_alpha(sub, detail::gather(pairs, folds.train_indices(f)));
          run.params["alpha"].push_back(alpha);
          const auto scores = scorer.score_all(HeuristicIndex::hei(alpha), pairs);
          run.fold_auc.push_back(detail::fold_auc(scores, labels, folds.test_indices(f)));
        }
      } else {
        const auto scores = scorer.score_all(HeuristicIndex::of(method.heuristic), pairs);
        for (std::size_t f = 0; f < folds.k; ++f) {
          run.fold_auc.push_back(detail::fold_auc(scores, labels, folds.test_indices(f)));
        }
      }
      return {run};
    }
    case MethodKind::DeepWalk:
      return detail::run_embedding_classifier(ctx, method.name, {std::nullopt}, cfg.logreg);
    case MethodKind::Node2Vec: {
      std::vector<std::optional<WalkBias>> grid;
      for (double p : cfg.node2vec_grid) {
        for (double q : cfg.node2vec_grid) grid.push_back(WalkBias{p, q});
      }
      return detail::run_embedding_classifier(ctx, method.name, grid, cfg.logreg);
    }
  }
  return {run};
}

struct RepeatInfo {
  std::uint64_t split_seed = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double embedding_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<EvaluationReport> reports;
  std::vector<RepeatInfo> repeats;
  double seconds = 0.0;

  const EvaluationReport* find(const std::string& method) const {
    for (const auto& r : reports) {
      if (r.method == method) return &r;
    }
    return nullptr;
  }
};

/// Repeated k-fold evaluation. Repeat r redraws the split with seed
/// cfg.seed + r; every method sees the same splits and folds.
inline ExperimentResult run_experiment(const Graph& g, const std::vector<MethodSpec>& methods,
                                       const ExperimentConfig& cfg) {
  if (cfg.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<MethodRun>> per_repeat(cfg.repeats);
  std::vector<std::map<std::string, double>> method_seconds(cfg.repeats);
  std::vector<RepeatInfo> info(cfg.repeats);
  std::mutex error_mutex;
  std::exception_ptr error;

  detail::parallel_for(cfg.repeats, cfg.jobs, [&](std::size_t r) {
    try {
      RepeatContext ctx(g, cfg, r);
      for (const auto& m : methods) {
        const auto t0 = std::chrono::steady_clock::now();
        const double emb_before = ctx.embedding_seconds();
        auto runs = run_method(ctx, m, cfg);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() -
                               (ctx.embedding_seconds() - emb_before);
        for (auto& run : runs) {
          method_seconds[r][run.name] += elapsed / static_cast<double>(runs.size());
          per_repeat[r].push_back(std::move(run));
        }
      }
      info[r] = {ctx.split_seed(), ctx.split().positives.size(), ctx.split().negatives.size(),
                 ctx.embedding_seconds()};
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  ExperimentResult result;
  result.repeats = info;
  std::map<std::string, std::size_t> slot;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    for (auto& run : per_repeat[r]) {
      auto [it, inserted] = slot.emplace(run.name, result.reports.size());
      if (inserted) {
        result.reports.emplace_back();
        result.reports.back().method = run.name;
      }
      auto& rep = result.reports[it->second];
      rep.fold_auc.insert(rep.fold_auc.end(), run.fold_auc.begin(), run.fold_auc.end());
      rep.repeat_auc.push_back(std::accumulate(run.fold_auc.begin(), run.fold_auc.end(), 0.0) /
                               static_cast<double>(run.fold_auc.size()));
      for (auto& [k, v] : run.params) rep.params[k].insert(rep.params[k].end(), v.begin(), v.end());
      rep.seconds += method_seconds[r][run.name];
    }
  }
  for (auto& rep : result.reports) rep.finalize();

  // Embedding classifiers also get a row for their best operator.
  for (const auto& m : methods) {
    if (m.kind != MethodKind::DeepWalk && m.kind != MethodKind::Node2Vec) continue;
    const EvaluationReport* best = nullptr;
    for (const auto& rep : result.reports) {
      if (rep.method.rfind(m.name + ":", 0) == 0 && (!best || rep.mean_auc > best->mean_auc)) best = &rep;
    }
    if (best) {
      EvaluationReport row = *best;
      row.method = m.name;
      result.reports.push_back(std::move(row));
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Studies

struct PenaltyPoint {
  double p = 0.0;
  double auc = 0.0;
};

/// AUC of (a + p) / b over the grid p_min, p_min + step, ..., p_max. p = 0
/// (plain cosine) is always included when inside the range.
inline std::vector<PenaltyPoint> penalty_sweep(std::span<const LabeledFeatures> pairs, double p_min, double p_max,
                                               double step) {
  if (!(p_min < p_max)) throw InvalidArgument("penalty_sweep needs p_min < p_max");
  if (!(step > 0.0)) throw InvalidArgument("penalty_sweep needs step > 0");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((p_max - p_min) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(p_min + static_cast<double>(i) * step);
  bool has_zero = false;
  for (double& p : grid) {
    if (std::abs(p) < step * 1e-9) {
      p = 0.0;
      has_zero = true;
    }
  }
  if (!has_zero && p_min < 0.0 && p_max > 0.0) {
    grid.insert(std::upper_bound(grid.begin(), grid.end(), 0.0), 0.0);
  }
  std::vector<int> labels;
  for (const auto& s : pairs) labels.push_back(s.label);
  std::vector<PenaltyPoint> out;
  std::vector<double> scores(pairs.size());
  for (double p : grid) {
    for (std::size_t i = 0; i < pairs.size(); ++i) scores[i] = score(p, pairs[i].f);
    out.push_back({p, auc(scores, labels)});
  }
  return out;
}

struct DistanceBucket {
  std::optional<std::uint32_t> distance;  // nullopt: unreachable
  std::size_t count = 0;
  double probability = 0.0;
};

/// Fraction of positive pairs at each geodesic distance in the residual
/// graph, ascending, with unreachable pairs last.
inline std::vector<DistanceBucket> distance_histogram(const Graph& residual, std::span<const LabeledPair> positives) {
  if (positives.empty()) throw InvalidArgument("distance_histogram needs at least one pair");
  std::map<NodeId, std::vector<NodeId>> by_source;
  for (const auto& p : positives) by_source[p.u].push_back(p.v);
  std::map<std::uint32_t, std::size_t> counts;
  std::size_t unreachable = 0;
  for (const auto& [src, targets] : by_source) {
    const auto dist = bfs_distances(residual, src);
    for (NodeId t : targets) {
      if (dist[t] == kUnreachable) {
        ++unreachable;
      } else {
        ++counts[dist[t]];
      }
    }
  }
  const double n = static_cast<double>(positives.size());
  std::vector<DistanceBucket> out;
  for (const auto& [d, c] : counts) out.push_back({d, c, static_cast<double>(c) / n});
  if (unreachable) out.push_back({std::nullopt, unreachable, static_cast<double>(unreachable) / n});
  return out;
}

/// Probability mass at distance <= max_distance.
inline double mass_within(const std::vector<DistanceBucket>& hist, std::uint32_t max_distance) {
  double s = 0.0;
  for (const auto& b : hist) {
    if (b.distance && *b.distance <= max_distance) s += b.probability;
  }
  return s;
}

struct CorrelationRow {
  Edge edge;
  std::string edge_label;  // "u-v" with original labels
  EdgeOperator op = EdgeOperator::Hadamard;
  std::optional<double> pearson;  // nullopt: zero variance
};

/// Learns node vectors and edge vectors from the same walks, then correlates
/// each operator-built edge vector with the learned one, per edge.
inline std::vector<CorrelationRow> edge_feature_correlation(const Graph& g, const WalkConfig& walk,
                                                            const TrainConfig& train_cfg) {
  const Corpus nodes = walk.bias ? biased_walks(g, walk) : random_walks(g, walk);
  const EdgeCorpus edges = derive_edge_sequences(nodes, g);
  const EmbeddingMatrix node_emb = train(nodes, train_cfg, g);
  TrainConfig edge_cfg = train_cfg;
  edge_cfg.seed = derive_seed(train_cfg.seed, 0x65646765);
  const EmbeddingMatrix edge_emb = train(edges.corpus, edge_cfg);

  std::vector<CorrelationRow> rows;
  for (std::size_t e = 0; e < edges.edges.size(); ++e) {
    const Edge edge = edges.edges[e];
    std::vector<double> learned(edge_emb.row(e).begin(), edge_emb.row(e).end());
    for (EdgeOperator op : kAllOperators) {
      CorrelationRow row{edge, g.label(edge.u) + "-" + g.label(edge.v), op, std::nullopt};
      const auto built = edge_features(node_emb, edge.u, edge.v, op);
      try {
        row.pearson = pearson(built.values, learned);
      } catch (const NumericError&) {
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

/// Share of defined correlations with |r| < threshold.
inline double weak_correlation_share(const std::vector<CorrelationRow>& rows, double threshold = 0.5) {
  std::size_t defined = 0, weak = 0;
  for (const auto& r : rows) {
    if (!r.pearson) continue;
    ++defined;
    if (std::abs(*r.pearson) < threshold) ++weak;
  }
  return defined ? static_cast<double>(weak) / static_cast<double>(defined) : 0.0;
}

struct SparsityRow {
  double fraction = 0.0;
  std::string method;
  std::optional<double> auc;  // nullopt: skipped
  std::string note;
};

/// Full experiment on copies of g with a growing share of edges removed.
/// Within a fraction all methods share splits; infeasible fractions are
/// reported as skipped rows.
inline std::vector<SparsityRow> sparsity_sweep(const Graph& g, const std::vector<double>& fractions,
                                               const std::vector<MethodSpec>& methods, const ExperimentConfig& cfg) {
  std::vector<SparsityRow> rows;
  for (double fraction : fractions) {
    std::vector<SparsityRow> block;
    try {
      const Graph sparse = sparsify(g, fraction, cfg.seed);
      const auto result = run_experiment(sparse, methods, cfg);
      for (const auto& rep : result.reports) block.push_back({fraction, rep.method, rep.mean_auc, {}});
    } catch (const InfeasibleRatio& e) {
      for (const auto& m : methods) block.push_back({fraction, m.name, std::nullopt, e.what()});
    } catch (const SamplingError& e) {
      for (const auto& m : methods) block.push_back({fraction, m.name, std::nullopt, e.what()});
    }
    rows.insert(rows.end(), block.begin(), block.end());
  }
  return rows;
}

enum class SensitivityParam { Dim, WalkLength, WalksPerNode };

inline const char* sensitivity_name(SensitivityParam p) {
  switch (p) {
    case SensitivityParam::Dim: return "d";
    case SensitivityParam::WalkLength: return "l";
    case SensitivityParam::WalksPerNode: return "k";
  }
  return "?";
}

inline SensitivityParam parse_sensitivity(const std::string& s) {
  if (s == "d" || s == "dim") return SensitivityParam::Dim;
  if (s == "l" || s == "length" || s == "walk-length") return SensitivityParam::WalkLength;
  if (s == "k" || s == "walks" || s == "walks-per-node") return SensitivityParam::WalksPerNode;
  throw InvalidArgument("unknown sensitivity parameter '" + s + "' (d, l, k)");
}

struct SensitivityRow {
  std::string param;
  std::size_t value = 0;
  std::size_t dim = 0;
  std::size_t walk_length = 0;
  std::size_t walks_per_node = 0;
  std::size_t window = 0;
  double auc = 0.0;
};

/// AdaSim AUC while varying one of d, l, k over `grid`, all else at cfg.
inline std::vector<SensitivityRow> sensitivity_sweep(const Graph& g, SensitivityParam param,
                                                     const std::vector<std::size_t>& grid,
                                                     const ExperimentConfig& cfg) {
  std::vector<SensitivityRow> rows;
  const std::vector<MethodSpec> adasim{parse_method("adasim")};
  for (std::size_t value : grid) {
    ExperimentConfig c = cfg;
    switch (param) {
      case SensitivityParam::Dim: c.train.dim = value; break;
      case SensitivityParam::WalkLength: c.walk.walk_length = value; break;
      case SensitivityParam::WalksPerNode: c.walk.walks_per_node = value; break;
    }
    const auto result = run_experiment(g, adasim, c);
    rows.push_back({sensitivity_name(param), value, c.train.dim, c.walk.walk_length, c.walk.walks_per_node,
                    c.train.window, result.reports.front().mean_auc});
  }
  return rows;
}

/// One-factor-at-a-time over all three parameters; empty grids are skipped.
inline std::vector<SensitivityRow> sensitivity_sweep(const Graph& g, const std::vector<std::size_t>& dims,
                                                     const std::vector<std::size_t>& lengths,
                                                     const std::vector<std::size_t>& walk_counts,
                                                     const ExperimentConfig& cfg) {
  std::vector<SensitivityRow> rows;
  for (auto [param, grid] : {std::pair{SensitivityParam::Dim, &dims}, std::pair{SensitivityParam::WalkLength, &lengths},
                             std::pair{SensitivityParam::WalksPerNode, &walk_counts}}) {
    auto part = sensitivity_sweep(g, param, *grid, cfg);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV writers

/// Timings are left out so reruns produce identical files.
inline void write_report_csv(std::ostream& out, const std::vector<EvaluationReport>& reports) {
  out << "method,mean_auc,std_auc,min_auc,max_auc,folds\n" << std::setprecision(6) << std::fixed;
  for (const auto& r : reports) {
    const auto [lo, hi] = std::minmax_element(r.fold_auc.begin(), r.fold_auc.end());
    out << r.method << ',' << r.mean_auc << ',' << r.std_auc << ',' << (r.fold_auc.empty() ? 0.0 : *lo) << ','
        << (r.fold_auc.empty() ? 0.0 : *hi) << ',' << r.fold_auc.size() << '\n';
  }
  out.unsetf(std::ios::fixed);
}

inline void write_folds_csv(std::ostream& out, const std::vector<EvaluationReport>& reports, std::size_t folds) {
  out << "method,repeat,fold,auc\n" << std::setprecision(10);
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.fold_auc.size(); ++i) {
      out << r.method << ',' << i / folds << ',' << i % folds << ',' << r.fold_auc[i] << '\n';
    }
  }
}

inline void write_scores_csv(std::ostream& out, const Graph& g, std::span<const ScoredPair> scored) {
  out << "u,v,label,score\n" << std::setprecision(17);
  for (const auto& s : scored) out << g.label(s.u) << ',' << g.label(s.v) << ',' << s.label << ',' << s.score << '\n';
}

inline void write_penalty_csv(std::ostream& out, const std::vector<PenaltyPoint>& rows) {
  out << "p,auc\n" << std::setprecision(10);
  for (const auto& r : rows) out << r.p << ',' << r.auc << '\n';
}

inline void write_distance_csv(std::ostream& out, const std::vector<DistanceBucket>& hist) {
  out << "s,count,probability\n" << std::setprecision(10);
  for (const auto& b : hist) {
    if (b.distance) {
      out << *b.distance;
    } else {
      out << "inf";
    }
    out << ',' << b.count << ',' << b.probability << '\n';
  }
}

inline void write_correlation_csv(std::ostream& out, const std::vector<CorrelationRow>& rows) {
  out << "edge,operator,pearson\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.edge_label << ',' << operator_name(r.op) << ',';
    if (r.pearson) {
      out << *r.pearson;
    } else {
      out << "undefined";
    }
    out << '\n';
  }
}

inline void write_sparsity_csv(std::ostream& out, const std::vector<SparsityRow>& rows) {
  out << "fraction,method,auc,status\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.fraction << ',' << r.method << ',';
    if (r.auc) {
      out << *r.auc << ",ok";
    } else {
      out << ",skipped";
    }
    out << '\n';
  }
}

inline void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows) {
  out << "param,value,d,l,k,window,auc\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.param << ',' << r.value << ',' << r.dim << ',' << r.walk_length << ',' << r.walks_per_node << ','
        << r.window << ',' << r.auc << '\n';
  }
}

}  // namespace adasim
