#include <gtest/gtest.h>

#include <sstream>

#include "adasim/evaluation.hpp"
#include "oracle/naive.hpp"

using namespace adasim;

namespace {

Graph kite() { return oracle::to_graph(10, oracle::kite_edges()); }

Graph celegans() { return load_edge_list(std::filesystem::path(ADASIM_DATA_DIR) / "celegans.edgelist"); }

// Small, fast experiment settings.
ExperimentConfig quick() {
  ExperimentConfig cfg;
  cfg.repeats = 1;
  cfg.folds = 5;
  cfg.walk.walks_per_node = 4;
  cfg.walk.walk_length = 30;
  cfg.train.dim = 16;
  cfg.train.window = 5;
  return cfg;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(ScoredAuc, MatchesVectorForm) {
  const std::vector<ScoredPair> s{{0, 1, 1, 0.9}, {0, 2, 0, 0.1}, {1, 2, 1, 0.1}, {2, 3, 0, 0.5}};
  EXPECT_DOUBLE_EQ(auc(std::span<const ScoredPair>(s)), 0.625);
  std::vector<ScoredPair> bad = s;
  bad[0].score = std::nan("");
  EXPECT_THROW(auc(std::span<const ScoredPair>(bad)), InvalidArgument);
}

TEST(Methods, Parse) {
  EXPECT_EQ(parse_method("adasim").kind, MethodKind::AdaSim);
  EXPECT_EQ(parse_method("pa").heuristic, Heuristic::PA);
  EXPECT_THROW(parse_method("katz"), InvalidArgument);
  EXPECT_EQ(default_methods().size(), 8u);
}

TEST(RunMethod, HeuristicsAreFoldIndependent) {
  // Training-free scores are computed once; re-cutting the same pairs into
  // different folds cannot change their global AUC.
  const Graph g = celegans();
  auto cfg = quick();
  RepeatContext ctx(g, cfg, 0);
  const HeuristicScorer scorer(ctx.split().subgraph);
  const auto scores = scorer.score_all(HeuristicIndex::of(Heuristic::RA), ctx.pairs());
  const double global = auc(scores, ctx.labels());
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto plan = k_fold(ctx.pairs(), 5, seed);
    std::vector<double> s;
    std::vector<int> y;
    for (std::size_t f = 0; f < 5; ++f) {
      for (auto i : plan.test_indices(f)) {
        s.push_back(scores[i]);
        y.push_back(ctx.labels()[i]);
      }
    }
    EXPECT_DOUBLE_EQ(auc(s, y), global);
  }
  const auto runs = run_method(ctx, parse_method("ra"), cfg);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].fold_auc.size(), 5u);
}

TEST(RunExperiment, ShapeAndInvariants) {
  const Graph g = celegans();
  auto cfg = quick();
  cfg.repeats = 2;
  const auto r = run_experiment(g, parse_methods({"adasim", "cosine", "pa", "hei"}), cfg);
  ASSERT_EQ(r.reports.size(), 4u);
  for (const auto& rep : r.reports) {
    EXPECT_EQ(rep.fold_auc.size(), 10u);
    EXPECT_EQ(rep.repeat_auc.size(), 2u);
    const auto [lo, hi] = std::minmax_element(rep.fold_auc.begin(), rep.fold_auc.end());
    EXPECT_LE(*lo, rep.mean_auc);
    EXPECT_GE(*hi, rep.mean_auc);
    for (double a : rep.fold_auc) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
  }
  EXPECT_EQ(r.find("adasim")->params.at("p").size(), 10u);
  EXPECT_EQ(r.find("hei")->params.at("alpha").size(), 10u);
  EXPECT_EQ(r.repeats[0].split_seed, cfg.seed);
  EXPECT_EQ(r.repeats[1].split_seed, cfg.seed + 1);
  EXPECT_GT(r.find("adasim")->mean_auc, 0.5);
}

TEST(RunExperiment, ReproducibleAndJobsIndependent) {
  const Graph g = kite();
  auto cfg = quick();
  cfg.folds = 2;
  cfg.ratio = 0.4;
  cfg.repeats = 3;
  const auto methods = parse_methods({"adasim", "cn", "cclp"});
  const auto a = run_experiment(g, methods, cfg);
  cfg.jobs = 3;
  const auto b = run_experiment(g, methods, cfg);
  for (std::size_t i = 0; i < a.reports.size(); ++i) EXPECT_EQ(a.reports[i].fold_auc, b.reports[i].fold_auc);
}

TEST(RunExperiment, AdaSimBeatsChanceWhenPositivesAreCloser) {
  // Two dense communities joined by a single bridge: held-out edges sit
  // inside communities while most random non-edges cross them.
  std::vector<std::pair<std::size_t, std::size_t>> raw;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t u = 0; u < 20; ++u) {
      for (std::size_t v = u + 1; v < 20; ++v) {
        if ((u * 7 + v * 3 + c) % 3 != 0) raw.emplace_back(c * 20 + u, c * 20 + v);
      }
    }
  }
  raw.emplace_back(0, 20);
  const Graph g = oracle::to_graph(40, raw);
  auto cfg = quick();
  const auto r = run_experiment(g, parse_methods({"adasim"}), cfg);
  EXPECT_GT(r.reports[0].mean_auc, 0.5);
}

TEST(RunExperiment, EmbeddingClassifierRows) {
  const Graph g = kite();
  auto cfg = quick();
  cfg.folds = 2;
  cfg.ratio = 0.4;
  cfg.logreg.epochs = 50;
  const auto r = run_experiment(g, parse_methods({"deepwalk"}), cfg);
  ASSERT_EQ(r.reports.size(), 6u);  // five operators plus the best
  EXPECT_EQ(r.reports.back().method, "deepwalk");
  double best = 0.0;
  for (std::size_t i = 0; i < 5; ++i) best = std::max(best, r.reports[i].mean_auc);
  EXPECT_EQ(r.reports.back().mean_auc, best);
}

TEST(RunExperiment, Node2vecRecordsChosenBias) {
  const Graph g = kite();
  auto cfg = quick();
  cfg.folds = 2;
  cfg.ratio = 0.4;
  cfg.logreg.epochs = 20;
  cfg.node2vec_grid = {0.5, 2.0};
  const auto r = run_experiment(g, parse_methods({"node2vec"}), cfg);
  ASSERT_EQ(r.reports.size(), 6u);
  EXPECT_EQ(r.reports[0].params.at("return_p").size(), 2u);
}

TEST(PenaltySweep, GridIncludesZero) {
  std::vector<LabeledFeatures> d;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const int y = i % 2;
    const double b = rng.uniform(0.5, 2);
    d.push_back({{b * (rng.uniform(-1, 1) * 0.8 + (y ? 0.2 : -0.2)), b}, y});
  }
  const auto rows = penalty_sweep(d, -50, 50, 1);
  EXPECT_EQ(rows.size(), 101u);
  EXPECT_TRUE(std::any_of(rows.begin(), rows.end(), [](auto& r) { return r.p == 0.0; }));
  for (const auto& r : rows) {
    EXPECT_GE(r.auc, 0.0);
    EXPECT_LE(r.auc, 1.0);
  }
  const auto off_grid = penalty_sweep(d, -1.5, 1.5, 1);  // -1.5, -0.5, 0.5, 1.5 plus 0
  EXPECT_EQ(off_grid.size(), 5u);
  EXPECT_EQ(off_grid[2].p, 0.0);
  EXPECT_THROW(penalty_sweep(d, 1, -1, 1), InvalidArgument);
  EXPECT_THROW(penalty_sweep(d, -1, 1, 0), InvalidArgument);

  // the trained p does at least as well as cosine, up to the loss/AUC gap
  const auto model = train_penalty(d);
  const auto at_p = penalty_sweep(d, model.p - 1e-3, model.p + 1e-3, 1e-3);
  const auto at_zero = penalty_sweep(d, -1e-3, 1e-3, 1e-3);
  EXPECT_GE(at_p[1].auc, at_zero[1].auc - 0.01);
}

TEST(DistanceHistogram, StarSpokes) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= 5; ++i) e.push_back({0, i});
  const Graph star = Graph::from_edges(6, e);
  const std::vector<LabeledPair> removed{{1, 2, 1}, {3, 4, 1}, {1, 5, 1}};
  const auto h = distance_histogram(star, removed);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(*h[0].distance, 2u);
  EXPECT_DOUBLE_EQ(h[0].probability, 1.0);
}

TEST(DistanceHistogram, SumsToOneWithUnreachableBucket) {
  const Edge e[] = {{0, 1}, {1, 2}};
  const Graph g = Graph::from_edges(4, e);
  const std::vector<LabeledPair> pos{{0, 2, 1}, {0, 3, 1}, {1, 3, 1}, {0, 1, 1}};
  const auto h = distance_histogram(g, pos);
  double total = 0;
  for (const auto& b : h) total += b.probability;
  EXPECT_DOUBLE_EQ(total, 1.0);
  ASSERT_FALSE(h.back().distance.has_value());
  EXPECT_EQ(h.back().count, 2u);
  EXPECT_DOUBLE_EQ(mass_within(h, 1), 0.25);
  std::ostringstream out;
  write_distance_csv(out, h);
  EXPECT_NE(out.str().find("inf,2,0.5"), std::string::npos);
}

TEST(DistanceHistogram, MatchesFloydWarshall) {
  const auto raw = oracle::random_edges(30, 0.15, 5);
  const Graph g = oracle::to_graph(30, raw);
  const auto s = generate_split(g, 0.3, 1);
  const auto fw = oracle::floyd_warshall(oracle::Dense(s.subgraph));
  const auto h = distance_histogram(s.subgraph, s.positives);
  for (const auto& b : h) {
    std::size_t n = 0;
    for (const auto& p : s.positives) n += b.distance ? fw[p.u][p.v] == *b.distance : fw[p.u][p.v] == oracle::kInf;
    EXPECT_EQ(n, b.count);
  }
}

TEST(EdgeCorrelation, KiteRows) {
  const auto rows = edge_feature_correlation(kite(), {.seed = 1}, {.dim = 16, .seed = 2});
  EXPECT_EQ(rows.size(), 90u);
  for (const auto& r : rows) {
    if (r.pearson) {
      EXPECT_GE(*r.pearson, -1.0);
      EXPECT_LE(*r.pearson, 1.0);
    }
  }
  std::ostringstream out;
  write_correlation_csv(out, rows);
  EXPECT_EQ(count_lines(out.str()), 91u);
  EXPECT_EQ(out.str().substr(0, 21), "edge,operator,pearson");
  const double share = weak_correlation_share(rows);
  EXPECT_GE(share, 0.0);
  EXPECT_LE(share, 1.0);
}

TEST(SparsitySweep, RowsPerMethodAndSkips) {
  const Graph g = celegans();
  auto cfg = quick();
  const auto methods = parse_methods({"adasim", "cn"});
  const auto rows = sparsity_sweep(g, {0.0, 0.3, 0.9}, methods, cfg);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    if (r.fraction == 0.9) {
      EXPECT_FALSE(r.auc.has_value());
    } else {
      ASSERT_TRUE(r.auc.has_value());
      EXPECT_GE(*r.auc, 0.0);
      EXPECT_LE(*r.auc, 1.0);
    }
  }
  // fraction 0 is the plain pipeline
  const auto plain = run_experiment(g, methods, cfg);
  EXPECT_DOUBLE_EQ(*rows[0].auc, plain.reports[0].mean_auc);
  std::ostringstream out;
  write_sparsity_csv(out, rows);
  EXPECT_EQ(count_lines(out.str()), 7u);
}

TEST(SensitivitySweep, OneFactorAtATime) {
  const Graph g = kite();
  auto cfg = quick();
  cfg.folds = 2;
  cfg.ratio = 0.4;
  const auto rows = sensitivity_sweep(g, SensitivityParam::Dim, {4, 8, 16, 32, 64}, cfg);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.param, "d");
    EXPECT_EQ(r.dim, r.value);
    EXPECT_EQ(r.walk_length, cfg.walk.walk_length);
    EXPECT_EQ(r.walks_per_node, cfg.walk.walks_per_node);
    EXPECT_EQ(r.window, cfg.train.window);
  }
  const auto all = sensitivity_sweep(g, {8}, {10, 20}, {}, cfg);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[1].param, "l");
  EXPECT_EQ(all[1].dim, cfg.train.dim);
  EXPECT_EQ(parse_sensitivity("k"), SensitivityParam::WalksPerNode);
  EXPECT_THROW(parse_sensitivity("x"), InvalidArgument);
}

TEST(ReportCsv, Header) {
  EvaluationReport r;
  r.method = "cn";
  r.fold_auc = {0.5, 0.7};
  r.finalize();
  EXPECT_DOUBLE_EQ(r.mean_auc, 0.6);
  EXPECT_NEAR(r.std_auc, 0.1, 1e-15);
  std::ostringstream out;
  write_report_csv(out, {r});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "method,mean_auc,std_auc,min_auc,max_auc,folds");
}
