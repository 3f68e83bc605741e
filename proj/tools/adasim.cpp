// adasim: command-line front end for the link-prediction pipeline.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "adasim/adasim.hpp"

using namespace adasim;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kManifestVersion = 1;

// Failure inside a named pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what) : std::runtime_error(stage + ": " + what) {}
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  fn(out);
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// ---------------------------------------------------------------------------
// Option groups

struct Common {
  std::uint64_t seed = 42;
  unsigned jobs = 1;
};

struct EmbedOpts {
  std::size_t walks = 10;
  std::size_t length = 80;
  std::size_t dim = 128;
  std::size_t window = 10;
  std::size_t epochs = 1;
  double alpha = 0.025;
  std::string mode = "cbow";
};

struct ExperimentOpts {
  double ratio = 0.5;
  std::size_t folds = 10;
  std::size_t repeats = 10;
  bool no_forest = false;
  std::string optimizer = "newton";
  double lr = 0.1;
  std::size_t penalty_epochs = 500;
  std::size_t logreg_epochs = 300;
  std::vector<double> n2v_grid{0.25, 0.5, 1.0, 2.0};
};

void add_common(CLI::App* cmd, Common& o) {
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_walk(CLI::App* cmd, EmbedOpts& o) {
  cmd->add_option("--walks", o.walks, "Walks per node (k)")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--length", o.length, "Walk length (l)")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_embed(CLI::App* cmd, EmbedOpts& o) {
  add_walk(cmd, o);
  cmd->add_option("--dim", o.dim, "Embedding dimension (d)")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--window", o.window, "Context window")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", o.epochs, "Passes over the corpus")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", o.alpha, "Initial learning rate")->capture_default_str();
}

void add_experiment(CLI::App* cmd, ExperimentOpts& o) {
  cmd->add_option("--ratio", o.ratio, "Share of edges held out as positives")->capture_default_str();
  cmd->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
  cmd->add_option("--repeats", o.repeats, "Independent splits")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_flag("--no-forest-protection", o.no_forest, "Allow removing spanning-forest edges");
  cmd->add_option("--optimizer", o.optimizer, "Penalty optimizer: newton, gd, sgd")->capture_default_str();
  cmd->add_option("--lr", o.lr, "Penalty learning rate (gd, sgd)")->capture_default_str();
  cmd->add_option("--penalty-epochs", o.penalty_epochs, "Penalty iterations")->capture_default_str();
  cmd->add_option("--logreg-epochs", o.logreg_epochs, "Logistic regression epochs")->capture_default_str();
  cmd->add_option("--node2vec-grid", o.n2v_grid, "node2vec p and q candidates")->delimiter(',')->capture_default_str();
}

TrainMode parse_mode(const std::string& s) {
  if (s == "cbow" || s == "context") return TrainMode::ContextAverage;
  if (s == "skipgram" || s == "sg") return TrainMode::SkipGram;
  throw InvalidArgument("unknown training mode '" + s + "' (cbow, skipgram)");
}

WalkConfig walk_config(const EmbedOpts& e, std::uint64_t seed, unsigned jobs) {
  WalkConfig w;
  w.walks_per_node = e.walks;
  w.walk_length = e.length;
  w.seed = seed;
  w.jobs = jobs;
  return w;
}

TrainConfig train_config(const EmbedOpts& e, std::uint64_t seed) {
  TrainConfig t;
  t.dim = e.dim;
  t.window = e.window;
  t.epochs = e.epochs;
  t.alpha0 = e.alpha;
  t.alpha_min = std::min(t.alpha_min, e.alpha);
  t.seed = seed;
  t.mode = parse_mode(e.mode);
  return t;
}

ExperimentConfig experiment_config(const Common& c, const EmbedOpts& e, const ExperimentOpts& x) {
  ExperimentConfig cfg;
  cfg.ratio = x.ratio;
  cfg.folds = x.folds;
  cfg.repeats = x.repeats;
  cfg.seed = c.seed;
  cfg.jobs = c.jobs;
  cfg.split.protect_forest = !x.no_forest;
  cfg.walk = walk_config(e, c.seed, 1);
  cfg.train = train_config(e, c.seed);
  cfg.penalty.optimizer = parse_optimizer(x.optimizer);
  cfg.penalty.learning_rate = x.lr;
  cfg.penalty.epochs = x.penalty_epochs;
  cfg.logreg.epochs = x.logreg_epochs;
  cfg.node2vec_grid = x.n2v_grid;
  return cfg;
}

Json config_json(const ExperimentConfig& c) {
  return Json{{"ratio", c.ratio},
              {"folds", c.folds},
              {"repeats", c.repeats},
              {"seed", c.seed},
              {"protect_forest", c.split.protect_forest},
              {"walk", {{"walks_per_node", c.walk.walks_per_node}, {"walk_length", c.walk.walk_length}}},
              {"train",
               {{"dim", c.train.dim},
                {"window", c.train.window},
                {"epochs", c.train.epochs},
                {"alpha0", c.train.alpha0},
                {"alpha_min", c.train.alpha_min}}},
              {"penalty",
               {{"optimizer", optimizer_name(c.penalty.optimizer)},
                {"learning_rate", c.penalty.learning_rate},
                {"epochs", c.penalty.epochs},
                {"tolerance", c.penalty.tolerance}}},
              {"logreg",
               {{"learning_rate", c.logreg.learning_rate}, {"epochs", c.logreg.epochs}, {"l2", c.logreg.l2}}},
              {"node2vec_grid", c.node2vec_grid}};
}

void announce_seed(std::uint64_t seed) { std::cerr << "seed: " << seed << '\n'; }

Graph load_graph(const std::string& path) {
  return stage("load", [&] { return load_edge_list(fs::path(path)); });
}

std::string number_key(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------
// Sweep manifests: completed grid points are kept in run.json and reused
// when the configuration matches.

class Manifest {
 public:
  Manifest(fs::path dir, std::string command, Json config)
      : path_(std::move(dir) / "run.json"), command_(std::move(command)), config_(std::move(config)) {
    std::ifstream in(path_);
    if (!in) return;
    try {
      const Json old = Json::parse(in);
      if (old.value("version", 0) == kManifestVersion && old.value("command", "") == command_ &&
          old.value("config", Json()) == config_ && old.contains("points")) {
        points_ = old["points"];
        timings_ = old.value("timings", Json::object());
      }
    } catch (const Json::exception&) {
      // unreadable manifest: start over
    }
  }

  const Json* find(const std::string& key) const {
    auto it = points_.find(key);
    return it == points_.end() ? nullptr : &*it;
  }

  void complete(const std::string& key, Json value, double seconds) {
    points_[key] = std::move(value);
    timings_[key] = seconds;
    save();
  }

  void save() const {
    Json j{{"version", kManifestVersion},
           {"command", command_},
           {"config", config_},
           {"points", points_},
           {"timings", timings_}};
    write_file(path_, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  }

 private:
  fs::path path_;
  std::string command_;
  Json config_;
  Json points_ = Json::object();
  Json timings_ = Json::object();
};

// ---------------------------------------------------------------------------
// Subcommands

int cmd_stats(const std::string& path, bool json, bool diameter, const Common& c) {
  announce_seed(c.seed);
  const Graph g = load_graph(path);
  const auto r = stage("stats", [&] { return topology_report(g, diameter); });
  Json j{{"graph", path},
         {"nodes", r.node_count},
         {"edges", r.edge_count},
         {"avg_degree", r.avg_degree},
         {"avg_clustering", r.avg_clustering},
         {"density", r.density}};
  if (r.diameter) j["diameter"] = *r.diameter;
  if (json) {
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << std::left << std::setw(16) << "nodes" << r.node_count << '\n'
            << std::setw(16) << "edges" << r.edge_count << '\n'
            << std::setw(16) << "avg_degree" << std::fixed << std::setprecision(4) << r.avg_degree << '\n'
            << std::setw(16) << "avg_clustering" << r.avg_clustering << '\n'
            << std::setw(16) << "density" << std::setprecision(6) << r.density << '\n';
  if (r.diameter) std::cout << std::setw(16) << "diameter" << *r.diameter << '\n';
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_split(const std::string& path, double ratio, bool no_forest, const std::string& out, const Common& c) {
  announce_seed(c.seed);
  const Graph g = load_graph(path);
  const auto s = stage("split", [&] { return generate_split(g, ratio, c.seed, {.protect_forest = !no_forest}); });
  stage("write", [&] { save_split(out, s); });
  std::cout << "positives " << s.positives.size() << ", negatives " << s.negatives.size() << ", subgraph edges "
            << s.subgraph.edge_count() << '\n';
  return 0;
}

int cmd_walk(const std::string& path, const EmbedOpts& e, std::optional<double> p, std::optional<double> q,
             const std::string& out, const Common& c) {
  announce_seed(c.seed);
  const Graph g = load_graph(path);
  WalkConfig w = walk_config(e, c.seed, c.jobs);
  if (p || q) w.bias = WalkBias{p.value_or(1.0), q.value_or(1.0)};
  const Corpus corpus = stage("walk", [&] { return w.bias ? biased_walks(g, w) : random_walks(g, w); });
  stage("write", [&] { write_file(out, [&](std::ostream& o) { write_corpus(o, corpus, g); }); });
  std::cout << corpus.sequences.size() << " walks, " << corpus.token_count() << " tokens\n";
  return 0;
}

int cmd_embed(const std::string& path, const EmbedOpts& e, const std::string& corpus_path, const std::string& out,
              const Common& c) {
  announce_seed(c.seed);
  const Graph g = load_graph(path);
  const Corpus corpus = stage("walk", [&] {
    if (!corpus_path.empty()) {
      std::ifstream in(corpus_path);
      if (!in) throw Error("cannot open corpus '" + corpus_path + "'");
      return read_corpus(in, g);
    }
    return random_walks(g, walk_config(e, derive_seed(c.seed, 11), c.jobs));
  });
  TrainConfig t = train_config(e, derive_seed(c.seed, 12));
  t.jobs = c.jobs;
  TrainStats stats;
  const auto emb = stage("embed", [&] { return train(corpus, t, g, &stats); });
  stage("write", [&] { save_embeddings(fs::path(out), emb); });
  std::cout << emb.rows() << " vectors of dimension " << emb.dim() << '\n';
  return 0;
}

std::vector<LabeledFeatures> split_features(const SplitResult& s, const std::string& emb_path) {
  const auto emb = align_to_graph(load_embeddings(fs::path(emb_path)), s.subgraph);
  return detail::features_of(emb, s.pairs());
}

int cmd_train(const std::string& split_dir, const std::string& emb_path, const ExperimentOpts& x,
              const std::string& out, const std::string& trace, const Common& c) {
  announce_seed(c.seed);
  const auto s = stage("load", [&] { return load_split(split_dir); });
  const auto data = stage("features", [&] { return split_features(s, emb_path); });
  PenaltyConfig pc;
  pc.optimizer = parse_optimizer(x.optimizer);
  pc.learning_rate = x.lr;
  pc.epochs = x.penalty_epochs;
  pc.seed = c.seed;
  const auto model = stage("train", [&] { return train_penalty(data, pc); });
  stage("write", [&] {
    save_model(fs::path(out), model);
    if (!trace.empty()) write_file(trace, [&](std::ostream& o) { write_loss_trace(o, model); });
  });
  std::cout << std::setprecision(10) << "p = " << model.p << ", loss = " << model.loss_trace.back() << '\n';
  return 0;
}

int cmd_score(const std::string& split_dir, const std::string& method, const std::string& emb_path,
              const std::string& model_path, std::optional<double> alpha, const std::string& out, const Common& c) {
  announce_seed(c.seed);
  const auto s = stage("load", [&] { return load_split(split_dir); });
  const auto spec = parse_method(method);
  const auto pairs = s.pairs();
  std::vector<double> scores = stage("score", [&] {
    switch (spec.kind) {
      case MethodKind::AdaSim:
      case MethodKind::Cosine: {
        if (emb_path.empty()) throw InvalidArgument(method + " needs --embeddings");
        double p = 0.0;
        if (spec.kind == MethodKind::AdaSim) {
          if (model_path.empty()) throw InvalidArgument("adasim needs --model");
          p = load_model(fs::path(model_path)).p;
        }
        std::vector<double> out_scores;
        for (const auto& f : split_features(s, emb_path)) out_scores.push_back(score(p, f.f));
        return out_scores;
      }
      case MethodKind::Heuristic: {
        const HeuristicScorer scorer(s.subgraph);
        HeuristicIndex index{spec.heuristic, std::nullopt};
        if (spec.heuristic == Heuristic::HEI) {
          index.hei_alpha = alpha ? *alpha : tune_hei_alpha(s.subgraph, pairs);
        }
        return scorer.score_all(index, pairs);
      }
      default:
        throw InvalidArgument(method + " is a trained classifier; use `pipeline`");
    }
  });
  std::vector<ScoredPair> scored;
  for (std::size_t i = 0; i < pairs.size(); ++i) scored.push_back({pairs[i].u, pairs[i].v, pairs[i].label, scores[i]});
  stage("write", [&] { write_file(out, [&](std::ostream& o) { write_scores_csv(o, s.subgraph, scored); }); });
  std::cout << std::setprecision(6) << std::fixed << "auc " << auc(std::span<const ScoredPair>(scored)) << '\n';
  return 0;
}

int cmd_eval(const std::string& path, bool json, const Common& c) {
  announce_seed(c.seed);
  std::vector<double> scores;
  std::vector<int> labels;
  stage("load", [&] {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scores '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      if (++line_no == 1 || line.empty()) continue;
      std::istringstream row(line);
      std::string u, v, y, sc;
      if (!std::getline(row, u, ',') || !std::getline(row, v, ',') || !std::getline(row, y, ',') ||
          !std::getline(row, sc)) {
        throw ParseError("expected u,v,label,score", line_no, path + ": ");
      }
      try {
        labels.push_back(std::stoi(y));
        scores.push_back(std::stod(sc));
      } catch (const std::logic_error&) {
        throw ParseError("bad number", line_no, path + ": ");
      }
    }
  });
  const double a = stage("eval", [&] { return auc(scores, labels); });
  if (json) {
    std::cout << Json{{"scores", path}, {"pairs", scores.size()}, {"auc", a}}.dump(2) << '\n';
  } else {
    std::cout << std::setprecision(6) << std::fixed << "auc " << a << " over " << scores.size() << " pairs\n";
  }
  return 0;
}

void print_reports(const std::vector<EvaluationReport>& reports) {
  std::size_t width = 8;
  for (const auto& r : reports) width = std::max(width, r.method.size() + 2);
  std::cout << std::left << std::setw(static_cast<int>(width)) << "method" << std::right << std::setw(10) << "auc"
            << std::setw(10) << "std" << '\n';
  for (const auto& r : reports) {
    std::cout << std::left << std::setw(static_cast<int>(width)) << r.method << std::right << std::fixed
              << std::setprecision(4) << std::setw(10) << r.mean_auc << std::setw(10) << r.std_auc << '\n';
  }
}

int cmd_pipeline(const std::string& path, const std::vector<std::string>& method_names, const ExperimentConfig& cfg,
                 const std::string& out_dir) {
  announce_seed(cfg.seed);
  const auto start = std::chrono::steady_clock::now();
  const fs::path out(out_dir);
  const Graph g = load_graph(path);
  const auto methods = stage("config", [&] { return parse_methods(method_names); });

  // Artifacts of the first repeat: its split, embeddings and a penalty fitted
  // on all of its pairs.
  RepeatContext first = stage("split", [&] { return RepeatContext(g, cfg, 0); });
  stage("split", [&] { save_split(out / "split", first.split()); });
  const auto& emb = stage("embed", [&]() -> const EmbeddingMatrix& { return first.embedding(TrainMode::ContextAverage); });
  stage("embed", [&] { save_embeddings(out / "embeddings.txt", emb); });
  const auto model = stage("train", [&] { return train_penalty(detail::features_of(emb, first.pairs()), cfg.penalty); });
  stage("train", [&] {
    save_model(out / "model.txt", model);
    write_file(out / "loss_trace.csv", [&](std::ostream& o) { write_loss_trace(o, model); });
  });

  const auto result = stage("evaluate", [&] { return run_experiment(g, methods, cfg); });
  stage("report", [&] {
    write_file(out / "report.csv", [&](std::ostream& o) { write_report_csv(o, result.reports); });
    write_file(out / "folds.csv", [&](std::ostream& o) { write_folds_csv(o, result.reports, cfg.folds); });
    Json reports = Json::array();
    for (const auto& r : result.reports) {
      Json params = Json::object();
      for (const auto& [k, v] : r.params) params[k] = v;
      reports.push_back({{"method", r.method},
                         {"mean_auc", r.mean_auc},
                         {"std_auc", r.std_auc},
                         {"fold_auc", r.fold_auc},
                         {"repeat_auc", r.repeat_auc},
                         {"params", params},
                         {"seconds", r.seconds}});
    }
    Json repeats = Json::array();
    for (const auto& r : result.repeats) {
      repeats.push_back({{"split_seed", r.split_seed},
                         {"positives", r.positives},
                         {"negatives", r.negatives},
                         {"embedding_seconds", r.embedding_seconds}});
    }
    const Json manifest{{"version", kManifestVersion},
                        {"command", "pipeline"},
                        {"graph", path},
                        {"nodes", g.node_count()},
                        {"edges", g.edge_count()},
                        {"methods", method_names},
                        {"config", config_json(cfg)},
                        {"model", {{"p", model.p}, {"iterations", model.loss_trace.size()}}},
                        {"repeats", repeats},
                        {"reports", reports},
                        {"seconds", elapsed(start)}};
    write_file(out / "run.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
  });
  print_reports(result.reports);
  return 0;
}

int cmd_sweep_penalty(const std::string& path, const ExperimentConfig& cfg, double lo, double hi, double step,
                      const std::string& out_dir) {
  announce_seed(cfg.seed);
  const fs::path out(out_dir);
  const Graph g = load_graph(path);
  RepeatContext ctx = stage("split", [&] { return RepeatContext(g, cfg, 0); });
  const auto data = stage("embed", [&] { return detail::features_of(ctx.embedding(TrainMode::ContextAverage), ctx.pairs()); });
  const auto rows = stage("sweep", [&] { return penalty_sweep(data, lo, hi, step); });
  const auto model = stage("train", [&] { return train_penalty(data, cfg.penalty); });
  stage("write", [&] {
    write_file(out / "penalty.csv", [&](std::ostream& o) { write_penalty_csv(o, rows); });
    Json config = config_json(cfg);
    config["grid"] = {{"min", lo}, {"max", hi}, {"step", step}};
    Manifest m(out, "sweep penalty", config);
    m.complete("learned_p", model.p, 0.0);
  });
  const auto best = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.auc < b.auc; });
  std::cout << rows.size() << " grid points; best p " << best->p << " (auc " << std::setprecision(4) << std::fixed
            << best->auc << "), learned p " << model.p << '\n';
  return 0;
}

int cmd_sweep_sparsity(const std::string& path, const ExperimentConfig& cfg, const std::vector<double>& fractions,
                       const std::vector<std::string>& method_names, const std::string& out_dir) {
  announce_seed(cfg.seed);
  const fs::path out(out_dir);
  const Graph g = load_graph(path);
  const auto methods = stage("config", [&] { return parse_methods(method_names); });
  Json config = config_json(cfg);
  config["graph"] = path;
  config["methods"] = method_names;
  Manifest manifest(out, "sweep sparsity", config);

  std::vector<SparsityRow> rows;
  std::size_t resumed = 0;
  for (double f : fractions) {
    const std::string key = number_key(f);
    if (const Json* done = manifest.find(key)) {
      ++resumed;
      for (const auto& r : *done) {
        SparsityRow row{f, r.at("method").get<std::string>(), std::nullopt, r.at("note").get<std::string>()};
        if (!r.at("auc").is_null()) row.auc = r.at("auc").get<double>();
        rows.push_back(std::move(row));
      }
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto part = stage("sweep", [&] { return sparsity_sweep(g, {f}, methods, cfg); });
    Json saved = Json::array();
    for (const auto& r : part) {
      saved.push_back({{"method", r.method}, {"auc", r.auc ? Json(*r.auc) : Json()}, {"note", r.note}});
    }
    stage("write", [&] { manifest.complete(key, saved, elapsed(t0)); });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  stage("write", [&] { write_file(out / "sparsity.csv", [&](std::ostream& o) { write_sparsity_csv(o, rows); }); });
  if (resumed) std::cerr << "resumed " << resumed << " completed grid point(s)\n";
  std::cout << rows.size() << " rows\n";
  return 0;
}

int cmd_sweep_sensitivity(const std::string& path, const ExperimentConfig& cfg, const std::string& param_name,
                          const std::vector<std::size_t>& grid, const std::string& out_dir) {
  announce_seed(cfg.seed);
  const fs::path out(out_dir);
  const Graph g = load_graph(path);
  const auto param = stage("config", [&] { return parse_sensitivity(param_name); });
  Json config = config_json(cfg);
  config["graph"] = path;
  config["param"] = sensitivity_name(param);
  Manifest manifest(out, "sweep sensitivity", config);

  std::vector<SensitivityRow> rows;
  std::size_t resumed = 0;
  for (std::size_t value : grid) {
    const std::string key = std::to_string(value);
    if (const Json* done = manifest.find(key)) {
      ++resumed;
      rows.push_back({sensitivity_name(param), value, done->at("d").get<std::size_t>(), done->at("l").get<std::size_t>(),
                      done->at("k").get<std::size_t>(), done->at("window").get<std::size_t>(),
                      done->at("auc").get<double>()});
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto part = stage("sweep", [&] { return sensitivity_sweep(g, param, {value}, cfg); });
    const auto& r = part.front();
    stage("write", [&] {
      manifest.complete(key,
                        {{"d", r.dim}, {"l", r.walk_length}, {"k", r.walks_per_node}, {"window", r.window}, {"auc", r.auc}},
                        elapsed(t0));
    });
    rows.push_back(r);
  }
  stage("write", [&] { write_file(out / "sensitivity.csv", [&](std::ostream& o) { write_sensitivity_csv(o, rows); }); });
  if (resumed) std::cerr << "resumed " << resumed << " completed grid point(s)\n";
  std::cout << rows.size() << " rows\n";
  return 0;
}

int cmd_figure_distance(const std::string& path, double ratio, bool no_forest, const std::string& out,
                        const Common& c) {
  announce_seed(c.seed);
  const Graph g = load_graph(path);
  const auto s = stage("split", [&] { return generate_split(g, ratio, c.seed, {.protect_forest = !no_forest}); });
  const auto hist = stage("distance", [&] { return distance_histogram(s.subgraph, s.positives); });
  stage("write", [&] { write_file(out, [&](std::ostream& o) { write_distance_csv(o, hist); }); });
  std::cout << std::fixed << std::setprecision(4) << "mass within distance 3: " << mass_within(hist, 3) << '\n';
  return 0;
}

int cmd_figure_correlation(const std::string& path, const EmbedOpts& e, const std::string& out, const Common& c) {
  announce_seed(c.seed);
  const Graph g = load_graph(path);
  const auto rows = stage("correlation", [&] {
    return edge_feature_correlation(g, walk_config(e, derive_seed(c.seed, 11), c.jobs),
                                    train_config(e, derive_seed(c.seed, 12)));
  });
  stage("write", [&] { write_file(out, [&](std::ostream& o) { write_correlation_csv(o, rows); }); });
  std::cout << std::fixed << std::setprecision(4) << "share of |r| < 0.5: " << weak_correlation_share(rows) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-similarity link prediction"};
  app.set_config("--config", "", "INI or TOML file with option values; flags take precedence");
  app.require_subcommand(1);

  std::function<int()> run;
  Common common;
  EmbedOpts embed;
  ExperimentOpts exp;
  std::string graph, out, split_dir, emb_path, model_path, trace, corpus_path, method = "adasim";
  bool json = false, diameter = false;
  std::optional<double> walk_p, walk_q, hei_alpha;
  std::vector<std::string> methods = default_methods();
  auto experiment = [&] { return experiment_config(common, embed, exp); };

  auto* stats = app.add_subcommand("stats", "Topology summary of an edge list");
  stats->add_option("graph", graph, "Edge list")->required();
  stats->add_flag("--json", json, "Print only a JSON object");
  stats->add_flag("--diameter", diameter, "Also compute the diameter (one BFS per node)");
  add_common(stats, common);
  stats->callback([&] { run = [&] { return cmd_stats(graph, json, diameter, common); }; });

  auto* split = app.add_subcommand("split", "Hold out edges and sample non-edges");
  split->add_option("graph", graph, "Edge list")->required();
  split->add_option("--ratio", exp.ratio, "Share of edges held out")->capture_default_str();
  split->add_flag("--no-forest-protection", exp.no_forest, "Allow removing spanning-forest edges");
  split->add_option("--out", out, "Output directory")->required();
  add_common(split, common);
  split->callback([&] { run = [&] { return cmd_split(graph, exp.ratio, exp.no_forest, out, common); }; });

  auto* walk = app.add_subcommand("walk", "Write a random-walk corpus");
  walk->add_option("graph", graph, "Edge list")->required();
  add_walk(walk, embed);
  walk->add_option("--p", walk_p, "Return parameter (biased walks)");
  walk->add_option("--q", walk_q, "In-out parameter (biased walks)");
  walk->add_option("--out", out, "Corpus file")->required();
  add_common(walk, common);
  walk->callback([&] { run = [&] { return cmd_walk(graph, embed, walk_p, walk_q, out, common); }; });

  auto* emb = app.add_subcommand("embed", "Learn node embeddings");
  emb->add_option("graph", graph, "Edge list")->required();
  add_embed(emb, embed);
  emb->add_option("--mode", embed.mode, "cbow or skipgram")->capture_default_str();
  emb->add_option("--corpus", corpus_path, "Train on this corpus instead of fresh walks");
  emb->add_option("--out", out, "Embedding file (word2vec text)")->required();
  add_common(emb, common);
  emb->callback([&] { run = [&] { return cmd_embed(graph, embed, corpus_path, out, common); }; });

  auto* trn = app.add_subcommand("train", "Fit the penalty on a split");
  trn->add_option("--split", split_dir, "Split directory")->required();
  trn->add_option("--embeddings", emb_path, "Embedding file")->required();
  trn->add_option("--optimizer", exp.optimizer, "newton, gd or sgd")->capture_default_str();
  trn->add_option("--lr", exp.lr, "Learning rate (gd, sgd)")->capture_default_str();
  trn->add_option("--epochs", exp.penalty_epochs, "Iterations")->capture_default_str();
  trn->add_option("--trace", trace, "Loss trace CSV");
  trn->add_option("--out", out, "Model file")->required();
  add_common(trn, common);
  trn->callback([&] { run = [&] { return cmd_train(split_dir, emb_path, exp, out, trace, common); }; });

  auto* sc = app.add_subcommand("score", "Score the pairs of a split");
  sc->add_option("--split", split_dir, "Split directory")->required();
  sc->add_option("--method", method, "adasim, cosine, cn, ra, pa, si, cclp, hei")->capture_default_str();
  sc->add_option("--embeddings", emb_path, "Embedding file (adasim, cosine)");
  sc->add_option("--model", model_path, "Model file (adasim)");
  sc->add_option("--alpha", hei_alpha, "HEI exponent; tuned on the split when omitted");
  sc->add_option("--out", out, "Scores CSV")->required();
  add_common(sc, common);
  sc->callback([&] { run = [&] { return cmd_score(split_dir, method, emb_path, model_path, hei_alpha, out, common); }; });

  auto* ev = app.add_subcommand("eval", "AUC of a scores CSV");
  ev->add_option("scores", out, "Scores CSV (u,v,label,score)")->required();
  ev->add_flag("--json", json, "Print a JSON object");
  add_common(ev, common);
  ev->callback([&] { run = [&] { return cmd_eval(out, json, common); }; });

  auto* pipe = app.add_subcommand("pipeline", "Split, embed, train and evaluate every method");
  pipe->add_option("graph", graph, "Edge list")->required();
  pipe->add_option("--methods", methods, "Methods to evaluate")->delimiter(',')->capture_default_str();
  add_embed(pipe, embed);
  add_experiment(pipe, exp);
  pipe->add_option("--out", out, "Output directory")->required();
  add_common(pipe, common);
  pipe->callback([&] { run = [&] { return cmd_pipeline(graph, methods, experiment(), out); }; });

  auto* sweep = app.add_subcommand("sweep", "Parameter studies");
  sweep->require_subcommand(1);
  double p_min = -50, p_max = 50, p_step = 1;
  std::vector<double> fractions{0.5, 0.6, 0.7, 0.8};
  std::string param = "d";
  std::vector<std::size_t> grid{16, 32, 64, 128, 256};
  auto sweep_common = [&](CLI::App* cmd) {
    cmd->add_option("graph", graph, "Edge list")->required();
    add_embed(cmd, embed);
    add_experiment(cmd, exp);
    cmd->add_option("--out", out, "Output directory")->required();
    add_common(cmd, common);
  };
  auto* pen = sweep->add_subcommand("penalty", "AUC over a grid of fixed p");
  sweep_common(pen);
  pen->add_option("--min", p_min, "Smallest p")->capture_default_str();
  pen->add_option("--max", p_max, "Largest p")->capture_default_str();
  pen->add_option("--step", p_step, "Grid step")->capture_default_str();
  pen->callback([&] { run = [&] { return cmd_sweep_penalty(graph, experiment(), p_min, p_max, p_step, out); }; });
  auto* spa = sweep->add_subcommand("sparsity", "Methods on increasingly sparse copies");
  sweep_common(spa);
  spa->add_option("--fractions", fractions, "Shares of edges removed first")->delimiter(',')->capture_default_str();
  spa->add_option("--methods", methods, "Methods to evaluate")->delimiter(',')->capture_default_str();
  spa->callback([&] { run = [&] { return cmd_sweep_sparsity(graph, experiment(), fractions, methods, out); }; });
  auto* sen = sweep->add_subcommand("sensitivity", "AdaSim AUC over d, l or k");
  sweep_common(sen);
  sen->add_option("--param", param, "d, l or k")->capture_default_str();
  sen->add_option("--grid", grid, "Values")->delimiter(',')->capture_default_str();
  sen->callback([&] { run = [&] { return cmd_sweep_sensitivity(graph, experiment(), param, grid, out); }; });

  auto* fig = app.add_subcommand("figure", "CSV data for the distance and correlation figures");
  fig->require_subcommand(1);
  auto* dist = fig->add_subcommand("distance", "Geodesic distance of held-out edges in the residual graph");
  dist->add_option("graph", graph, "Edge list")->required();
  dist->add_option("--ratio", exp.ratio, "Share of edges held out")->capture_default_str();
  dist->add_flag("--no-forest-protection", exp.no_forest, "Allow removing spanning-forest edges");
  dist->add_option("--out", out, "CSV file")->required();
  add_common(dist, common);
  dist->callback([&] { run = [&] { return cmd_figure_distance(graph, exp.ratio, exp.no_forest, out, common); }; });
  auto* corr = fig->add_subcommand("correlation", "Operator edge features versus learned edge vectors");
  corr->add_option("graph", graph, "Edge list")->required();
  add_embed(corr, embed);
  corr->add_option("--out", out, "CSV file")->required();
  add_common(corr, common);
  corr->callback([&] { run = [&] { return cmd_figure_correlation(graph, embed, out, common); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
