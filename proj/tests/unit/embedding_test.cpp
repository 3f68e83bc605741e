#include <gtest/gtest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "adasim/embedding.hpp"
#include "adasim/similarity.hpp"
#include "oracle/naive.hpp"

using namespace adasim;

namespace {

std::vector<std::uint64_t> random_counts(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint64_t> c(n);
  for (auto& x : c) x = 1 + rng.below(50);
  return c;
}

std::vector<double> random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

bool prefix_free(const HuffmanTree& t) {
  for (std::size_t a = 0; a < t.leaf_count(); ++a) {
    for (std::size_t b = 0; b < t.leaf_count(); ++b) {
      if (a == b) continue;
      const auto& ca = t.codes[a];
      const auto& cb = t.codes[b];
      if (ca.size() <= cb.size() && std::equal(ca.begin(), ca.end(), cb.begin())) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Huffman, TwoSymbols) {
  const std::uint64_t c[] = {1, 1};
  const auto t = build_huffman(c);
  EXPECT_EQ(t.codes[0].size(), 1u);
  EXPECT_EQ(t.codes[1].size(), 1u);
  EXPECT_EQ(t.internal_count(), 1u);
}

TEST(Huffman, ThreeSymbols) {
  const std::uint64_t c[] = {5, 1, 1};
  const auto t = build_huffman(c);
  EXPECT_EQ(t.codes[0].size(), 1u);
  EXPECT_EQ(t.codes[1].size(), 2u);
  EXPECT_EQ(t.codes[2].size(), 2u);
}

TEST(Huffman, Errors) {
  const std::uint64_t one[] = {3};
  const std::uint64_t zero[] = {3, 0};
  EXPECT_THROW(build_huffman(one), InvalidArgument);
  EXPECT_THROW(build_huffman(zero), InvalidArgument);
  EXPECT_THROW(build_huffman(std::span<const std::uint64_t>{}), InvalidArgument);
}

TEST(Huffman, OptimalPrefixFreeCodes) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto counts = random_counts(12, seed);
    const auto t = build_huffman(counts);
    ASSERT_EQ(t.leaf_count(), 12u);
    std::uint64_t cost = 0;
    std::set<std::uint32_t> internal;
    for (std::size_t i = 0; i < 12; ++i) {
      EXPECT_EQ(t.codes[i].size(), t.paths[i].size());
      EXPECT_EQ(t.paths[i].front(), t.paths[0].front()) << "all paths start at the root";
      cost += counts[i] * t.codes[i].size();
      internal.insert(t.paths[i].begin(), t.paths[i].end());
    }
    EXPECT_EQ(cost, oracle::optimal_code_cost(counts));
    EXPECT_EQ(internal.size(), 11u);
    EXPECT_TRUE(prefix_free(t));
  }
}

TEST(Huffman, TiesAreDeterministic) {
  const std::vector<std::uint64_t> c(9, 4);
  const auto a = build_huffman(c);
  const auto b = build_huffman(c);
  EXPECT_EQ(a.codes, b.codes);
  EXPECT_EQ(a.paths, b.paths);
}

TEST(HierarchicalSoftmax, LeafProbabilitiesSumToOne) {
  Rng rng(5);
  for (std::size_t vocab = 2; vocab <= 16; ++vocab) {
    const auto counts = random_counts(vocab, vocab);
    const auto t = build_huffman(counts);
    const std::size_t d = 6;
    const auto internal = random_vec(t.internal_count() * d, rng, 2.0);
    const auto x = random_vec(d, rng, 2.0);
    double total = 0.0;
    for (std::size_t leaf = 0; leaf < vocab; ++leaf) total += hs_probability(t, leaf, x, internal);
    EXPECT_NEAR(total, 1.0, 1e-10) << "vocab " << vocab;
  }
}

TEST(HierarchicalSoftmax, GradientMatchesFiniteDifferences) {
  Rng rng(11);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t vocab = 3 + rng.below(10);
    const auto t = build_huffman(random_counts(vocab, 100 + trial));
    const std::size_t d = 4;
    auto internal = random_vec(t.internal_count() * d, rng);
    auto x = random_vec(d, rng);
    const std::size_t leaf = rng.below(vocab);
    std::vector<double> gx(d, 0.0), gw(internal.size(), 0.0);
    hs_loss_gradient(t, leaf, x, internal, gx, gw);
    auto nll = [&] { return -std::log(hs_probability(t, leaf, x, internal)); };
    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = nll();
      param = saved - h;
      const double down = nll();
      param = saved;
      const double numeric = (up - down) / (2 * h);
      EXPECT_LE(std::abs(numeric - analytic), 1e-4 * std::max(1.0, std::abs(numeric)));
    };
    for (std::size_t k = 0; k < d; ++k) check(x[k], gx[k]);
    for (std::size_t k = 0; k < internal.size(); ++k) check(internal[k], gw[k]);
  }
}

TEST(SigmoidTable, ClipsAndApproximates) {
  const SigmoidTable s;
  EXPECT_FLOAT_EQ(s(100.0f), s(6.0f));
  EXPECT_FLOAT_EQ(s(-100.0f), s(-6.0f));
  for (float t = -5.9f; t < 5.9f; t += 0.1f) EXPECT_NEAR(s(t), exact_sigmoid(t), 0.01);
}

TEST(Train, TwoNodePathLossDecreases) {
  const Edge e[] = {{0, 1}};
  const Graph g = Graph::from_edges(2, e);
  const auto corpus = random_walks(g, {.walks_per_node = 200, .walk_length = 20, .seed = 1});
  TrainStats stats;
  // window 1: with 2 both centers would see the same averaged context
  const auto emb = train(corpus, {.dim = 2, .window = 1, .seed = 3}, g, &stats);
  for (float x : emb.data()) EXPECT_TRUE(std::isfinite(x));
  ASSERT_GE(stats.chunk_loss.size(), 20u);
  const std::size_t tenth = stats.chunk_loss.size() / 10;
  const double first = std::accumulate(stats.chunk_loss.begin(), stats.chunk_loss.begin() + tenth, 0.0);
  const double last = std::accumulate(stats.chunk_loss.end() - tenth, stats.chunk_loss.end(), 0.0);
  EXPECT_LE(last, first);
  EXPECT_EQ(stats.positions, corpus.token_count());
}

TEST(Train, KiteAdjacentPairsMoreSimilar) {
  const Graph g = oracle::to_graph(10, oracle::kite_edges());
  const auto corpus = random_walks(g, {.walks_per_node = 10, .walk_length = 80, .seed = 42});
  for (auto mode : {TrainMode::ContextAverage, TrainMode::SkipGram}) {
    const auto emb = train(corpus, {.dim = 16, .seed = 7, .mode = mode}, g);
    double adj = 0, non = 0;
    int na = 0, nn = 0;
    for (NodeId u = 0; u < 10; ++u) {
      for (NodeId v = u + 1; v < 10; ++v) {
        const double c = cosine(emb.row(u), emb.row(v));
        if (g.has_edge(u, v)) {
          adj += c;
          ++na;
        } else {
          non += c;
          ++nn;
        }
      }
    }
    EXPECT_EQ(na + nn, 45);
    EXPECT_GT(adj / na, non / nn);
  }
}

TEST(Train, DeterministicSingleThreaded) {
  const Graph g = oracle::to_graph(10, oracle::kite_edges());
  const auto corpus = random_walks(g, {.walks_per_node = 5, .walk_length = 30, .seed = 2});
  const TrainConfig cfg{.dim = 8, .seed = 4};
  const auto a = train(corpus, cfg, g);
  const auto b = train(corpus, cfg, g);
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

TEST(Train, UnseenTokensKeepInitialVector) {
  Corpus c;
  c.sequences = {{0, 1, 0, 1}};
  c.recount(3);
  const auto emb = train(c, {.dim = 4, .seed = 1});
  for (float x : emb.row(2)) EXPECT_LE(std::abs(x), 0.5f / 4);
}

TEST(Train, Preconditions) {
  Corpus empty;
  EXPECT_THROW(train(empty, {}), InvalidArgument);
  Corpus c;
  c.sequences = {{0, 1}};
  c.recount(2);
  EXPECT_THROW(train(c, {.dim = 0}), InvalidArgument);
  EXPECT_THROW(train(c, {.window = 0}), InvalidArgument);
  EXPECT_THROW(train(c, {.alpha0 = 0.01, .alpha_min = 0.1}), InvalidArgument);
}

TEST(EmbeddingIo, RoundTrip) {
  EmbeddingMatrix emb(3, 4, {"a", "b", "c"});
  Rng rng(1);
  for (auto& x : emb.data()) x = static_cast<float>(rng.uniform(-3, 3));
  std::stringstream buf;
  save_embeddings(buf, emb);
  const auto back = load_embeddings(buf);
  ASSERT_EQ(back.rows(), 3u);
  ASSERT_EQ(back.dim(), 4u);
  EXPECT_EQ(back.labels(), emb.labels());
  for (std::size_t i = 0; i < emb.data().size(); ++i) EXPECT_NEAR(back.data()[i], emb.data()[i], 1e-6);
}

TEST(EmbeddingIo, WrongColumnCountNamesLine) {
  std::istringstream in("3 4\na 1 2 3 4\nb 1 2 3 4 5\nc 1 2 3 4\n");
  try {
    load_embeddings(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(EmbeddingIo, HeaderMismatch) {
  std::istringstream bad_header("3\n");
  EXPECT_THROW(load_embeddings(bad_header), ParseError);
  std::istringstream short_rows("3 2\na 1 2\n");
  EXPECT_THROW(load_embeddings(short_rows), ParseError);
  std::istringstream bad_number("1 2\na 1 x\n");
  EXPECT_THROW(load_embeddings(bad_number), ParseError);
}

TEST(EmbeddingIo, ExternalWord2vecText) {
  // word2vec's text writer leaves a trailing space on each row
  std::istringstream in("2 3\n</s> 0.1 0.2 0.3 \nx -1 -2 -3 \n");
  const auto emb = load_embeddings(in);
  EXPECT_EQ(emb.label(0), "</s>");
  EXPECT_FLOAT_EQ(emb.row(1)[2], -3.0f);
}

TEST(EmbeddingIo, AlignToGraph) {
  const Graph g = load_edge_list_text("p q\n");
  EmbeddingMatrix emb(2, 1, {"q", "p"});
  emb.row(0)[0] = 1.0f;
  emb.row(1)[0] = 2.0f;
  const auto aligned = align_to_graph(emb, g);
  EXPECT_FLOAT_EQ(aligned.row(0)[0], 2.0f);
  EXPECT_FLOAT_EQ(aligned.row(1)[0], 1.0f);
  EmbeddingMatrix missing(1, 1, {"p"});
  EXPECT_THROW(align_to_graph(missing, g), InvalidArgument);
}
