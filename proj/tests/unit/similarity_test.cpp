#include <gtest/gtest.h>

#include <sstream>

#include "adasim/similarity.hpp"
#include "oracle/naive.hpp"

using namespace adasim;

namespace {

std::vector<LabeledFeatures> random_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const double shift = rng.uniform(-0.5, 0.5);
  std::vector<LabeledFeatures> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = rng.uniform(0.05, 3.0);
    const int y = static_cast<int>(rng.below(2));
    const double cos = std::clamp(rng.uniform(-1, 1) * 0.7 + (y ? 0.2 : -0.2) + shift, -1.0, 1.0);
    out.push_back({{cos * b, b}, y});
  }
  return out;
}

double naive_loss(const std::vector<LabeledFeatures>& d, double p) {
  double s = 0;
  for (const auto& x : d) {
    // probability of the true label, formed without 1 - y cancellation
    const double z = (x.f.a + p) / x.f.b;
    const double q = 1.0 / (1.0 + std::exp(x.label ? -z : z));
    s -= std::log(std::min(std::max(q, 1e-12), 1 - 1e-12));
  }
  return s / static_cast<double>(d.size());
}

}  // namespace

TEST(PairFeatures, Examples) {
  const double e0[] = {1, 0, 0};
  const double e1[] = {0, 1, 0};
  auto same = pair_features(std::span<const double>(e0), std::span<const double>(e0));
  EXPECT_DOUBLE_EQ(same.a, 1.0);
  EXPECT_DOUBLE_EQ(same.b, 1.0);
  auto orth = pair_features(std::span<const double>(e0), std::span<const double>(e1));
  EXPECT_DOUBLE_EQ(orth.a, 0.0);
  EXPECT_DOUBLE_EQ(orth.b, 1.0);
}

TEST(PairFeatures, MatchesScalarLoop) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> u(5), v(5);
    for (auto& x : u) x = rng.uniform(-2, 2);
    for (auto& x : v) x = rng.uniform(-2, 2);
    double dot = 0, uu = 0, vv = 0;
    for (int i = 0; i < 5; ++i) {
      dot += u[i] * v[i];
      uu += u[i] * u[i];
      vv += v[i] * v[i];
    }
    const auto f = pair_features(std::span<const double>(u), std::span<const double>(v));
    EXPECT_NEAR(f.a, dot, 1e-12);
    EXPECT_NEAR(f.b, std::sqrt(uu) * std::sqrt(vv), 1e-12);
    EXPECT_LE(std::abs(f.a), f.b * (1 + 1e-15));
  }
}

TEST(PairFeatures, DegenerateVector) {
  const double z[] = {0, 0};
  const double u[] = {1, 2};
  EXPECT_THROW(pair_features(std::span<const double>(z), std::span<const double>(u)), NumericError);
  const auto f = pair_features(std::span<const double>(z), std::span<const double>(u), true);
  EXPECT_GT(f.b, 0.0);
  EXPECT_THROW(pair_features(std::span<const double>(u), std::span<const double>(z, 1)), InvalidArgument);
}

TEST(Score, Examples) {
  EXPECT_DOUBLE_EQ(score(0.0, {1.0, 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(score(2.0, {0.0, 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(score(-0.7, {0.7, 3.0}), 0.0);
}

TEST(Score, ZeroPenaltyIsCosine) {
  Rng rng(8);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> u(16), v(16);
    for (auto& x : u) x = rng.uniform(-1, 1);
    for (auto& x : v) x = rng.uniform(-1, 1);
    const auto f = pair_features(std::span<const double>(u), std::span<const double>(v));
    double dot = 0, uu = 0, vv = 0;
    for (int i = 0; i < 16; ++i) {
      dot += u[i] * v[i];
      uu += u[i] * u[i];
      vv += v[i] * v[i];
    }
    EXPECT_NEAR(score(0.0, f), dot / std::sqrt(uu * vv), 1e-12);
  }
}

TEST(Score, StrictlyIncreasingInAAndP) {
  const PairFeatures f{0.3, 2.0};
  EXPECT_LT(score(0.1, f), score(0.2, f));
  EXPECT_LT(score(0.1, f), score(0.1, PairFeatures{0.31, 2.0}));
}

TEST(PredictProb, Examples) {
  EXPECT_DOUBLE_EQ(predict_prob(0.5, {-0.5, 1.0}), 0.5);
  EXPECT_NEAR(predict_prob(0.0, {1.0, 2.0}), 0.62246, 1e-5);
  const double hi = predict_prob(0.0, {1e6, 1e-6});
  const double lo = predict_prob(0.0, {-1e6, 1e-6});
  EXPECT_LT(hi, 1.0);
  EXPECT_GT(hi, 0.999);
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(lo, 1e-300);
}

TEST(Loss, Examples) {
  const std::vector<LabeledFeatures> half{{{0, 1}, 1}, {{0, 1}, 0}};
  EXPECT_NEAR(loss(half, 0.0), std::log(2.0), 1e-15);
  const std::vector<LabeledFeatures> confident{{{100, 1}, 1}, {{-100, 1}, 0}};
  EXPECT_LE(loss(confident, 0.0), 1e-10);
  const std::vector<LabeledFeatures> wrong{{{-1e6, 1}, 1}};
  EXPECT_NEAR(loss(wrong, 0.0), -std::log(1e-12), 1e-6);
}

TEST(Loss, MatchesNaiveSum) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto d = random_dataset(50, s);
    for (double p : {-3.0, -0.2, 0.0, 0.7, 4.0}) EXPECT_NEAR(loss(d, p), naive_loss(d, p), 1e-12);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto d = random_dataset(40, 1000 + s);
    const double p = Rng(s).uniform(-2, 2);
    const double numeric = oracle::central_difference([&](double q) { return loss(d, q); }, p, 1e-6);
    const double analytic = loss_gradient(d, p);
    EXPECT_LE(std::abs(numeric - analytic), 1e-6 * std::max(std::abs(analytic), 1e-3)) << "dataset " << s;
  }
}

TEST(Gradient, CurvatureMatchesFiniteDifferences) {
  const auto d = random_dataset(40, 5);
  const double numeric = oracle::central_difference([&](double q) { return loss_gradient(d, q); }, 0.3, 1e-5);
  EXPECT_NEAR(loss_curvature(d, 0.3), numeric, 1e-6);
}

TEST(TrainPenalty, AllPositiveIncreasesP) {
  const std::vector<LabeledFeatures> d(10, {{0.0, 1.0}, 1});
  EXPECT_LT(loss_gradient(d, 0.0), 0.0);
  std::vector<LabeledFeatures> mixed = d;
  mixed.push_back({{0.0, 1.0}, 0});
  const auto m = train_penalty(mixed, {.optimizer = PenaltyOptimizer::GradientDescent, .epochs = 50});
  EXPECT_GT(m.p, 0.0);
  for (std::size_t i = 1; i < m.loss_trace.size(); ++i) EXPECT_LE(m.loss_trace[i], m.loss_trace[i - 1] + 1e-15);
}

TEST(TrainPenalty, SymmetricDatasetGivesZero) {
  const std::vector<LabeledFeatures> d{{{0.4, 1.0}, 1}, {{-0.4, 1.0}, 0}, {{0.9, 2.0}, 1}, {{-0.9, 2.0}, 0}};
  for (auto opt : {PenaltyOptimizer::Newton, PenaltyOptimizer::GradientDescent, PenaltyOptimizer::Sgd}) {
    EXPECT_NEAR(train_penalty(d, {.optimizer = opt}).p, 0.0, 1e-9);
  }
}

TEST(TrainPenalty, MatchesGoldenSectionScan) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto d = random_dataset(200, 50 + s);
    const double best = oracle::golden_section([&](double p) { return naive_loss(d, p); }, -100, 100);
    const auto m = train_penalty(d);
    EXPECT_NEAR(m.p, best, 1e-4) << "dataset " << s;
    EXPECT_LE(loss(d, m.p), naive_loss(d, best) + 1e-12);
    EXPECT_FALSE(m.loss_trace.empty());
  }
}

TEST(TrainPenalty, GradientDescentReachesSameOptimumOnUnitNorms) {
  // With b near 1 the curvature is O(1) and plain descent converges in the
  // default 500 epochs.
  Rng rng(4);
  std::vector<LabeledFeatures> d;
  for (int i = 0; i < 200; ++i) {
    const int y = static_cast<int>(rng.below(2));
    d.push_back({{rng.uniform(-1, 1) + (y ? 0.3 : -0.1), 1.0}, y});
  }
  const double newton = train_penalty(d).p;
  const auto gd = train_penalty(d, {.optimizer = PenaltyOptimizer::GradientDescent, .learning_rate = 4.0, .epochs = 2000});
  EXPECT_NEAR(loss(d, gd.p), loss(d, newton), 1e-3);
}

TEST(TrainPenalty, Preconditions) {
  const std::vector<LabeledFeatures> one_class{{{0.1, 1}, 1}};
  EXPECT_THROW(train_penalty(one_class), InvalidArgument);
  const std::vector<LabeledFeatures> bad_b{{{0.1, 0}, 1}, {{0.1, 1}, 0}};
  EXPECT_THROW(train_penalty(bad_b), InvalidArgument);
}

TEST(ModelIo, RoundTrip) {
  AdaSimModel m;
  m.p = -8.123456789012345;
  m.loss_trace = {0.7, 0.6};
  m.config.optimizer = PenaltyOptimizer::Sgd;
  std::stringstream buf;
  save_model(buf, m);
  EXPECT_EQ(buf.str().rfind("p=", 0), 0u);
  const auto back = load_model(buf);
  EXPECT_DOUBLE_EQ(back.p, m.p);
  EXPECT_EQ(back.config.optimizer, PenaltyOptimizer::Sgd);
  std::istringstream bad("optimizer=newton\n");
  EXPECT_THROW(load_model(bad), ParseError);
  std::istringstream junk("p=abc\n");
  EXPECT_THROW(load_model(junk), ParseError);
}

TEST(ModelIo, LossTraceCsv) {
  AdaSimModel m;
  m.loss_trace = {0.5, 0.25};
  std::ostringstream out;
  write_loss_trace(out, m);
  EXPECT_EQ(out.str(), "epoch,loss\n1,0.5\n2,0.25\n");
}
