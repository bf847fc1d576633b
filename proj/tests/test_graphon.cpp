#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wnn/families.hpp"
#include "wnn/graphon.hpp"

using namespace wnn;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

// ||uv - W_n||^2 summed cell by cell with closed-form moments of u on each cell.
double product_sampling_error(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n);
  double sum_a = 0.0, sum_ub = 0.0, sum_u2h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * h, hi = lo + h;
    const double a = (hi * hi * hi - lo * lo * lo) / 3.0;
    const double b = (hi * hi - lo * lo) / 2.0;
    sum_a += a;
    sum_ub += lo * b;
    sum_u2h += lo * lo * h;
  }
  return std::sqrt(sum_a * sum_a - 2.0 * sum_ub * sum_ub + sum_u2h * sum_u2h);
}

}  // namespace

TEST(SampleGraph, ProductKernelTwoNodes) {
  const auto s = sample_graph(families::product(), 2);
  Eigen::Matrix2d want;
  want << 0.0, 0.0, 0.0, 0.25;
  EXPECT_EQ(s.matrix(), want);
  EXPECT_EQ(s.normalization(), Normalization::Adjacency);
}

TEST(SampleGraph, BlockModelEightNodes) {
  const auto s = sample_graph(families::sbm(0.8, 0.2), 8);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) EXPECT_EQ(s.matrix()(i, j), (i < 4) == (j < 4) ? 0.8 : 0.2);
}

TEST(SampleGraph, SingleNode) {
  const auto s = sample_graph(families::cosine(), 1);
  ASSERT_EQ(s.size(), 1);
  EXPECT_DOUBLE_EQ(s.matrix()(0, 0), 0.75);
}

TEST(SampleGraph, ExactlySymmetric) {
  for (const auto& w : {families::product(), families::gaussian(3.0), families::min_kernel(), families::smooth_sbm()}) {
    const auto s = sample_graph(w, 37);
    EXPECT_TRUE((s.matrix().array() == s.matrix().transpose().array()).all()) << w.name();
  }
}

TEST(SampleGraph, RejectsZeroSize) { EXPECT_THROW(sample_graph(families::product(), 0), InvalidArgument); }

TEST(SampleSignal, Examples) {
  EXPECT_EQ(sample_signal(families::linear(), 4), (Eigen::Vector4d() << 0.0, 0.25, 0.5, 0.75).finished());
  EXPECT_TRUE(sample_signal(families::constant_signal(1.0), 7).isOnes(0.0));
  EXPECT_NEAR(sample_signal(families::sine(), 2).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Induce, StepGraphonFromMatrix) {
  Eigen::Matrix2d m;
  m << 0.0, 0.0, 0.0, 0.25;
  const auto w = induce_graphon(ShiftOperator(m));
  EXPECT_EQ(w.kind(), GraphonKind::Step);
  EXPECT_EQ(w(0.1, 0.2), 0.0);
  EXPECT_EQ(w(0.7, 0.9), 0.25);
  EXPECT_EQ(w(0.2, 0.9), 0.0);
  EXPECT_EQ(w(1.0, 1.0), 0.25);
}

TEST(Induce, SingleNodeIsConstant) {
  const auto w = induce_graphon(ShiftOperator(Eigen::MatrixXd::Constant(1, 1, 0.5)));
  EXPECT_EQ(w(0.0, 0.3), 0.5);
  EXPECT_EQ(w(0.99, 1.0), 0.5);
}

TEST(Induce, RejectsAsymmetric) {
  Eigen::Matrix2d m;
  m << 0.0, 1.0, 0.5, 0.0;
  EXPECT_THROW(ShiftOperator{m}, InvalidArgument);
}

TEST(Induce, StepSignal) {
  const auto x = induce_signal((Eigen::Vector2d() << 1.0, 2.0).finished());
  EXPECT_EQ(x(0.0), 1.0);
  EXPECT_EQ(x(0.49), 1.0);
  EXPECT_EQ(x(0.5), 2.0);
  EXPECT_EQ(x(1.0), 2.0);
  EXPECT_EQ(induce_signal(Eigen::VectorXd::Constant(5, 3.0))(0.77), 3.0);
}

TEST(Induce, LinearSignalSamplingError) {
  const auto x = families::linear();
  EXPECT_NEAR(l2_distance(x, induce_signal(sample_signal(x, 4))), 1.0 / (4.0 * std::sqrt(3.0)), 1e-9);
}

TEST(L2Distance, Examples) {
  const auto x = families::linear();
  EXPECT_EQ(l2_distance(x, x), 0.0);
  EXPECT_NEAR(l2_distance(x, families::constant_signal(0.0)), 1.0 / std::sqrt(3.0), 1e-9);
  const auto a = GraphonSignal::step((Eigen::Vector2d() << 1.0, 0.0).finished());
  const auto b = GraphonSignal::step((Eigen::Vector4d() << 0.0, 1.0, 0.0, 1.0).finished());
  EXPECT_DOUBLE_EQ(l2_distance(a, b), 1.0 / std::sqrt(2.0));
}

TEST(L2Distance, MetricOnStepSignals) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 24);
  std::normal_distribution<double> g;
  auto random_step = [&] {
    Eigen::VectorXd v(size(rng));
    for (auto& e : v) e = g(rng);
    return GraphonSignal::step(v);
  };
  for (int t = 0; t < 200; ++t) {
    const auto a = random_step(), b = random_step(), c = random_step();
    EXPECT_EQ(l2_distance(a, b), l2_distance(b, a));
    EXPECT_LE(l2_distance(a, c), l2_distance(a, b) + l2_distance(b, c) + 1e-12);
  }
}

TEST(GraphonL2Distance, Examples) {
  const auto w = families::product();
  EXPECT_EQ(graphon_l2_distance(w, w), 0.0);
  EXPECT_NEAR(graphon_l2_distance(families::constant(0.7), families::constant(0.2)), 0.5, 1e-9);
  for (std::size_t n : {4u, 16u, 64u}) {
    const double d = graphon_l2_distance(w, induce_graphon(sample_graph(w, n)));
    EXPECT_NEAR(d, product_sampling_error(n), 1e-8) << n;
    EXPECT_LE(d, std::sqrt(1.0 / static_cast<double>(n)));
  }
}

TEST(GraphonL2Distance, StepPairsAreExact) {
  Eigen::Matrix2d a;
  a << 1.0, 0.0, 0.0, 1.0;
  const Eigen::Matrix4d b = Eigen::Matrix4d::Zero();
  EXPECT_DOUBLE_EQ(graphon_l2_distance(Graphon::step(a), Graphon::step(b)), std::sqrt(0.5));
}

TEST(EstimateLipschitz, Examples) {
  EXPECT_NEAR(estimate_lipschitz(families::product(), 256), 1.0, 2.0 / 256.0);
  EXPECT_EQ(estimate_lipschitz(families::constant(0.3), 64), 0.0);
  const auto g = families::gaussian(1.0);
  const double a = estimate_lipschitz(g, 256), b = estimate_lipschitz(g, 512);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_NEAR(a / b, 1.0, 0.05);
  EXPECT_LE(b, *g.lipschitz());
}

TEST(Families, DeclaredLipschitzConstantsHold) {
  for (const auto& w : {families::product(), families::min_kernel(), families::cosine(), families::gaussian(1.0),
                        families::gaussian(8.0), families::smooth_sbm(), families::constant(0.4)})
    EXPECT_LE(estimate_lipschitz(w, 301), *w.lipschitz() * (1.0 + 1e-9)) << w.name();
  for (const auto& x : {families::linear(), families::sine(2.0), families::cosine_signal(3.0)})
    EXPECT_LE(estimate_lipschitz(x, 4001), *x.lipschitz() * (1.0 + 1e-9));
}

TEST(Families, BlockModelsCarryNoLipschitzConstant) { EXPECT_FALSE(families::sbm(0.8, 0.2).lipschitz()); }

TEST(Families, SmoothBlockModelValues) {
  const auto w = families::smooth_sbm(0.8, 0.2, {0.5}, 0.01);
  EXPECT_NEAR(w(0.1, 0.2), 0.8, 1e-15);
  EXPECT_NEAR(w(0.1, 0.9), 0.2, 1e-15);
  EXPECT_NEAR(w(0.5, 0.1), 0.5, 1e-15);  // midway through the window
  EXPECT_NEAR(*w.lipschitz(), 60.0, 1e-12);
  EXPECT_THROW(families::smooth_sbm(0.8, 0.2, {0.5, 0.4}, 0.01), InvalidArgument);
}

// Sampling error bounds over every built-in smooth family and n = 2, 4, ..., 512.
TEST(Propositions, GraphonSamplingBound) {
  for (const auto& w : {families::product(), families::min_kernel(), families::cosine(), families::gaussian(1.0),
                        families::smooth_sbm()})
    for (std::size_t n = 2; n <= 512; n *= 2)
      EXPECT_LE(graphon_l2_distance(w, induce_graphon(sample_graph(w, n))), std::sqrt(*w.lipschitz() / n) + 1e-6)
          << w.name() << " n=" << n;
}

TEST(Propositions, SignalSamplingBound) {
  for (const auto& x : {families::linear(), families::sine(1.0), families::sine(3.0), families::cosine_signal(2.0)})
    for (std::size_t n = 2; n <= 512; n *= 2)
      EXPECT_LE(l2_distance(x, induce_signal(sample_signal(x, n))), *x.lipschitz() / std::sqrt(3.0 * n) + 1e-6) << n;
}

TEST(RoundTrip, StepGraphonResampledOnItsGrid) {
  std::mt19937_64 rng(5);
  for (Eigen::Index n : {1, 2, 7, 32}) {
    const Eigen::MatrixXd m = random_symmetric(n, rng);
    EXPECT_EQ(sample_graph(Graphon::step(m), static_cast<std::size_t>(n)).matrix(), m);
  }
}

TEST(RoundTrip, TextFormat) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd m = random_symmetric(6, rng);
  std::stringstream ss;
  write_step_matrix(ss, m);
  EXPECT_EQ(read_step_matrix(ss), m);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(5, -1.0, 3.3);
  std::stringstream sv;
  write_step_vector(sv, v);
  EXPECT_EQ(read_step_vector(sv), v);
}

TEST(ShiftOperator, Renormalization) {
  const auto s = sample_graph(families::constant(0.5), 4).renormalized(Normalization::AdjacencyOverN);
  EXPECT_TRUE(s.apply(Eigen::VectorXd::Ones(4)).isApprox(Eigen::VectorXd::Constant(4, 0.5)));
}
