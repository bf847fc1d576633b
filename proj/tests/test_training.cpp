#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wnn/families.hpp"
#include "wnn/training.hpp"

using namespace wnn;

namespace {

ShiftOperator random_shift(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
  return ShiftOperator(m, Normalization::AdjacencyOverN);
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(r, c);
  for (auto& e : m.reshaped()) e = g(rng);
  return m;
}

// sum_f <g_f, Phi(theta)_f>
double probe(const GnnParams& h, const ShiftOperator& s, const GraphFeatures& x, const GraphFeatures& g) {
  const auto y = gnn_forward(h, s, x);
  double acc = 0.0;
  for (std::size_t f = 0; f < y.size(); ++f) acc += (y[f].array() * g[f].array()).sum();
  return acc;
}

TrainConfig quick_config(std::size_t epochs, double split = 0.05) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.split_factor = split;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST(Dataset, TargetsAreExactMeans) {
  const auto d = gen_consensus(13, {40, 5, 5}, 1);
  for (Eigen::Index j = 0; j < d.inputs.cols(); ++j) {
    const double mean = d.inputs.col(j).mean();
    EXPECT_TRUE((d.targets.col(j).array() == mean).all());
  }
  EXPECT_TRUE((d.inputs.array() >= 0.0).all());
  EXPECT_EQ(d.train_inputs().cols(), 40);
  EXPECT_EQ(d.val_inputs().cols(), 5);
  EXPECT_EQ(d.test_targets().cols(), 5);
}

TEST(Dataset, Deterministic) {
  const auto a = gen_consensus(9, {10, 2, 2}, 42), b = gen_consensus(9, {10, 2, 2}, 42);
  EXPECT_TRUE((a.inputs.array() == b.inputs.array()).all());
  EXPECT_FALSE((gen_consensus(9, {10, 2, 2}, 43).inputs.array() == a.inputs.array()).all());
  EXPECT_FALSE((gen_consensus(9, {10, 2, 2}, 42, 1).inputs.array() == a.inputs.array()).all());
  EXPECT_FALSE((gen_consensus(9, {10, 2, 2}, 42, 0, Purpose::TestData).inputs.array() == a.inputs.array()).all());
}

TEST(Dataset, FoldedNormalSpread) {
  const auto d = gen_consensus(100, {100, 1, 1}, 3);
  const Eigen::ArrayXd v = d.train_inputs().reshaped().array();
  const double mean = v.mean();
  const double sd = std::sqrt((v - mean).square().sum() / static_cast<double>(v.size() - 1));
  const double want = kConsensusSigma * std::sqrt(1.0 - 2.0 / std::numbers::pi);
  EXPECT_NEAR(sd / want, 1.0, 0.05);
  EXPECT_NEAR(mean / (kConsensusSigma * std::sqrt(2.0 / std::numbers::pi)), 1.0, 0.05);
  // independent Monte Carlo oracle
  std::mt19937 mc(99);
  std::normal_distribution<double> g(0.0, 10.0);
  double s1 = 0.0, s2 = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double x = std::abs(g(mc));
    s1 += x;
    s2 += x * x;
  }
  const double mc_sd = std::sqrt((s2 - s1 * s1 / m) / (m - 1));
  EXPECT_NEAR(sd / mc_sd, 1.0, 0.05);
}

TEST(Dataset, ScaledSplit) {
  const auto full = scaled_split(1.0);
  EXPECT_EQ(full.train, 8400u);
  EXPECT_EQ(full.val, 200u);
  EXPECT_EQ(full.test, 200u);
  const auto quarter = scaled_split(0.25);
  EXPECT_EQ(quarter.train, 2100u);
  EXPECT_EQ(quarter.val, 50u);
  EXPECT_EQ(scaled_split(1e-6).test, 1u);
  EXPECT_THROW(scaled_split(0.0), InvalidArgument);
  EXPECT_THROW(gen_consensus(0, {1, 1, 1}, 0), InvalidArgument);
  EXPECT_THROW(gen_consensus(4, {1, 0, 1}, 0), InvalidArgument);
}

TEST(Metrics, Examples) {
  const Eigen::MatrixXd y = Eigen::MatrixXd::Ones(4, 2);
  EXPECT_DOUBLE_EQ(rrmse(Eigen::MatrixXd::Zero(4, 2), y), 1.0);
  EXPECT_DOUBLE_EQ(rrmse(y, y), 0.0);
  EXPECT_DOUBLE_EQ(l1_loss(Eigen::MatrixXd::Zero(4, 2), y), 4.0);
  EXPECT_THROW(rrmse(y, Eigen::MatrixXd::Zero(4, 2)), InvalidArgument);
  Eigen::MatrixXd yhat = y;
  yhat(0, 0) = 2.0;
  yhat(1, 1) = 0.0;
  const Eigen::MatrixXd g = l1_loss_gradient(yhat, y);
  EXPECT_EQ(g(0, 0), 0.5);
  EXPECT_EQ(g(1, 1), -0.5);
  EXPECT_EQ(g(2, 0), 0.0);
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<int> size(1, 16), depth(1, 2), width(1, 3), taps(1, 4), act(0, 2);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t L = static_cast<std::size_t>(depth(rng));
    std::vector<std::size_t> w(L + 1), k(L);
    std::vector<Activation> a(L);
    for (auto& f : w) f = static_cast<std::size_t>(width(rng));
    for (auto& v : k) v = static_cast<std::size_t>(taps(rng));
    for (auto& v : a) v = static_cast<Activation>(act(rng));
    auto h = random_polynomial_params(w, k, a, rng);
    h = h.with_taps(h.flat_taps() * 3.0);
    const Eigen::Index n = size(rng), batch = 3;
    const auto s = random_shift(n, rng);
    GraphFeatures x, g;
    for (std::size_t f = 0; f < w.front(); ++f) x.push_back(random_matrix(n, batch, rng));
    for (std::size_t f = 0; f < w.back(); ++f) g.push_back(random_matrix(n, batch, rng));
    const Eigen::VectorXd grad = gnn_backward(h, s, x, g);
    const Eigen::VectorXd theta = h.flat_taps();
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double step = 1e-6 * std::max(1.0, std::abs(theta(i)));
      Eigen::VectorXd tp = theta, tm = theta;
      tp(i) += step;
      tm(i) -= step;
      const double fd = (probe(h.with_taps(tp), s, x, g) - probe(h.with_taps(tm), s, x, g)) / (2.0 * step);
      const double rel = std::abs(grad(i) - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      EXPECT_LE(rel, 1e-5) << "case " << t << " tap " << i;
    }
  }
  RecordProperty("worst_relative_deviation", std::to_string(worst));
}

TEST(Backward, ZeroAtOptimum) {
  std::mt19937_64 rng(101);
  const auto s = random_shift(8, rng);
  const GnnParams h({1, 1}, Activation::Identity, {{FilterTaps({1.0})}});
  const Eigen::MatrixXd x = random_matrix(8, 5, rng);
  const Eigen::VectorXd g = gnn_backward(h, s, GraphFeatures{x}, GraphFeatures{l1_loss_gradient(x, x)});
  EXPECT_TRUE(g.isZero(0.0));
}

TEST(Backward, SingleTapL1HandDerivative) {
  std::mt19937_64 rng(102);
  const auto s = random_shift(6, rng);
  const double h0 = 0.7;
  const GnnParams h({1, 1}, Activation::Identity, {{FilterTaps({h0})}});
  const Eigen::MatrixXd x = random_matrix(6, 4, rng), y = random_matrix(6, 4, rng);
  const Eigen::VectorXd g = gnn_backward(h, s, GraphFeatures{x}, GraphFeatures{l1_loss_gradient(h0 * x, y)});
  double want = 0.0;
  for (Eigen::Index j = 0; j < 4; ++j)
    for (Eigen::Index i = 0; i < 6; ++i) {
      const double d = h0 * x(i, j) - y(i, j);
      want += (d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0) * x(i, j) / 4.0;
    }
  ASSERT_EQ(g.size(), 1);
  EXPECT_NEAR(g(0), want, 1e-14);
}

TEST(Backward, RejectsSpectralFilters) {
  std::mt19937_64 rng(103);
  const auto h = theorem_mode_params(1, 1, 0.2, rng);
  const auto s = random_shift(5, rng);
  const GraphFeatures x{random_matrix(5, 1, rng)};
  EXPECT_THROW(gnn_backward(h, s, x, x), InvalidArgument);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  TrainConfig cfg;
  AdamState st;
  const Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
  EXPECT_EQ(adam_step(p, Eigen::VectorXd::Zero(4), st, cfg), p);
  EXPECT_EQ(st.t, 1u);
}

TEST(Adam, ConstantGradientStepIsLearningRate) {
  TrainConfig cfg;
  AdamState st;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  const Eigen::Vector3d g(2.0, -0.5, 1e-3);
  for (int t = 1; t <= 100; ++t) {
    const Eigen::VectorXd next = adam_step(p, g, st, cfg);
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(next(i) - p(i), -cfg.lr * g(i) / (std::abs(g(i)) + cfg.eps), 1e-15) << t;
    p = next;
  }
}

TEST(Adam, ConvergesOnQuadratic) {
  TrainConfig cfg;
  cfg.lr = 0.01;
  AdamState st;
  Eigen::VectorXd p = Eigen::VectorXd::Ones(1);
  for (int t = 0; t < 2000; ++t) p = adam_step(p, 2.0 * p, st, cfg);
  EXPECT_LT(std::abs(p(0)), 1e-3);
}

TEST(Adam, ShapeMismatch) {
  TrainConfig cfg;
  AdamState st;
  EXPECT_THROW(adam_step(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3), st, cfg), DimensionMismatch);
}

TEST(Train, LearnsOnFiftyNodes) {
  const auto r = train_consensus(ConsensusArch{8, 4, 1}, 50, quick_config(5, 0.25));
  ASSERT_EQ(r.log.size(), 6u);
  EXPECT_LT(r.log.back().train_rrmse, r.log.front().train_rrmse);
  EXPECT_LE(r.log[r.best_epoch].val_rrmse, r.log.front().val_rrmse);
  for (const auto& e : r.log) EXPECT_GE(e.val_rrmse, r.log[r.best_epoch].val_rrmse);
}

TEST(Train, ZeroLearningRateChangesNothing) {
  auto cfg = quick_config(3);
  cfg.lr = 0.0;
  cfg.rrmse_selection = false;
  const auto data = gen_consensus(12, scaled_split(cfg.split_factor), cfg.seed);
  auto rng = stream_rng(cfg.seed, 0, Purpose::Init);
  const auto init = init_consensus_params(ConsensusArch{4, 3, 1}, rng);
  const auto r = train_consensus(init, consensus_graph(12), data, cfg);
  EXPECT_EQ(r.params.flat_taps(), init.flat_taps());
  for (const auto& e : r.log) EXPECT_EQ(e.val_rrmse, r.log.front().val_rrmse);
}

TEST(Train, SameSeedSameLog) {
  const auto cfg = quick_config(3);
  const auto a = train_consensus(ConsensusArch{4, 3, 2}, 16, cfg, 1, 2);
  const auto b = train_consensus(ConsensusArch{4, 3, 2}, 16, cfg, 1, 2);
  std::ostringstream la, lb;
  write_training_log_csv(la, a.log);
  write_training_log_csv(lb, b.log);
  EXPECT_EQ(la.str(), lb.str());
  EXPECT_EQ(a.params.flat_taps(), b.params.flat_taps());
  EXPECT_EQ(la.str().substr(0, la.str().find('\n')), "epoch,train_rrmse,val_rrmse,train_loss");
}

TEST(Train, DivergenceIsReported) {
  auto cfg = quick_config(2);
  cfg.lr = 1e300;
  EXPECT_THROW(train_consensus(ConsensusArch{4, 4, 2}, 10, cfg), Divergence);
}

TEST(Train, LossDescentAtSmallLearningRate) {
  TrainConfig cfg;
  cfg.lr = 1e-4;
  const auto data = gen_consensus(20, {200, 1, 1}, 5);
  auto rng = stream_rng(5, 0, Purpose::Init);
  auto h = init_consensus_params(ConsensusArch{8, 4, 1}, rng);
  const auto s = consensus_graph(20);
  const Eigen::MatrixXd x = data.train_inputs(), y = data.train_targets();
  AdamState st;
  Eigen::VectorXd theta = h.flat_taps();
  double prev = l1_loss(predict(h, s, x), y);
  for (int step = 0; step < 10; ++step) {
    const Eigen::MatrixXd yhat = predict(h, s, x);
    theta = adam_step(theta, gnn_backward(h, s, GraphFeatures{x}, GraphFeatures{l1_loss_gradient(yhat, y)}), st, cfg);
    h = h.with_taps(theta);
    const double loss = l1_loss(predict(h, s, x), y);
    EXPECT_LE(loss, prev + 1e-9) << step;
    prev = loss;
  }
}

TEST(Train, PermutationConsistency) {
  std::mt19937_64 rng(104);
  const Eigen::Index n = 15;
  const auto s = random_shift(n, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
  p.setIdentity();
  std::shuffle(p.indices().data(), p.indices().data() + n, rng);
  const Eigen::MatrixXd pm = p.toDenseMatrix().cast<double>();
  const ShiftOperator sp(Eigen::MatrixXd(pm * s.matrix() * pm.transpose()), Normalization::AdjacencyOverN);
  auto init_rng = stream_rng(1, 0, Purpose::Init);
  const auto h = init_consensus_params(ConsensusArch{3, 3, 2}, init_rng);
  const Eigen::MatrixXd x = random_matrix(n, 4, rng).cwiseAbs();
  const Eigen::MatrixXd y = Eigen::MatrixXd::Ones(n, 4);
  const Eigen::MatrixXd out = predict(h, s, x), outp = predict(h, sp, pm * x);
  EXPECT_LE((outp - pm * out).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(l1_loss(outp, pm * y), l1_loss(out, y), 1e-10);
  const Eigen::VectorXd g = gnn_backward(h, s, GraphFeatures{x}, GraphFeatures{l1_loss_gradient(out, y)});
  const Eigen::VectorXd gp =
      gnn_backward(h, sp, GraphFeatures{Eigen::MatrixXd(pm * x)}, GraphFeatures{l1_loss_gradient(outp, pm * y)});
  EXPECT_LE((g - gp).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Transfer, ZeroTapsAreDegenerate) {
  auto rng = stream_rng(0, 0, Purpose::Init);
  const auto h = init_consensus_params(ConsensusArch{4, 2, 1}, rng);
  const auto zero = h.with_taps(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h.tap_count())));
  const auto r = transfer_eval(zero, 10, 40, quick_config(1));
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.rrmse_n, 1.0);
  EXPECT_DOUBLE_EQ(r.rrmse_big, 1.0);
  EXPECT_EQ(r.relative_difference, 0.0);
}

TEST(Transfer, SameTapsOnTheLargeGraph) {
  const auto cfg = quick_config(2);
  const auto trained = train_consensus(ConsensusArch{4, 3, 1}, 20, cfg);
  const auto r = transfer_eval(trained.params, 20, 60, cfg, 0);
  const auto test = gen_consensus(60, {1, 1, scaled_split(cfg.split_factor).test}, cfg.seed, 0, Purpose::TestData);
  const auto copy = trained.params.with_taps(trained.params.flat_taps());
  EXPECT_EQ(rrmse(predict(copy, consensus_graph(60), test.test_inputs()), test.test_targets()), r.rrmse_big);
  EXPECT_FALSE(r.degenerate);
  EXPECT_NEAR(r.relative_difference, std::abs(r.rrmse_big - r.rrmse_n) / r.rrmse_n, 1e-15);
  EXPECT_THROW(transfer_eval(trained.params, 1, 60, cfg), InvalidArgument);
}

TEST(Sweep, OrderIndependentOfJobs) {
  ConsensusSweepSpec spec;
  spec.archs = {ConsensusArch{2, 2, 1}};
  spec.sizes = {6, 8};
  spec.big_n = 12;
  spec.graph_realizations = 2;
  spec.data_realizations = 2;
  spec.cfg = quick_config(2, 0.01);
  std::ostringstream a, b;
  for (const auto& t : consensus_sweep(spec)) write_consensus_csv_row(a, t);
  spec.jobs = 3;
  for (const auto& t : consensus_sweep(spec)) write_consensus_csv_row(b, t);
  const std::string rows = a.str();
  EXPECT_EQ(rows, b.str());
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 8);
}

TEST(Sweep, CsvHeader) {
  std::ostringstream os;
  write_consensus_csv_header(os);
  EXPECT_EQ(os.str(),
            "F,K,L,n,N,graph_realization,data_realization,best_epoch,val_rrmse,rrmse_n,rrmse_N,relative_difference,"
            "degenerate\n");
}
