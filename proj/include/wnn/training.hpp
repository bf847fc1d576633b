#pragma once

// Consensus experiment: synthetic data, L1 training of polynomial GNNs with Adam,
// and train-small / evaluate-large transfer.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "wnn/error.hpp"
#include "wnn/families.hpp"
#include "wnn/gnn.hpp"
#include "wnn/graphon.hpp"

namespace wnn {

// ---------------------------------------------------------------------------
// Seeded streams
// ---------------------------------------------------------------------------

enum class Purpose : std::uint32_t { Data = 1, TestData = 2, Init = 3, Shuffle = 4, Probe = 5 };

/// Generator for one (seed, trial, purpose, salt) key. Independent of the order in which streams are created.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t trial, Purpose purpose, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(salt),
                    static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

struct SplitCounts {
  std::size_t train = 2100;
  std::size_t val = 50;
  std::size_t test = 50;
  std::size_t total() const { return train + val + test; }
};

/// 8400 / 200 / 200 scaled by `factor` (each count at least 1).
inline SplitCounts scaled_split(double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("split factor must be positive");
  auto scale = [factor](double c) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(c * factor))); };
  return {scale(8400), scale(200), scale(200)};
}

/// Samples as columns: inputs x ~ |N(0, 100 I)| and targets y = mean(x) at every node.
struct ConsensusDataset {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  SplitCounts split;
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;

  Eigen::Index train_begin() const { return 0; }
  Eigen::Index val_begin() const { return static_cast<Eigen::Index>(split.train); }
  Eigen::Index test_begin() const { return static_cast<Eigen::Index>(split.train + split.val); }
  auto train_inputs() const { return inputs.middleCols(train_begin(), static_cast<Eigen::Index>(split.train)); }
  auto train_targets() const { return targets.middleCols(train_begin(), static_cast<Eigen::Index>(split.train)); }
  auto val_inputs() const { return inputs.middleCols(val_begin(), static_cast<Eigen::Index>(split.val)); }
  auto val_targets() const { return targets.middleCols(val_begin(), static_cast<Eigen::Index>(split.val)); }
  auto test_inputs() const { return inputs.middleCols(test_begin(), static_cast<Eigen::Index>(split.test)); }
  auto test_targets() const { return targets.middleCols(test_begin(), static_cast<Eigen::Index>(split.test)); }
  GraphSignal input(std::size_t i) const { return inputs.col(static_cast<Eigen::Index>(i)); }
  GraphSignal target(std::size_t i) const { return targets.col(static_cast<Eigen::Index>(i)); }
};

inline constexpr double kConsensusSigma = 10.0;

inline ConsensusDataset gen_consensus(std::size_t n, SplitCounts counts, std::uint64_t seed, std::uint64_t trial = 0,
                                      Purpose purpose = Purpose::Data) {
  if (n < 1) throw InvalidArgument("consensus dataset needs n >= 1");
  if (counts.train < 1 || counts.val < 1 || counts.test < 1) throw InvalidArgument("split counts must be positive");
  ConsensusDataset d;
  d.n = n;
  d.seed = seed;
  d.split = counts;
  const auto N = static_cast<Eigen::Index>(n);
  const auto total = static_cast<Eigen::Index>(counts.total());
  auto rng = stream_rng(seed, trial, purpose, n);
  std::normal_distribution<double> normal(0.0, kConsensusSigma);
  d.inputs.resize(N, total);
  for (Eigen::Index j = 0; j < total; ++j)
    for (Eigen::Index i = 0; i < N; ++i) d.inputs(i, j) = std::abs(normal(rng));
  d.targets.resize(N, total);
  for (Eigen::Index j = 0; j < total; ++j) d.targets.col(j).setConstant(d.inputs.col(j).mean());
  return d;
}

// ---------------------------------------------------------------------------
// Metrics and gradients
// ---------------------------------------------------------------------------

/// Mean over columns of ||yhat - y|| / ||y||.
inline double rrmse(const Eigen::MatrixXd& yhat, const Eigen::MatrixXd& y) {
  if (yhat.rows() != y.rows() || yhat.cols() != y.cols()) throw DimensionMismatch("rrmse shapes differ");
  if (y.cols() == 0) throw InvalidArgument("rrmse of an empty set");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double ny = y.col(j).norm();
    if (ny == 0.0) throw InvalidArgument("rrmse undefined for a zero target");
    acc += (yhat.col(j) - y.col(j)).norm() / ny;
  }
  return acc / static_cast<double>(y.cols());
}

/// L1 loss summed over nodes, averaged over samples.
inline double l1_loss(const Eigen::MatrixXd& yhat, const Eigen::MatrixXd& y) {
  if (yhat.rows() != y.rows() || yhat.cols() != y.cols()) throw DimensionMismatch("loss shapes differ");
  return (yhat - y).cwiseAbs().sum() / static_cast<double>(y.cols());
}

/// d(l1_loss)/d(yhat), with sign(0) = 0.
inline Eigen::MatrixXd l1_loss_gradient(const Eigen::MatrixXd& yhat, const Eigen::MatrixXd& y) {
  const double inv = 1.0 / static_cast<double>(y.cols());
  return (yhat - y).unaryExpr([inv](double d) { return d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0); });
}

/// Backward pass from a trace of gnn_forward_trace(h, s, x).
inline Eigen::VectorXd gnn_backward(const GnnParams& h, const ShiftOperator& s, const ForwardTrace& tr,
                                    const GraphFeatures& grad_out) {
  if (!h.all_polynomial()) throw InvalidArgument("gnn_backward needs polynomial filters");
  if (tr.pre.size() != h.depth()) throw DimensionMismatch("trace does not match the parameters");
  if (grad_out.size() != tr.output.size()) throw DimensionMismatch("grad_out has the wrong number of features");
  for (std::size_t f = 0; f < grad_out.size(); ++f)
    if (grad_out[f].rows() != tr.output[f].rows() || grad_out[f].cols() != tr.output[f].cols())
      throw DimensionMismatch("grad_out shape does not match the output");

  std::vector<Eigen::Index> offset(h.depth() + 1, 0);
  for (std::size_t l = 0; l < h.depth(); ++l) {
    Eigen::Index c = 0;
    for (const auto& f : h.layer(l)) c += static_cast<Eigen::Index>(std::get<FilterTaps>(f).size());
    offset[l + 1] = offset[l] + c;
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(offset.back());

  GraphFeatures d_out = grad_out;
  for (std::size_t l = h.depth(); l-- > 0;) {
    const std::size_t fin = h.in_width(l), fout = h.out_width(l);
    const Activation act = h.activation(l);
    GraphFeatures dz(fout);
    for (std::size_t f = 0; f < fout; ++f)
      dz[f] = d_out[f].cwiseProduct(tr.pre[l][f].unaryExpr([act](double v) { return activate_derivative(act, v); }));

    Eigen::Index pos = offset[l];
    for (std::size_t f = 0; f < fout; ++f)
      for (std::size_t g = 0; g < fin; ++g) {
        const auto& taps = std::get<FilterTaps>(h.filter(l, f, g));
        for (std::size_t k = 0; k < taps.size(); ++k) grad(pos++) = dz[f].cwiseProduct(tr.shifts[l][g][k]).sum();
      }
    if (l == 0) break;

    // dX^g = sum_k S^k (sum_f h_k^{fg} dZ^f), by Horner.
    GraphFeatures dx(fin);
    for (std::size_t g = 0; g < fin; ++g) {
      std::size_t K = 0;
      for (std::size_t f = 0; f < fout; ++f) K = std::max(K, std::get<FilterTaps>(h.filter(l, f, g)).size());
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dz[0].rows(), dz[0].cols());
      for (std::size_t k = K; k-- > 0;) {
        if (k + 1 < K) acc = s.apply(acc);
        for (std::size_t f = 0; f < fout; ++f) {
          const auto& taps = std::get<FilterTaps>(h.filter(l, f, g));
          if (k < taps.size() && taps[k] != 0.0) acc += taps[k] * dz[f];
        }
      }
      dx[g] = std::move(acc);
    }
    d_out = std::move(dx);
  }
  return grad;
}

/// Gradient of sum_f <grad_out[f], Phi(H; S; x)[f]> with respect to every tap, in flat_taps() order
/// (use H.with_taps to view it with the shape of H).
inline Eigen::VectorXd gnn_backward(const GnnParams& h, const ShiftOperator& s, const GraphFeatures& x,
                                    const GraphFeatures& grad_out) {
  if (!h.all_polynomial()) throw InvalidArgument("gnn_backward needs polynomial filters");
  return gnn_backward(h, s, gnn_forward_trace(h, s, x), grad_out);
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

enum class Loss { L1 };

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t epochs = 40;
  std::size_t batch = 64;  // 0 trains full-batch
  Loss loss = Loss::L1;
  std::uint64_t seed = 0;
  bool rrmse_selection = true;
  double split_factor = 0.25;

  void validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("learning rate must be finite and >= 0");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) throw InvalidArgument("Adam betas must lie in (0,1)");
    if (!(eps > 0.0)) throw InvalidArgument("Adam epsilon must be positive");
  }
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::size_t t = 0;
};

/// One bias-corrected Adam update. Advances state.t.
inline Eigen::VectorXd adam_step(const Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
                                 const TrainConfig& cfg) {
  if (params.size() != grads.size()) throw DimensionMismatch("parameter and gradient lengths differ");
  if (state.t == 0 && state.m.size() == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw DimensionMismatch("Adam moments do not match the parameters");
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  const Eigen::ArrayXd step = (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
  return params - cfg.lr * step.matrix();
}

// ---------------------------------------------------------------------------
// Consensus training
// ---------------------------------------------------------------------------

/// L hidden layers of width F with K taps and ReLU, then a one-tap linear readout F -> 1.
struct ConsensusArch {
  std::size_t features = 8;
  std::size_t taps = 4;
  std::size_t layers = 1;

  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w(layers + 2, features);
    w.front() = w.back() = 1;
    return w;
  }
};

inline GnnParams init_consensus_params(const ConsensusArch& a, std::mt19937_64& rng) {
  if (a.features < 1 || a.taps < 1 || a.layers < 1) throw InvalidArgument("architecture needs F, K, L >= 1");
  std::vector<std::size_t> taps(a.layers, a.taps);
  taps.push_back(1);
  std::vector<Activation> acts(a.layers, Activation::ReLU);
  acts.push_back(Activation::Identity);
  return random_polynomial_params(a.widths(), taps, acts, rng);
}

/// Two balanced communities, p = 0.8 inside and q = 0.2 across; shifts are S/n.
inline ShiftOperator consensus_graph(std::size_t n) {
  return sample_graph(families::sbm(0.8, 0.2, 2), n).renormalized(Normalization::AdjacencyOverN);
}

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_rrmse = 0.0;
  double val_rrmse = 0.0;
};

struct TrainResult {
  GnnParams params;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
};

/// Output of H on a batch of single-feature inputs.
inline Eigen::MatrixXd predict(const GnnParams& h, const ShiftOperator& s, const Eigen::MatrixXd& x) {
  return gnn_forward(h, s, GraphFeatures{x})[0];
}

/// Trains from `init` on `data` over graph `s`. Epoch 0 of the log is the untrained model.
inline TrainResult train_consensus(const GnnParams& init, const ShiftOperator& s, const ConsensusDataset& data,
                                   const TrainConfig& cfg, std::uint64_t trial = 0) {
  cfg.validate();
  if (data.n != static_cast<std::size_t>(s.size())) throw DimensionMismatch("dataset and graph sizes differ");
  const Eigen::MatrixXd xtr = data.train_inputs(), ytr = data.train_targets();
  const Eigen::MatrixXd xva = data.val_inputs(), yva = data.val_targets();

  auto evaluate = [&](const GnnParams& h, std::size_t epoch) {
    const Eigen::MatrixXd ptr = predict(h, s, xtr);
    return EpochLog{epoch, l1_loss(ptr, ytr), rrmse(ptr, ytr), rrmse(predict(h, s, xva), yva)};
  };

  TrainResult out{init, {evaluate(init, 0)}, 0};
  double best = out.log[0].val_rrmse;
  GnnParams cur = init;
  Eigen::VectorXd theta = init.flat_taps();
  AdamState adam;
  auto shuffle_rng = stream_rng(cfg.seed, trial, Purpose::Shuffle);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(xtr.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const std::size_t batch = cfg.batch == 0 ? order.size() : cfg.batch;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const auto cols = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd xb(xtr.rows(), cols), yb(ytr.rows(), cols);
      for (Eigen::Index j = 0; j < cols; ++j) {
        xb.col(j) = xtr.col(order[start + static_cast<std::size_t>(j)]);
        yb.col(j) = ytr.col(order[start + static_cast<std::size_t>(j)]);
      }
      const ForwardTrace tr = gnn_forward_trace(cur, s, GraphFeatures{xb});
      const Eigen::MatrixXd& yhat = tr.output[0];
      const double loss = l1_loss(yhat, yb);
      if (!std::isfinite(loss))
        throw Divergence("training loss became non-finite at epoch " + std::to_string(epoch) + ", sample " +
                         std::to_string(start));
      const Eigen::VectorXd g = gnn_backward(cur, s, tr, GraphFeatures{l1_loss_gradient(yhat, yb)});
      theta = adam_step(theta, g, adam, cfg);
      if (!theta.allFinite()) throw Divergence("parameters became non-finite at epoch " + std::to_string(epoch));
      cur = cur.with_taps(theta);
    }
    out.log.push_back(evaluate(cur, epoch));
    if (!std::isfinite(out.log.back().train_loss))
      throw Divergence("training loss became non-finite after epoch " + std::to_string(epoch));
    if (!cfg.rrmse_selection || out.log.back().val_rrmse < best) {
      best = out.log.back().val_rrmse;
      out.params = cur;
      out.best_epoch = epoch;
    }
  }
  return out;
}

/// Builds the graph, dataset (data seed) and initialization (init seed) for one run and trains.
inline TrainResult train_consensus(const ConsensusArch& arch, std::size_t n, const TrainConfig& cfg,
                                   std::uint64_t data_trial = 0, std::uint64_t init_trial = 0) {
  const auto data = gen_consensus(n, scaled_split(cfg.split_factor), cfg.seed, data_trial);
  auto rng = stream_rng(cfg.seed, init_trial, Purpose::Init);
  return train_consensus(init_consensus_params(arch, rng), consensus_graph(n), data, cfg, init_trial);
}

inline void write_training_log_csv(std::ostream& os, const std::vector<EpochLog>& log) {
  os << "epoch,train_rrmse,val_rrmse,train_loss\n";
  os << std::setprecision(17);
  for (const auto& e : log) os << e.epoch << ',' << e.train_rrmse << ',' << e.val_rrmse << ',' << e.train_loss << '\n';
}

// ---------------------------------------------------------------------------
// Transfer
// ---------------------------------------------------------------------------

struct TransferResult {
  std::size_t n = 0;
  std::size_t big_n = 0;
  double rrmse_n = 0.0;
  double rrmse_big = 0.0;
  double relative_difference = 0.0;  // NaN when rrmse_n is 0
  bool degenerate = false;
  std::string note;
};

/// |rRMSE_N - rRMSE_n| / rRMSE_n for the same taps on S_n and S_N, each on a fresh test set.
inline TransferResult transfer_eval(const GnnParams& h, std::size_t n, std::size_t big_n, const TrainConfig& cfg,
                                    std::uint64_t trial = 0) {
  if (n < 2 || big_n < 2) throw InvalidArgument("transfer evaluation needs sizes >= 2");
  if (!h.all_polynomial()) throw InvalidArgument("transfer evaluation needs polynomial filters");
  const SplitCounts counts = scaled_split(cfg.split_factor);
  const SplitCounts test_only{1, 1, counts.test};
  const auto dn = gen_consensus(n, test_only, cfg.seed, trial, Purpose::TestData);
  const auto dN = gen_consensus(big_n, test_only, cfg.seed, trial, Purpose::TestData);
  TransferResult r;
  r.n = n;
  r.big_n = big_n;
  const Eigen::MatrixXd yn = predict(h, consensus_graph(n), dn.test_inputs());
  const Eigen::MatrixXd yN = predict(h, consensus_graph(big_n), dN.test_inputs());
  r.rrmse_n = rrmse(yn, dn.test_targets());
  r.rrmse_big = rrmse(yN, dN.test_targets());
  if (yn.isZero(0.0) && yN.isZero(0.0)) {
    r.degenerate = true;
    r.note = "both outputs are identically zero";
  }
  if (r.rrmse_n == 0.0) {
    r.relative_difference = std::numeric_limits<double>::quiet_NaN();
    r.degenerate = true;
    r.note = "rRMSE on G_n is zero; relative difference undefined";
  } else {
    r.relative_difference = std::abs(r.rrmse_big - r.rrmse_n) / r.rrmse_n;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct ConsensusTrial {
  ConsensusArch arch;
  std::size_t n = 0;
  std::size_t big_n = 0;
  std::size_t graph_realization = 0;
  std::size_t data_realization = 0;
  std::size_t best_epoch = 0;
  double final_val_rrmse = 0.0;
  TransferResult transfer;
};

struct ConsensusSweepSpec {
  std::vector<ConsensusArch> archs;
  std::vector<std::size_t> sizes;
  std::size_t big_n = 1000;
  std::size_t graph_realizations = 3;
  std::size_t data_realizations = 3;
  TrainConfig cfg;
  std::size_t jobs = 1;
};

/// One training run per (arch, n, graph realization, data realization). Results are in that order
/// regardless of `jobs`.
inline std::vector<ConsensusTrial> consensus_sweep(const ConsensusSweepSpec& spec) {
  if (spec.sizes.empty() || spec.archs.empty()) throw InvalidArgument("consensus sweep needs sizes and architectures");
  struct Job {
    ConsensusArch arch;
    std::size_t n, gr, dr;
  };
  std::vector<Job> jobs;
  for (const auto& a : spec.archs)
    for (std::size_t n : spec.sizes)
      for (std::size_t gr = 0; gr < spec.graph_realizations; ++gr)
        for (std::size_t dr = 0; dr < spec.data_realizations; ++dr) jobs.push_back({a, n, gr, dr});

  auto run = [&spec](const Job& j) {
    const auto res = train_consensus(j.arch, j.n, spec.cfg, j.dr, j.gr);
    ConsensusTrial t;
    t.arch = j.arch;
    t.n = j.n;
    t.big_n = spec.big_n;
    t.graph_realization = j.gr;
    t.data_realization = j.dr;
    t.best_epoch = res.best_epoch;
    t.final_val_rrmse = res.log[res.best_epoch].val_rrmse;
    t.transfer = transfer_eval(res.params, j.n, spec.big_n, spec.cfg, j.dr);
    return t;
  };

  std::vector<ConsensusTrial> out(jobs.size());
  const std::size_t width = std::max<std::size_t>(1, spec.jobs);
  for (std::size_t start = 0; start < jobs.size(); start += width) {
    if (width == 1) {
      out[start] = run(jobs[start]);
      continue;
    }
    const std::size_t stop = std::min(jobs.size(), start + width);
    std::vector<std::future<ConsensusTrial>> fs;
    for (std::size_t i = start; i < stop; ++i) fs.push_back(std::async(std::launch::async, run, jobs[i]));
    for (std::size_t i = start; i < stop; ++i) out[i] = fs[i - start].get();
  }
  return out;
}

inline void write_consensus_csv_header(std::ostream& os) {
  os << "F,K,L,n,N,graph_realization,data_realization,best_epoch,val_rrmse,rrmse_n,rrmse_N,relative_difference,"
        "degenerate\n";
}

inline void write_consensus_csv_row(std::ostream& os, const ConsensusTrial& t) {
  os << std::setprecision(17) << t.arch.features << ',' << t.arch.taps << ',' << t.arch.layers << ',' << t.n << ','
     << t.big_n << ',' << t.graph_realization << ',' << t.data_realization << ',' << t.best_epoch << ','
     << t.final_val_rrmse << ',' << t.transfer.rrmse_n << ',' << t.transfer.rrmse_big << ','
     << t.transfer.relative_difference << ',' << (t.transfer.degenerate ? "true" : "false") << '\n';
}

}  // namespace wnn
