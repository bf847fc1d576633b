#pragma once

// Graphons, graphon signals, deterministic sampling on the regular grid
// u_i = (i-1)/n, step-function induction, and exact/quadrature L2 norms.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wnn/error.hpp"
#include "wnn/quadrature.hpp"

namespace wnn {

enum class Normalization { Adjacency, AdjacencyOverN };

inline const char* to_string(Normalization n) {
  return n == Normalization::Adjacency ? "adjacency" : "adjacency-over-n";
}

/// Grid point of node i (0-based), i.e. u_{i+1} = i / n.
inline double grid_point(std::size_t i, std::size_t n) {
  return static_cast<double>(i) / static_cast<double>(n);
}

/// Index of the partition cell [k/n, (k+1)/n) containing u. The right end 1 belongs to the last
/// cell. Cell edges are compared against grid_point() so sampled nodes always land in their own cell.
inline std::size_t cell_index(double u, std::size_t n) {
  if (!(u > 0.0)) return 0;
  if (u >= 1.0) return n - 1;
  auto k = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
  if (k >= n) k = n - 1;
  while (k + 1 < n && u >= grid_point(k + 1, n)) ++k;
  while (k > 0 && u < grid_point(k, n)) --k;
  return k;
}

// ---------------------------------------------------------------------------
// Graph side
// ---------------------------------------------------------------------------

/// Dense symmetric graph shift operator S with its normalization convention.
/// The raw matrix is shared between copies and never mutated.
class ShiftOperator {
 public:
  explicit ShiftOperator(Eigen::MatrixXd matrix, Normalization normalization = Normalization::Adjacency)
      : normalization_(normalization) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
      throw InvalidArgument("shift operator must be a non-empty square matrix");
    if (!matrix.allFinite()) throw InvalidArgument("shift operator has non-finite entries");
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidArgument("shift operator is not symmetric");
    matrix_ = std::make_shared<const Eigen::MatrixXd>(std::move(matrix));
  }

  Eigen::Index size() const { return matrix_->rows(); }
  const Eigen::MatrixXd& matrix() const { return *matrix_; }
  Normalization normalization() const { return normalization_; }

  /// Factor applied to the raw matrix: 1 or 1/n.
  double scale() const {
    return normalization_ == Normalization::AdjacencyOverN ? 1.0 / static_cast<double>(size()) : 1.0;
  }

  Eigen::MatrixXd operator_matrix() const { return scale() * (*matrix_); }

  ShiftOperator renormalized(Normalization normalization) const { return ShiftOperator(matrix_, normalization); }

  /// One shift: scale * S * x, for a vector or a batch of column signals.
  template <class Derived>
  typename Derived::PlainObject apply(const Eigen::MatrixBase<Derived>& x) const {
    if (x.rows() != size()) throw DimensionMismatch("signal length does not match shift operator");
    typename Derived::PlainObject y(x.rows(), x.cols());
    y.noalias() = (*matrix_) * x;
    if (normalization_ == Normalization::AdjacencyOverN) y *= scale();
    return y;
  }

 private:
  ShiftOperator(std::shared_ptr<const Eigen::MatrixXd> m, Normalization norm)
      : matrix_(std::move(m)), normalization_(norm) {}

  std::shared_ptr<const Eigen::MatrixXd> matrix_;
  Normalization normalization_;
};

using GraphSignal = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Graphons
// ---------------------------------------------------------------------------

enum class GraphonKind { AnalyticLipschitz, StochasticBlockModel, Step };

inline const char* to_string(GraphonKind k) {
  switch (k) {
    case GraphonKind::AnalyticLipschitz: return "analytic-lipschitz";
    case GraphonKind::StochasticBlockModel: return "stochastic-block-model";
    case GraphonKind::Step: return "step";
  }
  return "?";
}

/// Known eigenpairs of T_W. Eigenfunctions are L2([0,1])-orthonormal; every
/// eigenvalue of T_W not listed here is zero (or below the family's truncation floor).
struct ClosedFormSpectrum {
  std::vector<double> eigenvalues;
  std::vector<std::function<double(double)>> eigenfunctions;
  double truncation_floor = 0.0;
};

/// Piecewise-constant kernel on an arbitrary partition 0 = b_0 < b_1 < ... < b_K = 1.
/// Block k is [b_k, b_{k+1}); a point on a boundary belongs to the block on its right.
struct BlockStructure {
  std::vector<double> boundaries;
  Eigen::MatrixXd values;

  std::size_t blocks() const { return boundaries.size() - 1; }

  std::size_t block_of(double u) const {
    auto it = std::upper_bound(boundaries.begin() + 1, boundaries.end() - 1, u);
    return static_cast<std::size_t>(it - boundaries.begin()) - 1;
  }

  double width(std::size_t k) const { return boundaries[k + 1] - boundaries[k]; }

  void validate() const {
    if (boundaries.size() < 2) throw InvalidArgument("block structure needs at least one block");
    if (boundaries.front() != 0.0 || boundaries.back() != 1.0)
      throw InvalidArgument("block boundaries must start at 0 and end at 1");
    for (std::size_t k = 0; k + 1 < boundaries.size(); ++k)
      if (!(boundaries[k + 1] > boundaries[k])) throw InvalidArgument("block boundaries must increase");
    const auto K = static_cast<Eigen::Index>(blocks());
    if (values.rows() != K || values.cols() != K) throw DimensionMismatch("block matrix size mismatch");
    if (!values.allFinite()) throw InvalidArgument("block matrix has non-finite entries");
    if ((values - values.transpose()).cwiseAbs().maxCoeff() > 0.0)
      throw InvalidArgument("block matrix must be symmetric");
    if (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0)
      throw InvalidArgument("graphon values must lie in [0,1]");
  }

  static BlockStructure uniform(Eigen::MatrixXd m) {
    BlockStructure b;
    const auto n = static_cast<std::size_t>(m.rows());
    b.boundaries.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) b.boundaries[k] = grid_point(k, n);
    b.values = std::move(m);
    return b;
  }
};

/// Bounded symmetric kernel W: [0,1]^2 -> [0,1].
class Graphon {
 public:
  using Kernel = std::function<double(double, double)>;

  /// Smooth kernel. `lipschitz` is the analytic A1 of the family, if known.
  static Graphon analytic(std::string name, Kernel kernel, std::optional<double> lipschitz,
                          std::optional<ClosedFormSpectrum> spectrum = std::nullopt) {
    if (lipschitz && !(*lipschitz >= 0.0)) throw InvalidArgument("Lipschitz constant must be nonnegative");
    auto d = std::make_shared<Data>();
    d->name = std::move(name);
    d->kind = GraphonKind::AnalyticLipschitz;
    d->kernel = std::move(kernel);
    d->lipschitz = lipschitz;
    d->spectrum = std::move(spectrum);
    return Graphon(std::move(d));
  }

  /// Stochastic block model. Never Lipschitz; its spectrum is computed in closed form.
  static Graphon block_model(BlockStructure blocks, std::string name = "sbm") {
    blocks.validate();
    auto d = std::make_shared<Data>();
    d->name = std::move(name);
    d->kind = GraphonKind::StochasticBlockModel;
    d->blocks = std::move(blocks);
    d->spectrum = block_spectrum(*d->blocks);
    return Graphon(std::move(d));
  }

  /// Step graphon constant on I_i x I_j with I_i = [(i-1)/n, i/n].
  static Graphon step(Eigen::MatrixXd matrix) {
    auto d = std::make_shared<Data>();
    d->name = "step";
    d->kind = GraphonKind::Step;
    d->blocks = BlockStructure::uniform(std::move(matrix));
    d->blocks->validate();
    return Graphon(std::move(d));
  }

  double operator()(double u, double v) const {
    if (d_->kind == GraphonKind::AnalyticLipschitz) return d_->kernel(u, v);
    const auto& b = *d_->blocks;
    if (d_->kind == GraphonKind::Step) {
      const auto n = b.blocks();
      return b.values(static_cast<Eigen::Index>(cell_index(u, n)), static_cast<Eigen::Index>(cell_index(v, n)));
    }
    return b.values(static_cast<Eigen::Index>(b.block_of(u)), static_cast<Eigen::Index>(b.block_of(v)));
  }

  GraphonKind kind() const { return d_->kind; }
  const std::string& name() const { return d_->name; }
  std::optional<double> lipschitz() const { return d_->lipschitz; }

  /// Piecewise-constant structure for step and block-model graphons, null otherwise.
  const BlockStructure* blocks() const { return d_->blocks ? &*d_->blocks : nullptr; }

  /// Step matrix for step graphons, null otherwise.
  const Eigen::MatrixXd* step_matrix() const {
    return d_->kind == GraphonKind::Step ? &d_->blocks->values : nullptr;
  }

  const std::optional<ClosedFormSpectrum>& closed_form_spectrum() const { return d_->spectrum; }

  /// Copy with a different A1 (used to falsify the Lipschitz-dependent bounds).
  Graphon with_lipschitz(std::optional<double> a1) const {
    auto d = std::make_shared<Data>(*d_);
    d->lipschitz = a1;
    return Graphon(std::move(d));
  }

 private:
  struct Data {
    std::string name;
    GraphonKind kind = GraphonKind::AnalyticLipschitz;
    Kernel kernel;
    std::optional<double> lipschitz;
    std::optional<BlockStructure> blocks;
    std::optional<ClosedFormSpectrum> spectrum;
  };

  explicit Graphon(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  // T_W restricted to block indicators is D^{1/2} B D^{1/2}; its eigenvectors v
  // lift to the orthonormal eigenfunctions sum_k v_k / sqrt(|B_k|) 1_{B_k}.
  static ClosedFormSpectrum block_spectrum(const BlockStructure& b) {
    const auto K = static_cast<Eigen::Index>(b.blocks());
    Eigen::VectorXd sq(K);
    for (Eigen::Index k = 0; k < K; ++k) sq(k) = std::sqrt(b.width(static_cast<std::size_t>(k)));
    Eigen::MatrixXd m = sq.asDiagonal() * b.values * sq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    ClosedFormSpectrum out;
    auto blocks = std::make_shared<const BlockStructure>(b);
    for (Eigen::Index j = 0; j < K; ++j) {
      const double lam = es.eigenvalues()(j);
      if (std::abs(lam) <= 1e-14) continue;
      Eigen::VectorXd coef = es.eigenvectors().col(j).cwiseQuotient(sq);
      out.eigenvalues.push_back(lam);
      out.eigenfunctions.emplace_back(
          [blocks, coef](double u) { return coef(static_cast<Eigen::Index>(blocks->block_of(u))); });
    }
    return out;
  }

  std::shared_ptr<const Data> d_;
};

// ---------------------------------------------------------------------------
// Graphon signals
// ---------------------------------------------------------------------------

/// Square-integrable function on [0,1], either analytic or a step function on a uniform grid.
/// Analytic signals may declare breakpoint grids (jumps or kinks at k/g); quadrature splits there.
class GraphonSignal {
 public:
  using Function = std::function<double(double)>;

  static GraphonSignal analytic(Function f, std::optional<double> lipschitz = std::nullopt,
                                std::vector<std::size_t> grids = {}) {
    if (lipschitz && !(*lipschitz >= 0.0)) throw InvalidArgument("Lipschitz constant must be nonnegative");
    GraphonSignal s;
    s.function_ = std::move(f);
    s.lipschitz_ = lipschitz;
    s.grids_ = std::move(grids);
    return s;
  }

  static GraphonSignal step(Eigen::VectorXd values) {
    if (values.size() < 1) throw InvalidArgument("step signal needs at least one value");
    GraphonSignal s;
    s.grids_ = {static_cast<std::size_t>(values.size())};
    s.values_ = std::make_shared<const Eigen::VectorXd>(std::move(values));
    return s;
  }

  double operator()(double u) const {
    if (values_) return (*values_)(static_cast<Eigen::Index>(cell_index(u, static_cast<std::size_t>(values_->size()))));
    return function_(u);
  }

  bool is_step() const { return static_cast<bool>(values_); }

  const Eigen::VectorXd& values() const {
    if (!values_) throw InvalidArgument("signal is not a step function");
    return *values_;
  }

  /// Number of steps (step signals only).
  std::size_t size() const { return values_ ? static_cast<std::size_t>(values_->size()) : 0; }

  const std::vector<std::size_t>& grids() const { return grids_; }
  std::optional<double> lipschitz() const { return lipschitz_; }

  /// Breakpoints used to integrate this signal (default cells when it has none).
  std::vector<double> breakpoints() const {
    if (grids_.empty()) return quad::merged_breakpoints({quad::kDefaultCells});
    return quad::merged_breakpoints(grids_);
  }

 private:
  Function function_;
  std::shared_ptr<const Eigen::VectorXd> values_;
  std::optional<double> lipschitz_;
  std::vector<std::size_t> grids_;
};

namespace detail {

inline std::vector<std::size_t> union_grids(const GraphonSignal& a, const GraphonSignal& b) {
  std::vector<std::size_t> g = a.grids();
  g.insert(g.end(), b.grids().begin(), b.grids().end());
  if (g.empty()) g.push_back(quad::kDefaultCells);
  return g;
}

/// Integral over [0,1] of op(a(u), b(u)) for two step functions, exact on the merged partition.
template <class Op>
double merged_step_integral(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Op op) {
  const auto na = static_cast<std::size_t>(a.size());
  const auto nb = static_cast<std::size_t>(b.size());
  // Positions in units of 1/(na*nb): cell i of a ends at (i+1)*nb, cell j of b at (j+1)*na.
  std::size_t i = 0, j = 0, pos = 0;
  double total = 0.0;
  while (i < na && j < nb) {
    const std::size_t end = std::min((i + 1) * nb, (j + 1) * na);
    total += static_cast<double>(end - pos) *
             op(a(static_cast<Eigen::Index>(i)), b(static_cast<Eigen::Index>(j)));
    pos = end;
    if ((i + 1) * nb == end) ++i;
    if ((j + 1) * na == end) ++j;
  }
  return total / (static_cast<double>(na) * static_cast<double>(nb));
}

/// Overlapping cells of two piecewise-constant partitions: (length, index in a, index in b).
struct MergedCell {
  double length;
  std::size_t ia, ib;
};

inline std::vector<MergedCell> merge_partitions(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<MergedCell> out;
  std::size_t i = 0, j = 0;
  double pos = 0.0;
  while (i + 1 < a.size() && j + 1 < b.size()) {
    const double end = std::min(a[i + 1], b[j + 1]);
    if (end > pos) out.push_back({end - pos, i, j});
    pos = end;
    if (a[i + 1] == end) ++i;
    if (b[j + 1] == end) ++j;
  }
  return out;
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + ": non-finite value");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sampling and induction
// ---------------------------------------------------------------------------

/// Deterministic graph [S_n]_ij = W(u_i, u_j) with u_i = (i-1)/n. The kernel is evaluated
/// once per unordered pair, so the result is exactly symmetric.
inline ShiftOperator sample_graph(const Graphon& w, std::size_t n) {
  if (n < 1) throw InvalidArgument("sample_graph: n must be positive");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd s(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double ui = grid_point(static_cast<std::size_t>(i), n);
    for (Eigen::Index j = i; j < N; ++j) {
      const double v = w(ui, grid_point(static_cast<std::size_t>(j), n));
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("graphon value outside [0,1]");
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return ShiftOperator(std::move(s), Normalization::Adjacency);
}

/// [x_n]_i = X((i-1)/n).
inline GraphSignal sample_signal(const GraphonSignal& x, std::size_t n) {
  if (n < 1) throw InvalidArgument("sample_signal: n must be positive");
  GraphSignal out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = x(grid_point(i, n));
  return out;
}

/// Step graphon W_n = [S]_ij on I_i x I_j (raw entries, independent of normalization).
inline Graphon induce_graphon(const ShiftOperator& s) { return Graphon::step(s.matrix()); }

/// Step signal X_n = [x]_i on I_i.
inline GraphonSignal induce_signal(const GraphSignal& x) { return GraphonSignal::step(x); }

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

inline double inner_product(const GraphonSignal& a, const GraphonSignal& b) {
  if (a.is_step() && b.is_step())
    return detail::merged_step_integral(a.values(), b.values(), [](double x, double y) { return x * y; });
  const auto breaks = quad::merged_breakpoints(detail::union_grids(a, b));
  const double v = quad::integrate_partition([&](double u) { return a(u) * b(u); }, breaks);
  detail::require_finite(v, "inner_product");
  return v;
}

inline double l2_norm(const GraphonSignal& a) {
  if (a.is_step()) {
    const auto& v = a.values();
    return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
  }
  const double sq = quad::integrate_partition(
      [&](double u) {
        const double x = a(u);
        return x * x;
      },
      a.breakpoints());
  detail::require_finite(sq, "l2_norm");
  return std::sqrt(std::max(sq, 0.0));
}

/// ||A - B||_{L2([0,1])}. Exact on the merged partition when both are step signals;
/// adaptive quadrature (absolute tolerance quad::kAbsTol) otherwise.
inline double l2_distance(const GraphonSignal& a, const GraphonSignal& b) {
  double sq;
  if (a.is_step() && b.is_step()) {
    sq = detail::merged_step_integral(a.values(), b.values(), [](double x, double y) { return (x - y) * (x - y); });
  } else {
    const auto breaks = quad::merged_breakpoints(detail::union_grids(a, b));
    sq = quad::integrate_partition(
        [&](double u) {
          const double d = a(u) - b(u);
          return d * d;
        },
        breaks);
  }
  detail::require_finite(sq, "l2_distance");
  return std::sqrt(std::max(sq, 0.0));
}

/// Root of the summed squared L2 distances of matched feature lists.
inline double l2_distance(const std::vector<GraphonSignal>& a, const std::vector<GraphonSignal>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("feature counts differ");
  double sq = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    const double d = l2_distance(a[f], b[f]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

inline double l2_norm(const std::vector<GraphonSignal>& a) {
  double sq = 0.0;
  for (const auto& s : a) sq += std::pow(l2_norm(s), 2);
  return std::sqrt(sq);
}

/// ||W1 - W2||_{L2([0,1]^2)}. Exact on merged partitions for two piecewise-constant
/// graphons; nested adaptive quadrature (tolerance 1e-8) otherwise.
inline double graphon_l2_distance(const Graphon& w1, const Graphon& w2) {
  const BlockStructure* b1 = w1.blocks();
  const BlockStructure* b2 = w2.blocks();
  if (b1 && b2) {
    const auto cells = detail::merge_partitions(b1->boundaries, b2->boundaries);
    double sq = 0.0;
    for (const auto& p : cells)
      for (const auto& q : cells) {
        const double d = b1->values(static_cast<Eigen::Index>(p.ia), static_cast<Eigen::Index>(q.ia)) -
                         b2->values(static_cast<Eigen::Index>(p.ib), static_cast<Eigen::Index>(q.ib));
        sq += p.length * q.length * d * d;
      }
    return std::sqrt(sq);
  }

  std::vector<double> breaks;
  if (b1 || b2) {
    breaks = b1 ? b1->boundaries : b2->boundaries;
  } else {
    breaks = quad::merged_breakpoints({quad::kDefaultCells});
  }
  const auto inner = [&](double u) {
    return quad::integrate_partition(
        [&](double v) {
          const double d = w1(u, v) - w2(u, v);
          return d * d;
        },
        breaks, 8);
  };
  const double sq = quad::integrate_partition(inner, breaks, 8);
  detail::require_finite(sq, "graphon_l2_distance");
  return std::sqrt(std::max(sq, 0.0));
}

/// Grid lower bound on A1: max over horizontally/vertically adjacent points of an m x m grid
/// of |dW| / (|du| + |dv|). Never exceeds the true Lipschitz constant.
inline double estimate_lipschitz(const Graphon& w, std::size_t grid_m) {
  if (grid_m < 2) throw InvalidArgument("estimate_lipschitz: grid_m must be at least 2");
  const double h = 1.0 / static_cast<double>(grid_m - 1);
  std::vector<double> vals(grid_m * grid_m);
  for (std::size_t i = 0; i < grid_m; ++i)
    for (std::size_t j = 0; j < grid_m; ++j)
      vals[i * grid_m + j] = w(static_cast<double>(i) * h, static_cast<double>(j) * h);
  double best = 0.0;
  for (std::size_t i = 0; i < grid_m; ++i)
    for (std::size_t j = 0; j < grid_m; ++j) {
      const double c = vals[i * grid_m + j];
      if (i + 1 < grid_m) best = std::max(best, std::abs(vals[(i + 1) * grid_m + j] - c) / h);
      if (j + 1 < grid_m) best = std::max(best, std::abs(vals[i * grid_m + j + 1] - c) / h);
    }
  return best;
}

/// Grid lower bound on A3.
inline double estimate_lipschitz(const GraphonSignal& x, std::size_t grid_m) {
  if (grid_m < 2) throw InvalidArgument("estimate_lipschitz: grid_m must be at least 2");
  const double h = 1.0 / static_cast<double>(grid_m - 1);
  double best = 0.0;
  double prev = x(0.0);
  for (std::size_t i = 1; i < grid_m; ++i) {
    const double cur = x(static_cast<double>(i) * h);
    best = std::max(best, std::abs(cur - prev) / h);
    prev = cur;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Plain-text step format: first line n, then rows of space-separated decimals
// with 17 significant digits (n rows for a matrix, one row for a vector).
// ---------------------------------------------------------------------------

inline void write_step_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os << m.rows() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
}

inline void write_step_vector(std::ostream& os, const Eigen::VectorXd& v) {
  os << v.size() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
  os << '\n';
}

namespace detail {
inline long read_count(std::istream& is) {
  long n = 0;
  if (!(is >> n) || n < 1) throw InvalidArgument("step format: bad size header");
  return n;
}
inline double read_value(std::istream& is) {
  double x;
  if (!(is >> x)) throw InvalidArgument("step format: truncated or malformed data");
  return x;
}
}  // namespace detail

inline Eigen::MatrixXd read_step_matrix(std::istream& is) {
  const long n = detail::read_count(is);
  Eigen::MatrixXd m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) m(i, j) = detail::read_value(is);
  return m;
}

inline Eigen::VectorXd read_step_vector(std::istream& is) {
  const long n = detail::read_count(is);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = detail::read_value(is);
  return v;
}

}  // namespace wnn
