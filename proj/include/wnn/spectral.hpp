#pragma once

// Symmetric eigendecompositions of shift operators and graphon operators, with
// eigenvalues indexed over Z\{0}: positive indices for nonnegative eigenvalues in
// decreasing order, negative indices for negative ones (lambda_{-1} most negative).

#include <lapacke.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "wnn/error.hpp"
#include "wnn/graphon.hpp"

namespace wnn {

enum class SpectrumSource { Graph, InducedGraphon, ClosedForm, Discretized };

inline const char* to_string(SpectrumSource s) {
  switch (s) {
    case SpectrumSource::Graph: return "graph";
    case SpectrumSource::InducedGraphon: return "induced-graphon";
    case SpectrumSource::ClosedForm: return "closed-form";
    case SpectrumSource::Discretized: return "discretized";
  }
  return "?";
}

/// Eigenvalues with |lambda| at or below this get positive (zero) indices.
inline constexpr double kZeroEigenvalueTol = 1e-12;

/// Eigenvalues within this distance are one distinct eigenvalue for the band constants.
inline constexpr double kDistinctEigenvalueTol = 1e-10;

class SpectralDecomposition {
 public:
  using Function = std::function<double(double)>;

  /// Grid basis: columns of `vectors` are orthonormal in R^n. As eigenfunctions of the
  /// induced graphon they are the step functions sqrt(n) v.
  static SpectralDecomposition from_grid(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors,
                                         SpectrumSource source, Normalization normalization) {
    SpectralDecomposition d;
    d.source_ = source;
    d.normalization_ = normalization;
    d.grid_ = static_cast<std::size_t>(vectors.rows());
    const auto order = d.assign_order(values);
    const auto r = static_cast<Eigen::Index>(order.size());
    d.values_.resize(r);
    d.vectors_.resize(vectors.rows(), r);
    for (Eigen::Index k = 0; k < r; ++k) {
      d.values_(k) = values(order[static_cast<std::size_t>(k)]);
      Eigen::VectorXd v = vectors.col(order[static_cast<std::size_t>(k)]);
      fix_sign(v);
      d.vectors_.col(k) = v;
    }
    return d;
  }

  static SpectralDecomposition from_functions(const std::vector<double>& values, const std::vector<Function>& fns,
                                              double truncation_floor = 0.0) {
    SpectralDecomposition d;
    d.source_ = SpectrumSource::ClosedForm;
    d.normalization_ = Normalization::AdjacencyOverN;
    d.truncation_floor_ = truncation_floor;
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    const auto order = d.assign_order(v);
    d.values_.resize(static_cast<Eigen::Index>(order.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
      d.values_(static_cast<Eigen::Index>(k)) = v(order[k]);
      d.functions_.push_back(fns[static_cast<std::size_t>(order[k])]);
    }
    return d;
  }

  std::size_t rank() const { return static_cast<std::size_t>(values_.size()); }

  /// Eigenvalues in storage order: lambda_1, lambda_2, ..., then lambda_{-1}, lambda_{-2}, ...
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const std::vector<int>& indices() const { return indices_; }

  /// lambda_i counted with multiplicity, if stored.
  std::optional<double> eigenvalue(int index) const {
    if (index > 0 && index <= positive_) return values_(index - 1);
    if (index < 0 && -index <= negative_) return values_(positive_ - index - 1);
    return std::nullopt;
  }

  /// lambda_i with multiplicity; indices past the stored spectrum are the accumulation point 0.
  double eigenvalue_or_zero(int index) const { return eigenvalue(index).value_or(0.0); }

  int positive_count() const { return positive_; }
  int negative_count() const { return negative_; }

  bool on_grid() const { return grid_ > 0; }
  std::size_t grid() const { return grid_; }

  const Eigen::MatrixXd& vectors() const {
    if (!on_grid()) throw InvalidArgument("spectrum has no grid basis");
    return vectors_;
  }

  const std::vector<Function>& functions() const { return functions_; }

  /// L2([0,1])-orthonormal eigenfunction at storage position k.
  GraphonSignal eigenfunction(std::size_t k) const {
    if (on_grid())
      return GraphonSignal::step(std::sqrt(static_cast<double>(grid_)) * vectors_.col(static_cast<Eigen::Index>(k)));
    return GraphonSignal::analytic(functions_.at(k));
  }

  SpectrumSource source() const { return source_; }
  Normalization normalization() const { return normalization_; }
  double truncation_floor() const { return truncation_floor_; }

 private:
  // Sorts into storage order and assigns Z\{0} indices.
  std::vector<Eigen::Index> assign_order(const Eigen::VectorXd& values) {
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index k = 0; k < values.size(); ++k) (values(k) < -kZeroEigenvalueTol ? neg : pos).push_back(k);
    std::stable_sort(pos.begin(), pos.end(), [&](auto a, auto b) { return values(a) > values(b); });
    std::stable_sort(neg.begin(), neg.end(), [&](auto a, auto b) { return values(a) < values(b); });
    positive_ = static_cast<int>(pos.size());
    negative_ = static_cast<int>(neg.size());
    indices_.clear();
    for (int i = 1; i <= positive_; ++i) indices_.push_back(i);
    for (int i = 1; i <= negative_; ++i) indices_.push_back(-i);
    pos.insert(pos.end(), neg.begin(), neg.end());
    return pos;
  }

  // Largest-magnitude entry positive; near-ties (1e-12) go to the lowest index.
  static void fix_sign(Eigen::VectorXd& v) {
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(v(i)) >= peak - 1e-12) {
        if (v(i) < 0.0) v = -v;
        return;
      }
  }

  Eigen::VectorXd values_;
  std::vector<int> indices_;
  int positive_ = 0;
  int negative_ = 0;
  std::size_t grid_ = 0;
  Eigen::MatrixXd vectors_;
  std::vector<Function> functions_;
  SpectrumSource source_ = SpectrumSource::Graph;
  Normalization normalization_ = Normalization::Adjacency;
  double truncation_floor_ = 0.0;
};

namespace detail {

/// Full symmetric eigendecomposition through LAPACK dsyevd (values ascending).
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_eigen(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw InvalidArgument("eigendecomposition: non-finite entries");
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXd v = a;
  Eigen::VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data());
  if (info != 0) throw Error("dsyevd failed with info " + std::to_string(info));
  return {std::move(w), std::move(v)};
}

}  // namespace detail

/// Full dense eigendecomposition of the operator S (scaled by 1/n under adjacency-over-n,
/// in which case the eigenvalues are those of the induced graphon operator T_{W_n}).
inline SpectralDecomposition decompose_graph(const ShiftOperator& s) {
  auto [w, v] = detail::symmetric_eigen(s.operator_matrix());
  return SpectralDecomposition::from_grid(w, v, SpectrumSource::Graph, s.normalization());
}

inline constexpr std::size_t kDefaultTruncation = 1024;

/// Spectrum of T_W. Step graphons: exact, from the step matrix divided by n. Families with
/// closed-form eigenpairs (block models, product, min, cosine, constant): used directly.
/// Other analytic kernels: discretized at resolution m; eigenvalues converge as m grows.
inline SpectralDecomposition decompose_graphon(const Graphon& w, std::size_t truncation_m = kDefaultTruncation) {
  if (truncation_m < 2) throw InvalidArgument("decompose_graphon: truncation must be at least 2");
  if (const auto* m = w.step_matrix()) {
    auto [vals, vecs] = detail::symmetric_eigen(*m / static_cast<double>(m->rows()));
    return SpectralDecomposition::from_grid(vals, vecs, SpectrumSource::InducedGraphon, Normalization::AdjacencyOverN);
  }
  if (const auto& cf = w.closed_form_spectrum())
    return SpectralDecomposition::from_functions(cf->eigenvalues, cf->eigenfunctions, cf->truncation_floor);
  const auto s = sample_graph(w, truncation_m).renormalized(Normalization::AdjacencyOverN);
  auto [vals, vecs] = detail::symmetric_eigen(s.operator_matrix());
  return SpectralDecomposition::from_grid(vals, vecs, SpectrumSource::Discretized, Normalization::AdjacencyOverN);
}

/// Max drift of the eigenvalues with |lambda| >= c between discretizations at m and 2m.
inline double discretization_drift(const Graphon& w, std::size_t m, double c) {
  const auto a = decompose_graphon(w.closed_form_spectrum() ? Graphon::step(sample_graph(w, m).matrix()) : w, m);
  const auto b =
      decompose_graphon(w.closed_form_spectrum() ? Graphon::step(sample_graph(w, 2 * m).matrix()) : w, 2 * m);
  double drift = 0.0;
  for (int sign : {1, -1})
    for (int i = 1;; ++i) {
      const double la = a.eigenvalue_or_zero(sign * i);
      const double lb = b.eigenvalue_or_zero(sign * i);
      if (std::abs(la) < c && std::abs(lb) < c) break;
      drift = std::max(drift, std::abs(la - lb));
    }
  return drift;
}

/// Frobenius error of sum_i lambda_i v_i v_i^T against the operator of S.
inline double reconstruction_error(const SpectralDecomposition& d, const ShiftOperator& s) {
  const auto& v = d.vectors();
  Eigen::MatrixXd rec = v * d.eigenvalues().asDiagonal() * v.transpose();
  return (rec - s.operator_matrix()).norm();
}

// ---------------------------------------------------------------------------
// Band constants
// ---------------------------------------------------------------------------

/// Distinct eigenvalues of a graphon operator with their multiplicities. The positive side
/// always ends with 0, the accumulation point of every graphon spectrum.
struct DistinctSpectrum {
  std::vector<double> positive;  // index 1, 2, ...
  std::vector<double> negative;  // index -1, -2, ...
  std::vector<std::size_t> positive_multiplicity;
  std::vector<std::size_t> negative_multiplicity;

  std::optional<double> at(int index) const {
    if (index > 0 && static_cast<std::size_t>(index) <= positive.size()) return positive[static_cast<std::size_t>(index - 1)];
    if (index < 0 && static_cast<std::size_t>(-index) <= negative.size()) return negative[static_cast<std::size_t>(-index - 1)];
    return std::nullopt;
  }
};

inline DistinctSpectrum distinct_spectrum(const SpectralDecomposition& d, double tol = kDistinctEigenvalueTol) {
  DistinctSpectrum out;
  auto push = [tol](std::vector<double>& vals, std::vector<std::size_t>& mult, double x) {
    if (!vals.empty() && std::abs(vals.back() - x) <= tol) {
      ++mult.back();
    } else {
      vals.push_back(x);
      mult.push_back(1);
    }
  };
  for (int i = 1; i <= d.positive_count(); ++i) {
    double x = *d.eigenvalue(i);
    if (std::abs(x) <= tol) x = 0.0;
    push(out.positive, out.positive_multiplicity, x);
  }
  if (out.positive.empty() || out.positive.back() != 0.0) {
    out.positive.push_back(0.0);
    out.positive_multiplicity.push_back(0);  // infinite-dimensional null space
  }
  for (int i = 1; i <= d.negative_count(); ++i) {
    const double x = *d.eigenvalue(-i);
    if (std::abs(x) <= tol) continue;
    push(out.negative, out.negative_multiplicity, x);
  }
  return out;
}

struct BandConstants {
  double c = 0.0;
  std::size_t n_c = 0;
  double delta_c = 0.0;
  std::vector<int> indices;        // the band set C (distinct-eigenvalue indices)
  std::vector<std::string> notes;  // omitted cross-spectrum terms
};

namespace detail {

inline double sgn(int i) { return i > 0 ? 1 : -1; }

// delta_c = min over i in C of |l_i - ln_{i+sgn i}|, |l_{i+sgn i} - ln_i|, together with
// |l_1 - ln_{-1}| and |ln_1 - l_{-1}|. Terms whose indices do not exist are skipped.
inline BandConstants band_constants_impl(const DistinctSpectrum& lam, const DistinctSpectrum& lam_n, double c) {
  BandConstants b;
  b.c = c;
  for (int i = 1; i <= static_cast<int>(lam_n.positive.size()); ++i)
    if (std::abs(*lam_n.at(i)) >= c) b.indices.push_back(i);
  for (int i = 1; i <= static_cast<int>(lam_n.negative.size()); ++i)
    if (std::abs(*lam_n.at(-i)) >= c) b.indices.push_back(-i);
  b.n_c = b.indices.size();
  if (b.indices.empty()) return b;

  double delta = std::numeric_limits<double>::infinity();
  auto term = [&](std::optional<double> x, std::optional<double> y, const std::string& label) {
    if (x && y) {
      delta = std::min(delta, std::abs(*x - *y));
    } else {
      b.notes.push_back("omitted " + label);
    }
  };
  for (int i : b.indices) {
    const int next = i + static_cast<int>(sgn(i));
    const auto si = std::to_string(i), sn = std::to_string(next);
    term(lam.at(i), lam_n.at(next), "|l_" + si + " - ln_" + sn + "|");
    term(lam.at(next), lam_n.at(i), "|l_" + sn + " - ln_" + si + "|");
  }
  term(lam.at(1), lam_n.at(-1), "|l_1 - ln_-1|");
  term(lam_n.at(1), lam.at(-1), "|ln_1 - l_-1|");
  b.delta_c = delta;
  return b;
}

inline void check_band(const BandConstants& b) {
  if (b.indices.empty()) throw EmptyBand("empty band: no induced eigenvalue reaches c = " + std::to_string(b.c));
  if (!(b.delta_c > 1e-12))
    throw DegenerateSpectrum("degenerate spectrum: delta_c = " + std::to_string(b.delta_c) + " at the band edge");
}

}  // namespace detail

/// n_c and delta_c of the approximation bound from the graphon spectrum and the spectrum of
/// the induced graphon W_n. Repeated eigenvalues count once. Throws EmptyBand or DegenerateSpectrum.
inline BandConstants band_constants(const SpectralDecomposition& w_spec, const SpectralDecomposition& wn_spec,
                                    double c) {
  if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("band threshold must lie in (0,1]");
  auto b = detail::band_constants_impl(distinct_spectrum(w_spec), distinct_spectrum(wn_spec), c);
  detail::check_band(b);
  return b;
}

/// Two-size constants: n_c' = max_j |C_j| and delta_c' = min over both induced spectra.
inline BandConstants band_constants(const SpectralDecomposition& w_spec, const SpectralDecomposition& wn1_spec,
                                    const SpectralDecomposition& wn2_spec, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("band threshold must lie in (0,1]");
  const auto lam = distinct_spectrum(w_spec);
  auto b1 = detail::band_constants_impl(lam, distinct_spectrum(wn1_spec), c);
  auto b2 = detail::band_constants_impl(lam, distinct_spectrum(wn2_spec), c);
  BandConstants b = b1.n_c >= b2.n_c ? b1 : b2;
  b.n_c = std::max(b1.n_c, b2.n_c);
  if (b1.n_c == 0 && b2.n_c == 0) {
    detail::check_band(b);
  }
  b.delta_c = std::min(b1.n_c ? b1.delta_c : std::numeric_limits<double>::infinity(),
                       b2.n_c ? b2.delta_c : std::numeric_limits<double>::infinity());
  b.notes = b1.notes;
  b.notes.insert(b.notes.end(), b2.notes.begin(), b2.notes.end());
  detail::check_band(b);
  return b;
}

// ---------------------------------------------------------------------------
// Eigenvalue perturbation
// ---------------------------------------------------------------------------

struct PerturbationReport {
  double max_eigenvalue_difference = 0.0;
  double l2_distance = 0.0;
  bool pass = false;
};

/// max over i in {1..k, -1..-k} of |lambda_i(T_W1) - lambda_i(T_W2)| (with multiplicity,
/// missing indices read as 0) against ||W1 - W2||_{L2}.
inline PerturbationReport eigenvalue_perturbation_check(const Graphon& w1, const Graphon& w2, int k,
                                                        std::size_t truncation_m = kDefaultTruncation) {
  if (k < 1) throw InvalidArgument("k must be positive");
  const auto a = decompose_graphon(w1, truncation_m);
  const auto b = decompose_graphon(w2, truncation_m);
  PerturbationReport r;
  for (int i = 1; i <= k; ++i)
    for (int idx : {i, -i})
      r.max_eigenvalue_difference =
          std::max(r.max_eigenvalue_difference, std::abs(a.eigenvalue_or_zero(idx) - b.eigenvalue_or_zero(idx)));
  r.l2_distance = graphon_l2_distance(w1, w2);
  r.pass = r.max_eigenvalue_difference <= r.l2_distance + 1e-8;
  return r;
}

// ---------------------------------------------------------------------------
// CSV export: index, eigenvalue, source, n
// ---------------------------------------------------------------------------

inline void write_spectrum_csv_header(std::ostream& os) { os << "index,eigenvalue,source,n\n"; }

inline void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& d, const std::string& source,
                               std::size_t n) {
  os << std::setprecision(17);
  for (std::size_t k = 0; k < d.rank(); ++k)
    os << d.indices()[k] << ',' << d.eigenvalues()(static_cast<Eigen::Index>(k)) << ',' << source << ',' << n << '\n';
}

}  // namespace wnn
