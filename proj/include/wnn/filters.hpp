#pragma once

// Graph convolutions (iterated shifts and spectral form), graphon convolutions
// through the spectral expansion, and the banded-ramp filter family.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wnn/error.hpp"
#include "wnn/graphon.hpp"
#include "wnn/quadrature.hpp"
#include "wnn/spectral.hpp"

namespace wnn {

/// Polynomial taps h = [h_0, ..., h_{K-1}].
class FilterTaps {
 public:
  FilterTaps() : taps_{0.0} {}
  explicit FilterTaps(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) throw InvalidArgument("filter needs at least one tap");
    for (double t : taps_)
      if (!std::isfinite(t)) throw InvalidArgument("filter taps must be finite");
  }

  std::size_t size() const { return taps_.size(); }
  double operator[](std::size_t k) const { return taps_[k]; }
  const std::vector<double>& taps() const { return taps_; }

  /// h(lambda) = sum_k h_k lambda^k.
  double response(double lambda) const {
    double acc = 0.0;
    for (auto it = taps_.rbegin(); it != taps_.rend(); ++it) acc = acc * lambda + *it;
    return acc;
  }

  bool operator==(const FilterTaps&) const = default;

 private:
  std::vector<double> taps_;
};

enum class FilterFamily { Polynomial, BandedRamp, Table };

inline const char* to_string(FilterFamily f) {
  switch (f) {
    case FilterFamily::Polynomial: return "polynomial";
    case FilterFamily::BandedRamp: return "banded-ramp";
    case FilterFamily::Table: return "table";
  }
  return "?";
}

/// Frequency response h(lambda) on [-1,1].
class SpectralFilter {
 public:
  static SpectralFilter polynomial(FilterTaps taps) {
    SpectralFilter f;
    f.family_ = FilterFamily::Polynomial;
    f.taps_ = std::move(taps);
    return f;
  }

  /// Even response g(|lambda|): plateau on [0,c), then plateau + slope (|lambda| - c) clipped to
  /// [-bound, bound]. With strict, any parameters reaching |g| >= bound on [0,1] are rejected.
  static SpectralFilter banded_ramp(double c, double plateau, double slope, bool strict = true, double bound = 1.0) {
    if (!(c > 0.0 && c <= 1.0)) throw InvalidArgument("banded ramp needs c in (0,1]");
    if (!std::isfinite(plateau) || !std::isfinite(slope)) throw InvalidArgument("banded ramp parameters must be finite");
    if (!(bound > 0.0 && bound <= 1.0)) throw InvalidArgument("banded ramp bound must lie in (0,1]");
    if (std::abs(plateau) > bound) throw InvalidArgument("banded ramp plateau exceeds the response bound");
    const double top = plateau + slope * (1.0 - c);
    if (strict && (std::abs(plateau) >= bound || std::abs(top) >= bound))
      throw InvalidArgument("banded ramp would reach |h| >= " + std::to_string(bound));
    SpectralFilter f;
    f.family_ = FilterFamily::BandedRamp;
    f.c_ = c;
    f.plateau_ = plateau;
    f.slope_ = slope;
    f.bound_ = bound;
    return f;
  }

  /// Even piecewise-linear response through (knots[k], values[k]), knots increasing from 0 to 1.
  static SpectralFilter table(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size()) throw InvalidArgument("table filter needs matching knots");
    if (knots.front() != 0.0 || knots.back() != 1.0) throw InvalidArgument("table knots must span [0,1]");
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
      if (!(knots[k + 1] > knots[k])) throw InvalidArgument("table knots must increase");
    SpectralFilter f;
    f.family_ = FilterFamily::Table;
    f.knots_ = std::move(knots);
    f.values_ = std::move(values);
    return f;
  }

  double operator()(double lambda) const {
    switch (family_) {
      case FilterFamily::Polynomial: return taps_.response(lambda);
      case FilterFamily::BandedRamp: {
        const double a = std::abs(lambda);
        if (a < c_) return plateau_;
        return std::clamp(plateau_ + slope_ * (a - c_), -bound_, bound_);
      }
      case FilterFamily::Table: {
        const double a = std::min(std::abs(lambda), 1.0);
        auto it = std::upper_bound(knots_.begin(), knots_.end(), a);
        if (it == knots_.end()) return values_.back();
        const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
        const double t = (a - knots_[k]) / (knots_[k + 1] - knots_[k]);
        return values_[k] + t * (values_[k + 1] - values_[k]);
      }
    }
    return 0.0;
  }

  FilterFamily family() const { return family_; }
  const FilterTaps& taps() const { return taps_; }
  double c() const { return c_; }
  double plateau() const { return plateau_; }
  double slope() const { return slope_; }
  double bound() const { return bound_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

  /// Certified Lipschitz constant: sum k |h_k| for polynomials, |slope| for ramps,
  /// steepest segment for tables.
  double lipschitz() const {
    switch (family_) {
      case FilterFamily::Polynomial: {
        double s = 0.0;
        for (std::size_t k = 1; k < taps_.size(); ++k) s += static_cast<double>(k) * std::abs(taps_[k]);
        return s;
      }
      case FilterFamily::BandedRamp: return std::abs(slope_);
      case FilterFamily::Table: {
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < knots_.size(); ++k)
          s = std::max(s, std::abs(values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k]));
        return s;
      }
    }
    return 0.0;
  }

  /// sup |h| on [-1,1]; exact for ramps and tables, grid-probed for polynomials.
  double sup_abs() const {
    switch (family_) {
      case FilterFamily::BandedRamp: return std::max(std::abs(plateau_), std::abs((*this)(1.0)));
      case FilterFamily::Table: {
        double s = 0.0;
        for (double v : values_) s = std::max(s, std::abs(v));
        return s;
      }
      case FilterFamily::Polynomial: break;
    }
    double s = 0.0;
    for (int i = 0; i <= 4096; ++i) s = std::max(s, std::abs((*this)(-1.0 + i / 2048.0)));
    return s;
  }

  /// Largest c with h constant on (-c, c): 0 for non-constant polynomials, 1 for constant responses.
  double c_effective() const {
    switch (family_) {
      case FilterFamily::Polynomial: {
        for (std::size_t k = 1; k < taps_.size(); ++k)
          if (taps_[k] != 0.0) return 0.0;
        return 1.0;
      }
      case FilterFamily::BandedRamp: return slope_ == 0.0 ? 1.0 : c_;
      case FilterFamily::Table: {
        for (std::size_t k = 1; k < values_.size(); ++k)
          if (std::abs(values_[k] - values_[0]) > 1e-12) return knots_[k - 1];
        return 1.0;
      }
    }
    return 0.0;
  }

  /// Same response multiplied by alpha (ramps keep their shape, including the clip level).
  SpectralFilter scaled(double alpha) const {
    SpectralFilter f = *this;
    switch (family_) {
      case FilterFamily::Polynomial: {
        auto t = taps_.taps();
        for (double& v : t) v *= alpha;
        f.taps_ = FilterTaps(std::move(t));
        break;
      }
      case FilterFamily::BandedRamp:
        if (!(std::abs(alpha) <= 1.0)) throw InvalidArgument("ramp filters can only be scaled down");
        f.plateau_ *= alpha;
        f.slope_ *= alpha;
        f.bound_ = std::max(bound_ * std::abs(alpha), std::numeric_limits<double>::min());
        break;
      case FilterFamily::Table:
        for (double& v : f.values_) v *= alpha;
        break;
    }
    return f;
  }

 private:
  FilterFamily family_ = FilterFamily::Polynomial;
  FilterTaps taps_;
  double c_ = 0.0;
  double plateau_ = 0.0;
  double slope_ = 0.0;
  double bound_ = 1.0;
  std::vector<double> knots_, values_;
};

inline SpectralFilter make_banded_ramp(double c, double plateau, double slope, bool strict = true) {
  return SpectralFilter::banded_ramp(c, plateau, slope, strict);
}

struct FilterConstants {
  double a2 = 0.0;         // certified Lipschitz constant
  double a2_grid = 0.0;    // grid-probed Lipschitz constant (lower bound)
  double sup_abs = 0.0;    // grid-probed sup |h|
  double c_effective = 0.0;
};

/// Grid-probed constants on grid_m + 1 points of [-1,1] together with the certified values.
inline FilterConstants filter_constants(const SpectralFilter& f, std::size_t grid_m = 4096) {
  if (grid_m < 256) throw InvalidArgument("filter_constants needs grid_m >= 256");
  FilterConstants out;
  const double h = 2.0 / static_cast<double>(grid_m);
  double prev = f(-1.0);
  out.sup_abs = std::abs(prev);
  for (std::size_t i = 1; i <= grid_m; ++i) {
    const double cur = f(-1.0 + static_cast<double>(i) * h);
    out.sup_abs = std::max(out.sup_abs, std::abs(cur));
    out.a2_grid = std::max(out.a2_grid, std::abs(cur - prev) / h);
    prev = cur;
  }
  out.a2 = f.lipschitz();
  out.c_effective = f.c_effective();
  return out;
}

// ---------------------------------------------------------------------------
// Graph convolutions
// ---------------------------------------------------------------------------

/// sum_k h_k S^k x by K-1 shifts of x (S^k is never formed). Works column-wise on batches.
template <class Derived>
Eigen::MatrixXd graph_convolve(const FilterTaps& h, const ShiftOperator& s, const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() != s.size()) throw DimensionMismatch("graph_convolve: signal length does not match S");
  Eigen::MatrixXd z = x;
  Eigen::MatrixXd y = h[0] * z;
  for (std::size_t k = 1; k < h.size(); ++k) {
    z = s.apply(z);
    y += h[k] * z;
  }
  return y;
}

/// V h(Lambda) V^T x for a grid spectrum of the paired operator.
template <class Derived>
Eigen::MatrixXd graph_convolve_spectral(const SpectralFilter& f, const SpectralDecomposition& spec,
                                        const Eigen::MatrixBase<Derived>& x) {
  const auto& v = spec.vectors();
  if (x.rows() != v.rows()) throw DimensionMismatch("graph_convolve_spectral: signal length does not match spectrum");
  Eigen::VectorXd resp(static_cast<Eigen::Index>(spec.rank()));
  for (Eigen::Index k = 0; k < resp.size(); ++k) resp(k) = f(spec.eigenvalues()(k));
  Eigen::MatrixXd coef = v.transpose() * x;
  coef = resp.asDiagonal() * coef;
  return v * coef;
}

// ---------------------------------------------------------------------------
// Graphon convolutions
// ---------------------------------------------------------------------------

namespace detail {

/// Values of the stored eigenfunctions at u (L2-normalized).
inline Eigen::VectorXd eigenfunctions_at(const SpectralDecomposition& spec, double u) {
  const auto r = static_cast<Eigen::Index>(spec.rank());
  if (spec.on_grid()) {
    const auto n = spec.grid();
    return std::sqrt(static_cast<double>(n)) *
           spec.vectors().row(static_cast<Eigen::Index>(cell_index(u, n))).transpose();
  }
  Eigen::VectorXd out(r);
  for (Eigen::Index k = 0; k < r; ++k) out(k) = spec.functions()[static_cast<std::size_t>(k)](u);
  return out;
}

/// Breakpoints at which the eigenfunctions may jump.
inline std::vector<std::size_t> spectrum_grids(const SpectralDecomposition& spec) {
  if (spec.on_grid()) return {spec.grid()};
  return {};
}

/// Integrals of X over the cells I_j of an n-grid (cell means times 1/n).
inline Eigen::VectorXd cell_integrals(const GraphonSignal& x, std::size_t n) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  auto grids = x.grids();
  grids.push_back(n);
  const auto breaks = quad::merged_breakpoints(grids);
  std::size_t b = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double hi = grid_point(j + 1, n);
    double acc = 0.0;
    while (b + 1 < breaks.size() && breaks[b + 1] <= hi) {
      acc += quad::integrate([&](double u) { return x(u); }, breaks[b], breaks[b + 1]);
      ++b;
    }
    out(static_cast<Eigen::Index>(j)) = acc;
  }
  return out;
}

}  // namespace detail

/// <phi_i, X> for every stored eigenfunction.
inline Eigen::VectorXd spectral_coefficients(const SpectralDecomposition& spec, const GraphonSignal& x) {
  if (spec.on_grid()) {
    const auto n = spec.grid();
    const double root_n = std::sqrt(static_cast<double>(n));
    if (x.is_step() && x.size() == n) return spec.vectors().transpose() * x.values() / root_n;
    return root_n * (spec.vectors().transpose() * detail::cell_integrals(x, n));
  }
  auto grids = x.grids();
  if (grids.empty()) grids.push_back(quad::kDefaultCells);
  return quad::integrate_vector([&](double u) { return (detail::eigenfunctions_at(spec, u) * x(u)).eval(); },
                                quad::merged_breakpoints(grids));
}

/// T_H X = h(0) X + sum_i (h(lambda_i) - h(0)) phi_i <phi_i, X>. This is the spectral sum over the
/// stored eigenpairs with the unresolved part of L2 (the kernel of T_W, plus any truncated tail)
/// treated as lambda = 0. For step spectra and step signals on the same grid the result is an
/// exact step signal.
inline GraphonSignal graphon_convolve(const SpectralFilter& f, const SpectralDecomposition& spec,
                                      const GraphonSignal& x) {
  const double h0 = f(0.0);
  const auto r = static_cast<Eigen::Index>(spec.rank());
  Eigen::VectorXd gain(r);
  for (Eigen::Index k = 0; k < r; ++k) gain(k) = f(spec.eigenvalues()(k)) - h0;
  const Eigen::VectorXd coef = gain.cwiseProduct(spectral_coefficients(spec, x));

  if (spec.on_grid()) {
    const auto n = spec.grid();
    Eigen::VectorXd part = std::sqrt(static_cast<double>(n)) * (spec.vectors() * coef);
    if (x.is_step() && x.size() == n) return GraphonSignal::step(h0 * x.values() + part);
    if (h0 == 0.0) return GraphonSignal::step(std::move(part));
    auto grids = x.grids();
    grids.push_back(n);
    return GraphonSignal::analytic(
        [x, h0, part = std::move(part), n](double u) {
          return h0 * x(u) + part(static_cast<Eigen::Index>(cell_index(u, n)));
        },
        std::nullopt, std::move(grids));
  }
  return GraphonSignal::analytic(
      [x, h0, coef, spec](double u) { return h0 * x(u) + coef.dot(detail::eigenfunctions_at(spec, u)); },
      std::nullopt, x.grids());
}

}  // namespace wnn
