#pragma once

// Adaptive Gauss-Kronrod integration over [0,1] partitions. Every L2 norm that
// involves an analytic function goes through here; step-vs-step norms never do.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace wnn::quad {

/// Documented absolute tolerance for analytic L2 norms on [0,1].
inline constexpr double kAbsTol = 1e-9;

/// Relative tolerance on each partition cell.
inline constexpr double kRelTol = 1e-12;

inline constexpr unsigned kMaxDepth = 12;

namespace detail {

inline double max_abs(double x) { return std::abs(x); }
inline double max_abs(const Eigen::VectorXd& x) { return x.lpNorm<Eigen::Infinity>(); }

// Kronrod-15 estimate on [a,b] and its distance to the embedded Gauss-7 estimate.
template <class T, class F>
T gk15(F& f, double a, double b, double& err) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const T c = f(mid);
  T kronrod = GK::weights()[0] * c;
  T gauss = G::weights()[0] * c;
  for (std::size_t i = 1; i < GK::abscissa().size(); ++i) {
    const double x = half * GK::abscissa()[i];
    const T s = f(mid + x) + f(mid - x);
    kronrod += GK::weights()[i] * s;
    if (i % 2 == 0) gauss += G::weights()[i / 2] * s;
  }
  kronrod *= half;
  gauss *= half;
  err = max_abs(T(kronrod - gauss));
  return kronrod;
}

// Bisects until |K - G| <= max(kAbsTol (b - a), kRelTol |K|) or the depth runs out.
template <class T, class F>
T adaptive(F& f, double a, double b, unsigned depth) {
  double err = 0.0;
  T k = gk15<T>(f, a, b, err);
  if (depth == 0 || err <= std::max(kAbsTol * (b - a), kRelTol * max_abs(k))) return k;
  const double m = 0.5 * (a + b);
  T left = adaptive<T>(f, a, m, depth - 1);
  left += adaptive<T>(f, m, b, depth - 1);
  return left;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a,b]. The Kronrod/Gauss difference is driven
/// below kAbsTol per unit length, so a full partition of [0,1] meets kAbsTol overall.
template <class F>
double integrate(F&& f, double a, double b, unsigned max_depth = kMaxDepth) {
  if (!(b > a)) return 0.0;
  return detail::adaptive<double>(f, a, b, max_depth);
}

/// Sorted union of the uniform breakpoint sets {k / g : 0 <= k <= g} for every g in grids.
/// Comparisons are done in integer arithmetic so coincident breakpoints merge exactly.
inline std::vector<double> merged_breakpoints(const std::vector<std::size_t>& grids) {
  std::vector<std::size_t> gs;
  for (std::size_t g : grids)
    if (g > 0) gs.push_back(g);
  std::sort(gs.begin(), gs.end());
  gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
  if (gs.empty()) return {0.0, 1.0};

  struct Frac {
    std::size_t num, den;
  };
  std::vector<Frac> pts;
  for (std::size_t g : gs)
    for (std::size_t k = 0; k <= g; ++k) pts.push_back({k, g});
  auto less = [](const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; };
  auto same = [](const Frac& a, const Frac& b) { return a.num * b.den == b.num * a.den; };
  std::sort(pts.begin(), pts.end(), less);
  pts.erase(std::unique(pts.begin(), pts.end(), same), pts.end());

  std::vector<double> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(static_cast<double>(p.num) / static_cast<double>(p.den));
  return out;
}

/// Sum of adaptive integrals of f over consecutive cells of a breakpoint list.
template <class F>
double integrate_partition(F&& f, const std::vector<double>& breaks, unsigned max_depth = kMaxDepth) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) total += integrate(f, breaks[i], breaks[i + 1], max_depth);
  return total;
}

/// Default partition for functions without known breakpoints.
inline constexpr std::size_t kDefaultCells = 64;

/// Componentwise integral of a vector-valued f over a breakpoint partition (same stopping rule
/// as integrate, applied to the largest component error).
template <class F>
Eigen::VectorXd integrate_vector(F&& f, const std::vector<double>& breaks, unsigned max_depth = kMaxDepth) {
  Eigen::VectorXd total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    Eigen::VectorXd part = detail::adaptive<Eigen::VectorXd>(f, breaks[i], breaks[i + 1], max_depth);
    if (total.size() == 0) {
      total = std::move(part);
    } else {
      total += part;
    }
  }
  return total;
}

}  // namespace wnn::quad
