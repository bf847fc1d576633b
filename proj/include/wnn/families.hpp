#pragma once

// Built-in graphon and signal families. Smooth families carry their analytic
// Lipschitz constants; block models carry none and are refused by the bounds.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wnn/graphon.hpp"

namespace wnn::families {

/// Eigenvalues below this are dropped from truncated closed-form spectra.
inline constexpr double kSpectrumFloor = 1e-6;

/// W(u,v) = u v. Rank one: lambda = 1/3, phi(u) = sqrt(3) u. A1 = 1.
inline Graphon product() {
  ClosedFormSpectrum s;
  s.eigenvalues = {1.0 / 3.0};
  s.eigenfunctions = {[](double u) { return std::sqrt(3.0) * u; }};
  return Graphon::analytic("product", [](double u, double v) { return u * v; }, 1.0, std::move(s));
}

/// W(u,v) = min(u,v), the Brownian covariance kernel. Eigenpairs
/// lambda_k = 1/((k-1/2)^2 pi^2), phi_k(u) = sqrt(2) sin((k-1/2) pi u), truncated at kSpectrumFloor.
inline Graphon min_kernel() {
  ClosedFormSpectrum s;
  s.truncation_floor = kSpectrumFloor;
  for (int k = 1;; ++k) {
    const double w = (k - 0.5) * std::numbers::pi;
    const double lam = 1.0 / (w * w);
    if (lam < kSpectrumFloor) break;
    s.eigenvalues.push_back(lam);
    s.eigenfunctions.emplace_back([w](double u) { return std::sqrt(2.0) * std::sin(w * u); });
  }
  return Graphon::analytic("min", [](double u, double v) { return std::min(u, v); }, 1.0, std::move(s));
}

/// W(u,v) = a + b cos(2 pi (u - v)). Rank three: a on the constant, b/2 (twice) on
/// sqrt(2) cos(2 pi u) and sqrt(2) sin(2 pi u). A1 = 2 pi |b|.
inline Graphon cosine(double a = 0.5, double b = 0.25) {
  if (a - std::abs(b) < 0.0 || a + std::abs(b) > 1.0) throw InvalidArgument("cosine graphon leaves [0,1]");
  ClosedFormSpectrum s;
  if (a != 0.0) {
    s.eigenvalues.push_back(a);
    s.eigenfunctions.emplace_back([](double) { return 1.0; });
  }
  if (b != 0.0) {
    const double tau = 2.0 * std::numbers::pi;
    s.eigenvalues.push_back(b / 2.0);
    s.eigenfunctions.emplace_back([tau](double u) { return std::sqrt(2.0) * std::cos(tau * u); });
    s.eigenvalues.push_back(b / 2.0);
    s.eigenfunctions.emplace_back([tau](double u) { return std::sqrt(2.0) * std::sin(tau * u); });
  }
  return Graphon::analytic(
      "cosine", [a, b](double u, double v) { return a + b * std::cos(2.0 * std::numbers::pi * (u - v)); },
      2.0 * std::numbers::pi * std::abs(b), std::move(s));
}

/// W(u,v) = exp(-beta (u-v)^2). No closed-form spectrum; decomposed by discretization.
inline Graphon gaussian(double beta = 1.0) {
  if (!(beta > 0.0)) throw InvalidArgument("gaussian graphon needs beta > 0");
  const double peak = 1.0 / std::sqrt(2.0 * beta);
  const double a1 = peak <= 1.0 ? std::sqrt(2.0 * beta) * std::exp(-0.5) : 2.0 * beta * std::exp(-beta);
  return Graphon::analytic(
      "gaussian", [beta](double u, double v) { return std::exp(-beta * (u - v) * (u - v)); }, a1);
}

/// W(u,v) = c. Rank one (c, 1) when c != 0. A1 = 0.
inline Graphon constant(double c) {
  if (c < 0.0 || c > 1.0) throw InvalidArgument("constant graphon must lie in [0,1]");
  ClosedFormSpectrum s;
  if (c != 0.0) {
    s.eigenvalues = {c};
    s.eigenfunctions = {[](double) { return 1.0; }};
  }
  return Graphon::analytic("constant", [c](double, double) { return c; }, 0.0, std::move(s));
}

/// Block model whose community membership switches linearly over a window of the given width at
/// each boundary: W(u,v) = m(u)^T B m(v) with B = q 11^T + (p - q) I and m a piecewise-linear
/// partition of unity. Lipschitz with A1 = |p - q| / width; rank K with eigenpairs from
/// G^{1/2} B G^{1/2}, G the (tridiagonal) Gram matrix of m. While 1/n exceeds the width every
/// boundary looks like a jump to the sampled graphs, so errors decay like n^{-1/2} there.
inline Graphon smooth_sbm(double p, double q, std::vector<double> boundaries, double width) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0) throw InvalidArgument("smooth_sbm probabilities must lie in [0,1]");
  if (!(width > 0.0)) throw InvalidArgument("smooth_sbm needs a positive transition width");
  if (boundaries.empty()) throw InvalidArgument("smooth_sbm needs at least one boundary");
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), boundaries.begin(), boundaries.end());
  edges.push_back(1.0);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double room = edges[k + 1] - edges[k] - ((k == 0 || k + 2 == edges.size()) ? width / 2 : width);
    if (!(room > 0.0)) throw InvalidArgument("smooth_sbm boundaries must increase and leave room for the windows");
  }
  const auto K = static_cast<Eigen::Index>(boundaries.size() + 1);

  // s_j(u): 0 before window j, 1 after it.
  auto memberships = [boundaries, width, K](double u) {
    Eigen::VectorXd m(K);
    double prev = 1.0;
    for (Eigen::Index k = 0; k + 1 < K; ++k) {
      const double s = std::clamp((u - boundaries[static_cast<std::size_t>(k)] + width / 2) / width, 0.0, 1.0);
      m(k) = prev - s;
      prev = s;
    }
    m(K - 1) = prev;
    return m;
  };

  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(K, K, q);
  b.diagonal().setConstant(p);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double len = edges[static_cast<std::size_t>(k) + 1] - edges[static_cast<std::size_t>(k)];
    g(k, k) = len - ((k == 0 || k == K - 1) ? width / 6 : width / 3);
    if (k + 1 < K) g(k, k + 1) = g(k + 1, k) = width / 6;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(g);
  const Eigen::MatrixXd root = gs.operatorSqrt();
  const Eigen::MatrixXd inv_root = gs.operatorInverseSqrt();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(root * b * root);

  ClosedFormSpectrum spec;
  for (Eigen::Index j = 0; j < K; ++j) {
    if (std::abs(es.eigenvalues()(j)) <= 1e-14) continue;
    const Eigen::VectorXd coef = inv_root * es.eigenvectors().col(j);
    spec.eigenvalues.push_back(es.eigenvalues()(j));
    spec.eigenfunctions.emplace_back([memberships, coef](double u) { return memberships(u).dot(coef); });
  }
  auto kernel = [memberships, b](double u, double v) { return memberships(u).dot(b * memberships(v)); };
  return Graphon::analytic("smooth-sbm", kernel, std::abs(p - q) / width, std::move(spec));
}

/// Default smoothed block model: eight communities of distinct sizes, p = 0.8, q = 0.2,
/// transition width 1e-5 (A1 = 6e4).
inline Graphon smooth_sbm() {
  return smooth_sbm(0.8, 0.2, {0.1093, 0.2287, 0.3141, 0.4428, 0.5772, 0.6931, 0.8462}, 1e-5);
}

/// Balanced stochastic block model: p inside communities, q across.
inline Graphon sbm(double p, double q, std::size_t communities = 2) {
  if (communities < 1) throw InvalidArgument("sbm needs at least one community");
  const auto K = static_cast<Eigen::Index>(communities);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(K, K, q);
  m.diagonal().setConstant(p);
  BlockStructure b = BlockStructure::uniform(std::move(m));
  return Graphon::block_model(std::move(b), "sbm");
}

// ---------------------------------------------------------------------------
// Signals
// ---------------------------------------------------------------------------

/// X(u) = u, A3 = 1.
inline GraphonSignal linear() {
  return GraphonSignal::analytic([](double u) { return u; }, 1.0);
}

inline GraphonSignal constant_signal(double c) {
  return GraphonSignal::analytic([c](double) { return c; }, 0.0);
}

/// X(u) = sin(2 pi f u), A3 = 2 pi f.
inline GraphonSignal sine(double f = 1.0) {
  const double w = 2.0 * std::numbers::pi * f;
  return GraphonSignal::analytic([w](double u) { return std::sin(w * u); }, std::abs(w));
}

/// X(u) = cos(pi f u), A3 = pi f.
inline GraphonSignal cosine_signal(double f = 1.0) {
  const double w = std::numbers::pi * f;
  return GraphonSignal::analytic([w](double u) { return std::cos(w * u); }, std::abs(w));
}

}  // namespace wnn::families
