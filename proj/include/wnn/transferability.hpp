#pragma once

// Approximation and transfer bounds evaluated from measured constants, the matching
// empirical L2 errors, and log-log rate fits over size sweeps.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wnn/error.hpp"
#include "wnn/filters.hpp"
#include "wnn/gnn.hpp"
#include "wnn/graphon.hpp"
#include "wnn/spectral.hpp"

namespace wnn {

enum class Theorem { Approximation, Transfer, Convolution };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::Approximation: return "t1-approximation";
    case Theorem::Transfer: return "t2-transfer";
    case Theorem::Convolution: return "t4-convolution";
  }
  return "?";
}

struct BoundConstants {
  std::size_t layers = 1;
  std::size_t width = 1;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
  double c = 0.0;
  std::size_t n_c = 0;
  double delta_c = std::numeric_limits<double>::infinity();
  double norm_x = 0.0;
  std::string a1_source = "family", a3_source = "family";
};

struct BoundReport {
  Theorem theorem = Theorem::Approximation;
  BoundConstants constants;
  std::size_t n1 = 0, n2 = 0;  // n2 = 0 for single-size reports
  double bound_value = 0.0;
  double empirical_error = 0.0;
  bool satisfied = false;
  std::vector<std::string> notes;

  /// Empirical error divided by ||X||.
  double relative_error() const {
    return constants.norm_x > 0.0 ? empirical_error / constants.norm_x : std::numeric_limits<double>::quiet_NaN();
  }
};

// ---------------------------------------------------------------------------
// Bound formulas
// ---------------------------------------------------------------------------

namespace detail {
inline double band_term(std::size_t n_c, double delta_c) {
  return n_c == 0 ? 0.0 : std::numbers::pi * static_cast<double>(n_c) / delta_c;
}
inline double rsqrt(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }
}  // namespace detail

/// L F^{L-1} sqrt(A1) (A2 + pi n_c / delta_c) n^{-1/2} ||X|| + A3 / sqrt(3) n^{-1/2}.
inline double theorem1_formula(const BoundConstants& k, std::size_t n) {
  const double arch = static_cast<double>(k.layers) * std::pow(static_cast<double>(k.width), double(k.layers) - 1.0);
  return arch * std::sqrt(k.a1) * (k.a2 + detail::band_term(k.n_c, k.delta_c)) * detail::rsqrt(n) * k.norm_x +
         k.a3 / std::sqrt(3.0) * detail::rsqrt(n);
}

/// Two-size form with n_c', delta_c' and the factor (n1^{-1/2} + n2^{-1/2}).
inline double theorem2_formula(const BoundConstants& k, std::size_t n1, std::size_t n2) {
  const double arch = static_cast<double>(k.layers) * std::pow(static_cast<double>(k.width), double(k.layers) - 1.0);
  const double s = detail::rsqrt(n1) + detail::rsqrt(n2);
  return arch * std::sqrt(k.a1) * (k.a2 + detail::band_term(k.n_c, k.delta_c)) * s * k.norm_x +
         k.a3 / std::sqrt(3.0) * s;
}

/// Single filter: sqrt(A1) (A2 + pi n_c / delta_c) n^{-1/2} ||X|| + 2 A3 / sqrt(3) n^{-1/2};
/// the A3 term is dropped when the input already is the step signal X_n.
inline double theorem4_formula(const BoundConstants& k, std::size_t n, bool step_input) {
  const double main = std::sqrt(k.a1) * (k.a2 + detail::band_term(k.n_c, k.delta_c)) * detail::rsqrt(n) * k.norm_x;
  return step_input ? main : main + 2.0 * k.a3 / std::sqrt(3.0) * detail::rsqrt(n);
}

// ---------------------------------------------------------------------------
// Evaluation context: the graphon spectrum and per-size samples, computed once
// ---------------------------------------------------------------------------

struct SizeSample {
  ShiftOperator shift;
  GraphSignal signal;
  SpectralDecomposition spectrum;
};

struct BoundOptions {
  /// Resolution for graphons without a closed-form spectrum.
  std::size_t truncation_m = 4096;
  /// Worker threads for per-size eigendecompositions.
  unsigned jobs = 1;
};

class TransferContext {
 public:
  TransferContext(Graphon w, GraphonSignal x, BoundOptions opts = {}) : w_(std::move(w)), x_(std::move(x)), opts_(opts) {
    if (w_.kind() == GraphonKind::StochasticBlockModel || !w_.lipschitz())
      throw NotLipschitz("graphon '" + w_.name() +
                         "' has no Lipschitz constant; the transfer bounds require an A1-Lipschitz graphon");
    if (!x_.lipschitz()) throw NotLipschitz("the input signal has no Lipschitz constant A3");
    w_spec_ = decompose_graphon(w_, opts_.truncation_m);
    if (w_spec_.source() == SpectrumSource::Discretized)
      notes_.push_back("graphon spectrum discretized at m = " + std::to_string(opts_.truncation_m));
    norm_x_ = l2_norm(x_);
  }

  const Graphon& graphon() const { return w_; }
  const GraphonSignal& signal() const { return x_; }
  const SpectralDecomposition& graphon_spectrum() const { return w_spec_; }
  double norm_x() const { return norm_x_; }
  const std::vector<std::string>& notes() const { return notes_; }

  /// Decomposes every missing size (in parallel when jobs > 1).
  void prepare(const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> todo;
    for (auto n : sizes)
      if (!samples_.count(n) && std::find(todo.begin(), todo.end(), n) == todo.end()) todo.push_back(n);
    const unsigned jobs = std::max(1u, opts_.jobs);
    for (std::size_t i = 0; i < todo.size(); i += jobs) {
      std::vector<std::future<SizeSample>> fs;
      for (std::size_t j = i; j < std::min(todo.size(), i + jobs); ++j)
        fs.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                [this, n = todo[j]] { return make_sample(n); }));
      for (std::size_t j = 0; j < fs.size(); ++j) samples_.emplace(todo[i + j], fs[j].get());
    }
  }

  const SizeSample& sample(std::size_t n) {
    if (n < 1) throw InvalidArgument("sizes must be positive");
    prepare({n});
    return samples_.at(n);
  }

  BoundConstants base_constants() const {
    BoundConstants k;
    k.a1 = *w_.lipschitz();
    k.a3 = *x_.lipschitz();
    k.norm_x = norm_x_;
    return k;
  }

 private:
  SizeSample make_sample(std::size_t n) const {
    auto s = sample_graph(w_, n).renormalized(Normalization::AdjacencyOverN);
    auto spec = decompose_graph(s);
    return SizeSample{std::move(s), sample_signal(x_, n), std::move(spec)};
  }

  Graphon w_;
  GraphonSignal x_;
  BoundOptions opts_;
  SpectralDecomposition w_spec_;
  double norm_x_ = 0.0;
  std::vector<std::string> notes_;
  std::map<std::size_t, SizeSample> samples_;
};

namespace detail {

inline BandConstants band_or_empty(const std::function<BandConstants()>& compute, double c) {
  try {
    return compute();
  } catch (const EmptyBand&) {
    BandConstants b;
    b.c = c;
    b.delta_c = std::numeric_limits<double>::infinity();
    b.notes.push_back("empty band: n_c = 0");
    return b;
  }
}

inline void finish(BoundReport& r, const std::vector<std::string>& context_notes, const BandConstants& b) {
  r.constants.c = b.c;
  r.constants.n_c = b.n_c;
  r.constants.delta_c = b.delta_c;
  r.notes.insert(r.notes.end(), context_notes.begin(), context_notes.end());
  r.notes.insert(r.notes.end(), b.notes.begin(), b.notes.end());
  r.satisfied = r.empirical_error <= r.bound_value + 1e-9;
}

}  // namespace detail

/// ||Y_n - Y|| for Y = Phi(H; W; X) against the bound. H must be in theorem mode.
inline BoundReport theorem1_bound(const GnnParams& h, TransferContext& ctx, std::size_t n) {
  const double c = h.theorem_band();
  const auto& smp = ctx.sample(n);
  BoundReport r;
  r.theorem = Theorem::Approximation;
  r.n1 = n;
  const auto b = detail::band_or_empty([&] { return band_constants(ctx.graphon_spectrum(), smp.spectrum, c); }, c);
  r.constants = ctx.base_constants();
  r.constants.layers = h.depth();
  r.constants.width = h.hidden_width();
  r.constants.a2 = h.a2();
  r.constants.n_c = b.n_c;
  r.constants.delta_c = b.delta_c;
  r.bound_value = theorem1_formula(r.constants, n);

  const auto y = wnn_forward(h, ctx.graphon_spectrum(), {ctx.signal()});
  const auto yn = induced_output(h, smp.shift, {smp.signal}, &smp.spectrum);
  r.empirical_error = l2_distance(y, yn);
  detail::finish(r, ctx.notes(), b);
  return r;
}

inline BoundReport theorem1_bound(const GnnParams& h, const Graphon& w, const GraphonSignal& x, std::size_t n,
                                  BoundOptions opts = {}) {
  TransferContext ctx(w, x, opts);
  return theorem1_bound(h, ctx, n);
}

/// ||Y_{n1} - Y_{n2}|| between the two induced outputs (exact on the merged step grid).
inline BoundReport theorem2_bound(const GnnParams& h, TransferContext& ctx, std::size_t n1, std::size_t n2) {
  if (n1 == n2) throw InvalidArgument("sizes must differ");
  const double c = h.theorem_band();
  ctx.prepare({n1, n2});
  const auto& s1 = ctx.sample(n1);
  const auto& s2 = ctx.sample(n2);
  BoundReport r;
  r.theorem = Theorem::Transfer;
  r.n1 = n1;
  r.n2 = n2;
  const auto b = detail::band_or_empty(
      [&] { return band_constants(ctx.graphon_spectrum(), s1.spectrum, s2.spectrum, c); }, c);
  r.constants = ctx.base_constants();
  r.constants.layers = h.depth();
  r.constants.width = h.hidden_width();
  r.constants.a2 = h.a2();
  r.constants.n_c = b.n_c;
  r.constants.delta_c = b.delta_c;
  r.bound_value = theorem2_formula(r.constants, n1, n2);
  const auto y1 = induced_output(h, s1.shift, {s1.signal}, &s1.spectrum);
  const auto y2 = induced_output(h, s2.shift, {s2.signal}, &s2.spectrum);
  r.empirical_error = l2_distance(y1, y2);
  detail::finish(r, ctx.notes(), b);
  return r;
}

inline BoundReport theorem2_bound(const GnnParams& h, const Graphon& w, const GraphonSignal& x, std::size_t n1,
                                  std::size_t n2, BoundOptions opts = {}) {
  if (n1 == n2) throw InvalidArgument("sizes must differ");
  TransferContext ctx(w, x, opts);
  return theorem2_bound(h, ctx, n1, n2);
}

/// Single graphon convolution T_H X against the induced graph convolution. With step_input the
/// input is X_n itself (the step signal of the sampled x_n) and the A3 term is dropped.
inline BoundReport theorem4_bound(const SpectralFilter& f, TransferContext& ctx, std::size_t n, bool step_input) {
  if (f.family() != FilterFamily::BandedRamp) throw InvalidArgument("the convolution bound needs a banded filter");
  if (f.sup_abs() >= 1.0) throw InvalidArgument("the convolution bound needs |h| < 1");
  const auto& smp = ctx.sample(n);
  BoundReport r;
  r.theorem = Theorem::Convolution;
  r.n1 = n;
  const double c = f.c();
  const auto b = detail::band_or_empty([&] { return band_constants(ctx.graphon_spectrum(), smp.spectrum, c); }, c);
  r.constants = ctx.base_constants();
  r.constants.a2 = f.lipschitz();
  r.constants.n_c = b.n_c;
  r.constants.delta_c = b.delta_c;
  const GraphonSignal xin = step_input ? induce_signal(smp.signal) : ctx.signal();
  if (step_input) {
    r.constants.norm_x = l2_norm(xin);
    r.notes.push_back("step input X = X_n");
  }
  r.bound_value = theorem4_formula(r.constants, n, step_input);
  const auto y = graphon_convolve(f, ctx.graphon_spectrum(), xin);
  const auto yn = induce_signal(graph_convolve_spectral(f, smp.spectrum, smp.signal).col(0));
  r.empirical_error = l2_distance(y, yn);
  detail::finish(r, ctx.notes(), b);
  return r;
}

// ---------------------------------------------------------------------------
// Rate fits and sweeps
// ---------------------------------------------------------------------------

struct RateFit {
  std::vector<std::size_t> sizes;
  std::vector<double> errors;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
  std::string note;
};

/// Least-squares fit of log(error) = intercept + slope log(n). Skipped (valid = false) when fewer
/// than two points are given or any error is at or below `floor`.
inline RateFit fit_rate(const std::vector<std::size_t>& sizes, const std::vector<double>& errors,
                        double floor = 1e-9) {
  if (sizes.size() != errors.size()) throw DimensionMismatch("rate fit: sizes and errors differ in length");
  RateFit fit;
  fit.sizes = sizes;
  fit.errors = errors;
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw InvalidArgument("rate fit: sizes must increase strictly");
  if (sizes.size() < 2) {
    fit.note = "fewer than two sizes: no fit";
    return fit;
  }
  for (double e : errors)
    if (!(e > floor)) {
      fit.note = "errors at numerical zero: no fit";
      return fit;
    }
  const auto m = static_cast<Eigen::Index>(sizes.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::log(static_cast<double>(sizes[static_cast<std::size_t>(i)]));
    y(i) = std::log(errors[static_cast<std::size_t>(i)]);
  }
  const Eigen::Vector2d beta = a.colPivHouseholderQr().solve(y);
  fit.intercept = beta(0);
  fit.slope = beta(1);
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - a * beta).squaredNorm();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.valid = true;
  return fit;
}

struct SweepResult {
  std::vector<BoundReport> reports;  // sorted by n1
  RateFit fit;
};

/// theorem2_bound(n, reference_n) for every n, or (n, 2n) pairs when reference_n == 0,
/// followed by a log-log fit of the empirical errors against n.
inline SweepResult transfer_sweep(const GnnParams& h, TransferContext& ctx, std::vector<std::size_t> sizes,
                                  std::size_t reference_n) {
  if (sizes.empty()) throw InvalidArgument("transfer sweep needs at least one size");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (auto n : sizes)
    if (n < 2) throw InvalidArgument("transfer sweep sizes must be at least 2");
  std::vector<std::size_t> all = sizes;
  for (auto n : sizes) all.push_back(reference_n ? reference_n : 2 * n);
  ctx.prepare(all);
  SweepResult out;
  std::vector<double> errs;
  std::vector<std::size_t> used;
  for (auto n : sizes) {
    const std::size_t partner = reference_n ? reference_n : 2 * n;
    if (partner == n) continue;
    out.reports.push_back(theorem2_bound(h, ctx, n, partner));
    used.push_back(n);
    errs.push_back(out.reports.back().empirical_error);
  }
  out.fit = fit_rate(used, errs);
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_bounds_csv_header(std::ostream& os) {
  os << "n1,n2,empirical_error,bound_value,n_c,delta_c,A1,A2,A3,satisfied,theorem,relative_error\n";
}

inline void write_bounds_csv_row(std::ostream& os, const BoundReport& r) {
  os << std::setprecision(17) << r.n1 << ',';
  if (r.n2) os << r.n2;
  os << ',' << r.empirical_error << ',' << r.bound_value << ',' << r.constants.n_c << ',' << r.constants.delta_c
     << ',' << r.constants.a1 << ',' << r.constants.a2 << ',' << r.constants.a3 << ','
     << (r.satisfied ? "true" : "false") << ',' << to_string(r.theorem) << ',' << r.relative_error() << '\n';
}

}  // namespace wnn
