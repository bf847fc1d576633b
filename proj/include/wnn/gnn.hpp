#pragma once

// Layered GNN map on graphs and WNN map on graphons sharing one parameter set H.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wnn/error.hpp"
#include "wnn/filters.hpp"
#include "wnn/graphon.hpp"
#include "wnn/spectral.hpp"

namespace wnn {

enum class Activation { ReLU, Tanh, Identity };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "?";
}

inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  throw InvalidArgument("unknown activation '" + s + "'");
}

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::ReLU: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Identity: return x;
  }
  return x;
}

/// rho'(x); ReLU uses 0 at the origin.
inline double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

template <class Derived>
void activate_inplace(Activation a, Eigen::MatrixBase<Derived>& x) {
  if (a == Activation::Identity) return;
  x = x.unaryExpr([a](double v) { return activate(a, v); });
}

using Filter = std::variant<FilterTaps, SpectralFilter>;

inline SpectralFilter as_spectral(const Filter& f) {
  if (const auto* t = std::get_if<FilterTaps>(&f)) return SpectralFilter::polynomial(*t);
  return std::get<SpectralFilter>(f);
}

/// Graph features: one n x B matrix per feature (B signals processed together).
using GraphFeatures = std::vector<Eigen::MatrixXd>;
using GraphonFeatures = std::vector<GraphonSignal>;

/// H = {h_l^{fg}}: L layers, layer l holding F_l x F_{l-1} filters stored row-major (f * F_{l-1} + g).
/// Immutable; copies share the same storage.
class GnnParams {
 public:
  GnnParams(std::vector<std::size_t> widths, std::vector<Activation> activations,
            std::vector<std::vector<Filter>> layers) {
    if (widths.size() < 2) throw InvalidArgument("a GNN needs at least one layer");
    if (layers.size() + 1 != widths.size()) throw DimensionMismatch("layer count does not match widths");
    if (activations.size() != layers.size()) throw DimensionMismatch("one activation per layer required");
    for (std::size_t w : widths)
      if (w < 1) throw InvalidArgument("feature widths must be positive");
    for (std::size_t l = 0; l < layers.size(); ++l)
      if (layers[l].size() != widths[l] * widths[l + 1])
        throw DimensionMismatch("layer " + std::to_string(l + 1) + " has the wrong number of filters");
    auto d = std::make_shared<Data>();
    d->widths = std::move(widths);
    d->activations = std::move(activations);
    d->layers = std::move(layers);
    d_ = std::move(d);
  }

  GnnParams(std::vector<std::size_t> widths, Activation activation, std::vector<std::vector<Filter>> layers)
      : GnnParams(widths, std::vector<Activation>(widths.size() - 1, activation), std::move(layers)) {}

  std::size_t depth() const { return d_->layers.size(); }
  const std::vector<std::size_t>& widths() const { return d_->widths; }
  std::size_t in_width(std::size_t l) const { return d_->widths[l]; }
  std::size_t out_width(std::size_t l) const { return d_->widths[l + 1]; }
  Activation activation(std::size_t l) const { return d_->activations[l]; }
  const std::vector<Activation>& activations() const { return d_->activations; }

  /// Filter h_{l+1}^{fg} (layers are 0-based here).
  const Filter& filter(std::size_t l, std::size_t f, std::size_t g) const {
    return d_->layers[l][f * in_width(l) + g];
  }
  const std::vector<Filter>& layer(std::size_t l) const { return d_->layers[l]; }

  bool shares_storage_with(const GnnParams& o) const { return d_ == o.d_; }

  bool all_polynomial() const {
    for (const auto& layer : d_->layers)
      for (const auto& f : layer)
        if (!std::holds_alternative<FilterTaps>(f)) return false;
    return true;
  }

  /// max over filters of the certified Lipschitz constant.
  double a2() const {
    double m = 0.0;
    for (const auto& layer : d_->layers)
      for (const auto& f : layer) m = std::max(m, as_spectral(f).lipschitz());
    return m;
  }

  double max_sup_abs() const {
    double m = 0.0;
    for (const auto& layer : d_->layers)
      for (const auto& f : layer) m = std::max(m, as_spectral(f).sup_abs());
    return m;
  }

  /// Number of taps across all polynomial filters.
  std::size_t tap_count() const {
    std::size_t n = 0;
    for (const auto& layer : d_->layers)
      for (const auto& f : layer) n += std::get<FilterTaps>(f).size();
    return n;
  }

  /// All taps in (l, f, g, k) order. Polynomial parameter sets only.
  Eigen::VectorXd flat_taps() const {
    if (!all_polynomial()) throw InvalidArgument("flat_taps needs polynomial filters");
    Eigen::VectorXd out(static_cast<Eigen::Index>(tap_count()));
    Eigen::Index i = 0;
    for (const auto& layer : d_->layers)
      for (const auto& f : layer)
        for (double t : std::get<FilterTaps>(f).taps()) out(i++) = t;
    return out;
  }

  /// New parameter set with the same shape and the given taps.
  GnnParams with_taps(const Eigen::VectorXd& flat) const {
    if (static_cast<std::size_t>(flat.size()) != tap_count()) throw DimensionMismatch("tap vector has wrong length");
    auto layers = d_->layers;
    Eigen::Index i = 0;
    for (auto& layer : layers)
      for (auto& f : layer) {
        std::vector<double> t(std::get<FilterTaps>(f).size());
        for (double& v : t) v = flat(i++);
        f = FilterTaps(std::move(t));
      }
    return GnnParams(d_->widths, d_->activations, std::move(layers));
  }

  /// Band c shared by every filter if H satisfies the theorem architecture: F_0 = F_L = 1, equal
  /// hidden widths, banded-ramp filters with sup |h| <= 1 - 1e-9 and one common c > 0.
  /// Throws otherwise.
  double theorem_band() const {
    const auto& w = d_->widths;
    if (w.front() != 1 || w.back() != 1) throw InvalidArgument("theorem mode needs F_0 = F_L = 1");
    for (std::size_t l = 1; l + 1 < w.size(); ++l)
      if (w[l] != w[1]) throw InvalidArgument("theorem mode needs equal hidden widths");
    double c = -1.0;
    for (const auto& layer : d_->layers)
      for (const auto& f : layer) {
        const auto* s = std::get_if<SpectralFilter>(&f);
        if (!s || s->family() != FilterFamily::BandedRamp) throw InvalidArgument("theorem mode needs banded filters");
        if (s->sup_abs() > 1.0 - 1e-9) throw InvalidArgument("theorem mode needs sup |h| <= 1 - 1e-9");
        if (c < 0.0) c = s->c();
        if (s->c() != c) throw InvalidArgument("theorem mode needs one common band c");
      }
    return c;
  }

  /// Hidden width F of the theorem architecture (1 for a single layer).
  std::size_t hidden_width() const { return depth() > 1 ? d_->widths[1] : 1; }

 private:
  struct Data {
    std::vector<std::size_t> widths;
    std::vector<Activation> activations;
    std::vector<std::vector<Filter>> layers;
  };
  std::shared_ptr<const Data> d_;
};

/// Theorem-architecture parameters with random banded ramps: plateau in [-0.5, 0.5],
/// slope in [-max_slope, max_slope], rescaled so that sup |h| <= 1 - 1e-9.
inline GnnParams theorem_mode_params(std::size_t layers, std::size_t width, double c, std::mt19937_64& rng,
                                     Activation activation = Activation::ReLU, double max_slope = 1.0) {
  if (layers < 1) throw InvalidArgument("theorem mode needs at least one layer");
  std::vector<std::size_t> widths(layers + 1, width);
  widths.front() = widths.back() = 1;
  std::uniform_real_distribution<double> plateau(-0.5, 0.5), slope(-max_slope, max_slope);
  constexpr double kCap = 1.0 - 1e-9;
  std::vector<std::vector<Filter>> ls;
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<Filter> layer;
    for (std::size_t k = 0; k < widths[l] * widths[l + 1]; ++k) {
      auto f = SpectralFilter::banded_ramp(c, plateau(rng), slope(rng), false);
      if (f.sup_abs() > kCap) f = f.scaled(kCap / f.sup_abs());
      layer.emplace_back(std::move(f));
    }
    ls.push_back(std::move(layer));
  }
  return GnnParams(std::move(widths), activation, std::move(ls));
}

/// Polynomial parameters with taps uniform in +-1/(K sqrt(F_{l-1})).
inline GnnParams random_polynomial_params(const std::vector<std::size_t>& widths, const std::vector<std::size_t>& taps,
                                          const std::vector<Activation>& activations, std::mt19937_64& rng) {
  if (taps.size() + 1 != widths.size()) throw DimensionMismatch("one tap count per layer required");
  std::vector<std::vector<Filter>> ls;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const double a = 1.0 / (static_cast<double>(taps[l]) * std::sqrt(static_cast<double>(widths[l])));
    std::uniform_real_distribution<double> u(-a, a);
    std::vector<Filter> layer;
    for (std::size_t k = 0; k < widths[l] * widths[l + 1]; ++k) {
      std::vector<double> h(taps[l]);
      for (double& v : h) v = u(rng);
      layer.emplace_back(FilterTaps(std::move(h)));
    }
    ls.push_back(std::move(layer));
  }
  return GnnParams(widths, activations, std::move(ls));
}

// ---------------------------------------------------------------------------
// GNN forward pass
// ---------------------------------------------------------------------------

/// Intermediate values of a polynomial forward pass, kept for the backward pass.
struct ForwardTrace {
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> shifts;  // [l][g][k] = S^k x_{l}^g
  std::vector<GraphFeatures> pre;                                // [l][f] before the activation
  GraphFeatures output;
};

namespace detail {

inline std::size_t max_taps(const GnnParams& h, std::size_t l) {
  std::size_t k = 1;
  for (const auto& f : h.layer(l))
    if (const auto* t = std::get_if<FilterTaps>(&f)) k = std::max(k, t->size());
  return k;
}

inline bool layer_has_spectral(const GnnParams& h, std::size_t l) {
  for (const auto& f : h.layer(l))
    if (std::holds_alternative<SpectralFilter>(f)) return true;
  return false;
}

inline void check_input(const GnnParams& h, Eigen::Index n, const GraphFeatures& x) {
  if (x.size() != h.in_width(0)) throw DimensionMismatch("input has the wrong number of features");
  for (const auto& m : x)
    if (m.rows() != n || m.cols() != x.front().cols()) throw DimensionMismatch("input feature shapes differ");
}

template <bool Trace>
GraphFeatures forward(const GnnParams& h, const ShiftOperator& s, const GraphFeatures& x,
                      const SpectralDecomposition* spec, ForwardTrace* trace) {
  check_input(h, s.size(), x);
  std::optional<SpectralDecomposition> own;
  GraphFeatures cur = x;
  for (std::size_t l = 0; l < h.depth(); ++l) {
    const std::size_t fin = h.in_width(l), fout = h.out_width(l);
    const std::size_t K = max_taps(h, l);
    std::vector<std::vector<Eigen::MatrixXd>> shifts(fin);
    for (std::size_t g = 0; g < fin; ++g) {
      shifts[g].reserve(K);
      shifts[g].push_back(cur[g]);
      for (std::size_t k = 1; k < K; ++k) shifts[g].push_back(s.apply(shifts[g][k - 1]));
    }
    std::vector<Eigen::MatrixXd> coef;  // V^T x^g, only when a spectral filter is present
    Eigen::VectorXd lam;
    if (layer_has_spectral(h, l)) {
      if (!spec) {
        own = decompose_graph(s);
        spec = &*own;
      }
      lam = spec->eigenvalues();
      for (std::size_t g = 0; g < fin; ++g) coef.push_back(spec->vectors().transpose() * cur[g]);
    }
    GraphFeatures next(fout);
    for (std::size_t f = 0; f < fout; ++f) {
      Eigen::MatrixXd z = Eigen::MatrixXd::Zero(cur[0].rows(), cur[0].cols());
      Eigen::MatrixXd zs;
      for (std::size_t g = 0; g < fin; ++g) {
        const Filter& filt = h.filter(l, f, g);
        if (const auto* t = std::get_if<FilterTaps>(&filt)) {
          for (std::size_t k = 0; k < t->size(); ++k) z += (*t)[k] * shifts[g][k];
        } else {
          const auto& sf = std::get<SpectralFilter>(filt);
          Eigen::VectorXd resp = lam.unaryExpr([&](double v) { return sf(v); });
          if (zs.size() == 0) zs = Eigen::MatrixXd::Zero(coef[g].rows(), coef[g].cols());
          zs += resp.asDiagonal() * coef[g];
        }
      }
      if (zs.size() != 0) z += spec->vectors() * zs;
      if constexpr (Trace) {
        if (trace->pre.size() <= l) trace->pre.resize(l + 1);
        trace->pre[l].push_back(z);
      }
      activate_inplace(h.activation(l), z);
      next[f] = std::move(z);
    }
    if constexpr (Trace) trace->shifts.push_back(std::move(shifts));
    cur = std::move(next);
  }
  if constexpr (Trace) trace->output = cur;
  return cur;
}

}  // namespace detail

/// Phi(H; S; x): L layers of summed convolutions followed by the pointwise activation.
/// Spectral filters are applied through the eigendecomposition of S (computed unless `spec` is given).
inline GraphFeatures gnn_forward(const GnnParams& h, const ShiftOperator& s, const GraphFeatures& x,
                                 const SpectralDecomposition* spec = nullptr) {
  return detail::forward<false>(h, s, x, spec, nullptr);
}

/// Single-feature convenience overload.
inline GraphSignal gnn_forward(const GnnParams& h, const ShiftOperator& s, const GraphSignal& x,
                               const SpectralDecomposition* spec = nullptr) {
  const auto y = gnn_forward(h, s, GraphFeatures{x}, spec);
  if (y.size() != 1) throw DimensionMismatch("single-signal forward needs F_L = 1");
  return y[0].col(0);
}

/// Forward pass keeping every shifted input and pre-activation. Polynomial filters only.
inline ForwardTrace gnn_forward_trace(const GnnParams& h, const ShiftOperator& s, const GraphFeatures& x) {
  if (!h.all_polynomial()) throw InvalidArgument("traced forward passes need polynomial filters");
  ForwardTrace t;
  detail::forward<true>(h, s, x, nullptr, &t);
  return t;
}

// ---------------------------------------------------------------------------
// WNN forward pass
// ---------------------------------------------------------------------------

namespace detail {

// Layer maps of a WNN on an analytic representation. Layer l evaluates to
// rho(A_l X_{l-1}(u) + B_l phi(u)), with A_l = [h^{fg}(0)] and B_l the spectral corrections.
struct WnnStack {
  std::shared_ptr<const SpectralDecomposition> spec;
  GraphonFeatures input;
  std::vector<Eigen::MatrixXd> a, b;
  std::vector<Activation> act;

  Eigen::VectorXd input_at(double u) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(input.size()));
    for (std::size_t g = 0; g < input.size(); ++g) v(static_cast<Eigen::Index>(g)) = input[g](u);
    return v;
  }

  Eigen::VectorXd eval(double u, std::size_t layers) const {
    Eigen::VectorXd x = input_at(u);
    if (layers == 0) return x;
    const Eigen::VectorXd phi = eigenfunctions_at(*spec, u);
    for (std::size_t l = 0; l < layers; ++l) {
      Eigen::VectorXd z = a[l] * x + b[l] * phi;
      activate_inplace(act[l], z);
      x = std::move(z);
    }
    return x;
  }
};

}  // namespace detail

/// Phi(H; W; X) with graphon convolutions taken through the spectrum of W.
/// Exact (pure linear algebra) for a grid spectrum and step inputs on the same grid; otherwise
/// inner products <phi_i, X_{l-1}^g> are computed by adaptive vector quadrature layer by layer.
inline GraphonFeatures wnn_forward(const GnnParams& h, const SpectralDecomposition& spec, const GraphonFeatures& x) {
  if (x.size() != h.in_width(0)) throw DimensionMismatch("input has the wrong number of features");
  const auto r = static_cast<Eigen::Index>(spec.rank());
  const Eigen::VectorXd& lam = spec.eigenvalues();

  bool exact = spec.on_grid();
  for (const auto& s : x) exact = exact && s.is_step() && s.size() == spec.grid();

  if (exact) {
    const auto& v = spec.vectors();
    std::vector<Eigen::VectorXd> cur;
    for (const auto& s : x) cur.push_back(s.values());
    for (std::size_t l = 0; l < h.depth(); ++l) {
      std::vector<Eigen::VectorXd> coef;
      for (const auto& c : cur) coef.push_back(v.transpose() * c);
      std::vector<Eigen::VectorXd> next;
      for (std::size_t f = 0; f < h.out_width(l); ++f) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(r);
        for (std::size_t g = 0; g < h.in_width(l); ++g) {
          const auto sf = as_spectral(h.filter(l, f, g));
          acc += lam.unaryExpr([&](double t) { return sf(t); }).cwiseProduct(coef[g]);
        }
        Eigen::VectorXd z = v * acc;
        activate_inplace(h.activation(l), z);
        next.push_back(std::move(z));
      }
      cur = std::move(next);
    }
    GraphonFeatures out;
    for (auto& c : cur) out.push_back(GraphonSignal::step(std::move(c)));
    return out;
  }

  auto stack = std::make_shared<detail::WnnStack>();
  stack->spec = std::make_shared<const SpectralDecomposition>(spec);
  stack->input = x;
  std::vector<std::size_t> grids = detail::spectrum_grids(spec);
  for (const auto& s : x) grids.insert(grids.end(), s.grids().begin(), s.grids().end());
  if (grids.empty()) grids.push_back(quad::kDefaultCells);
  const auto breaks = quad::merged_breakpoints(grids);

  for (std::size_t l = 0; l < h.depth(); ++l) {
    const std::size_t fin = h.in_width(l), fout = h.out_width(l);
    // C(i, g) = <phi_i, X_l^g>
    const Eigen::VectorXd flat = quad::integrate_vector(
        [&](double u) {
          const Eigen::VectorXd xv = stack->eval(u, l);
          const Eigen::VectorXd phi = detail::eigenfunctions_at(*stack->spec, u);
          Eigen::MatrixXd outer = phi * xv.transpose();
          return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(outer.data(), outer.size()));
        },
        breaks);
    const Eigen::Map<const Eigen::MatrixXd> c(flat.data(), r, static_cast<Eigen::Index>(fin));
    Eigen::MatrixXd a(fout, fin), b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fout), r);
    for (std::size_t f = 0; f < fout; ++f)
      for (std::size_t g = 0; g < fin; ++g) {
        const auto sf = as_spectral(h.filter(l, f, g));
        const double h0 = sf(0.0);
        a(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(g)) = h0;
        for (Eigen::Index i = 0; i < r; ++i)
          b(static_cast<Eigen::Index>(f), i) += (sf(lam(i)) - h0) * c(i, static_cast<Eigen::Index>(g));
      }
    stack->a.push_back(std::move(a));
    stack->b.push_back(std::move(b));
    stack->act.push_back(h.activation(l));
  }

  GraphonFeatures out;
  const std::size_t depth = h.depth();
  for (std::size_t f = 0; f < h.out_width(depth - 1); ++f)
    out.push_back(GraphonSignal::analytic(
        [stack, depth, f](double u) { return stack->eval(u, depth)(static_cast<Eigen::Index>(f)); }, std::nullopt,
        grids));
  return out;
}

// ---------------------------------------------------------------------------
// Instantiation and induction
// ---------------------------------------------------------------------------

/// A GNN instantiated from a WNN: the sampled graph (adjacency-over-n), the sampled input
/// features and the shared parameter set.
struct GnnInstance {
  ShiftOperator shift;
  GraphFeatures input;
  GnnParams params;
};

inline GnnInstance instantiate_gnn(const GnnParams& h, const Graphon& w, const GraphonFeatures& x, std::size_t n) {
  GnnInstance inst{sample_graph(w, n).renormalized(Normalization::AdjacencyOverN), {}, h};
  for (const auto& s : x) inst.input.push_back(sample_signal(s, n));
  return inst;
}

inline GnnInstance instantiate_gnn(const GnnParams& h, const Graphon& w, const GraphonSignal& x, std::size_t n) {
  return instantiate_gnn(h, w, GraphonFeatures{x}, n);
}

/// gnn_forward lifted to step signals. Single-signal inputs (B = 1) only.
inline GraphonFeatures induced_output(const GnnParams& h, const ShiftOperator& s, const GraphFeatures& x,
                                      const SpectralDecomposition* spec = nullptr) {
  for (const auto& m : x)
    if (m.cols() != 1) throw DimensionMismatch("induced_output takes one signal per feature");
  GraphonFeatures out;
  for (const auto& y : gnn_forward(h, s, x, spec)) out.push_back(induce_signal(y.col(0)));
  return out;
}

// ---------------------------------------------------------------------------
// Text format
//
//   wnn-params 1
//   layers L
//   widths F_0 ... F_L
//   activations a_1 ... a_L
//   then one line per filter in (l, f, g) row-major order:
//   polynomial K h_0 ... h_{K-1}
//   spectral-polynomial K h_0 ... h_{K-1}
//   banded-ramp c plateau slope bound
//   table m k_1 v_1 ... k_m v_m
// ---------------------------------------------------------------------------

inline void write_params(std::ostream& os, const GnnParams& h) {
  os << "wnn-params 1\nlayers " << h.depth() << "\nwidths";
  for (auto w : h.widths()) os << ' ' << w;
  os << "\nactivations";
  for (auto a : h.activations()) os << ' ' << to_string(a);
  os << '\n' << std::setprecision(17);
  for (std::size_t l = 0; l < h.depth(); ++l)
    for (const auto& f : h.layer(l)) {
      if (const auto* t = std::get_if<FilterTaps>(&f)) {
        os << "polynomial " << t->size();
        for (double v : t->taps()) os << ' ' << v;
      } else {
        const auto& s = std::get<SpectralFilter>(f);
        os << (s.family() == FilterFamily::Polynomial ? "spectral-polynomial" : to_string(s.family()));
        if (s.family() == FilterFamily::BandedRamp) {
          os << ' ' << s.c() << ' ' << s.plateau() << ' ' << s.slope() << ' ' << s.bound();
        } else if (s.family() == FilterFamily::Table) {
          os << ' ' << s.knots().size();
          for (std::size_t k = 0; k < s.knots().size(); ++k) os << ' ' << s.knots()[k] << ' ' << s.values()[k];
        } else {
          os << ' ' << s.taps().size();
          for (double v : s.taps().taps()) os << ' ' << v;
        }
      }
      os << '\n';
    }
}

inline GnnParams read_params(std::istream& is) {
  auto expect = [&](const std::string& word) {
    std::string w;
    if (!(is >> w) || w != word) throw InvalidArgument("params format: expected '" + word + "'");
  };
  auto count = [&]() {
    long v;
    if (!(is >> v) || v < 0) throw InvalidArgument("params format: bad count");
    return static_cast<std::size_t>(v);
  };
  auto real = [&]() {
    double v;
    if (!(is >> v)) throw InvalidArgument("params format: bad number");
    return v;
  };
  expect("wnn-params");
  if (count() != 1) throw InvalidArgument("params format: unsupported version");
  expect("layers");
  const std::size_t L = count();
  if (L < 1) throw InvalidArgument("params format: no layers");
  expect("widths");
  std::vector<std::size_t> widths(L + 1);
  for (auto& w : widths) w = count();
  expect("activations");
  std::vector<Activation> acts(L);
  for (auto& a : acts) {
    std::string s;
    is >> s;
    a = parse_activation(s);
  }
  std::vector<std::vector<Filter>> layers(L);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t k = 0; k < widths[l] * widths[l + 1]; ++k) {
      std::string fam;
      if (!(is >> fam)) throw InvalidArgument("params format: truncated filter list");
      if (fam == "polynomial") {
        std::vector<double> t(count());
        for (double& v : t) v = real();
        layers[l].emplace_back(FilterTaps(std::move(t)));
      } else if (fam == "spectral-polynomial") {
        std::vector<double> t(count());
        for (double& v : t) v = real();
        layers[l].emplace_back(SpectralFilter::polynomial(FilterTaps(std::move(t))));
      } else if (fam == "banded-ramp") {
        const double c = real(), p = real(), s = real(), b = real();
        layers[l].emplace_back(SpectralFilter::banded_ramp(c, p, s, false, b));
      } else if (fam == "table") {
        const std::size_t m = count();
        std::vector<double> kn(m), vals(m);
        for (std::size_t i = 0; i < m; ++i) {
          kn[i] = real();
          vals[i] = real();
        }
        layers[l].emplace_back(SpectralFilter::table(std::move(kn), std::move(vals)));
      } else {
        throw InvalidArgument("params format: unknown filter family '" + fam + "'");
      }
    }
  return GnnParams(std::move(widths), std::move(acts), std::move(layers));
}

}  // namespace wnn
