#pragma once

// Experiment drivers behind the command-line subcommands. Each driver reads a Config, writes
// its CSV/SVG files into the output directory and returns 0 (success) or 1 (a check failed).
// Configuration problems throw ConfigError.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wnn/config.hpp"
#include "wnn/error.hpp"
#include "wnn/families.hpp"
#include "wnn/gnn.hpp"
#include "wnn/graphon.hpp"
#include "wnn/spectral.hpp"
#include "wnn/svg.hpp"
#include "wnn/training.hpp"
#include "wnn/transferability.hpp"

namespace wnn::experiments {

struct RunOptions {
  std::filesystem::path out = "wnn-out";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

// ---------------------------------------------------------------------------
// Families by name
// ---------------------------------------------------------------------------

inline const std::set<std::string>& graphon_keys() {
  static const std::set<std::string> k{"graphon.family", "graphon.p",     "graphon.q",    "graphon.width",
                                       "graphon.boundaries", "graphon.a", "graphon.b",   "graphon.beta",
                                       "graphon.c",      "graphon.communities"};
  return k;
}

inline const std::set<std::string>& signal_keys() {
  static const std::set<std::string> k{"signal.family", "signal.f", "signal.c"};
  return k;
}

/// Graphon named `name` with parameters read from `graphon.*` keys.
inline Graphon make_graphon(const std::string& name, const Config& cfg) {
  if (name == "product") return families::product();
  if (name == "min") return families::min_kernel();
  if (name == "cosine") return families::cosine(cfg.get_double("graphon.a", 0.5), cfg.get_double("graphon.b", 0.25));
  if (name == "gaussian") return families::gaussian(cfg.get_double("graphon.beta", 1.0));
  if (name == "constant") return families::constant(cfg.get_double("graphon.c", 0.5));
  if (name == "smooth-sbm") {
    if (!cfg.has("graphon.p") && !cfg.has("graphon.q") && !cfg.has("graphon.width") && !cfg.has("graphon.boundaries"))
      return families::smooth_sbm();
    return families::smooth_sbm(cfg.get_double("graphon.p", 0.8), cfg.get_double("graphon.q", 0.2),
                                cfg.get_doubles("graphon.boundaries", {0.1093, 0.2287, 0.3141, 0.4428, 0.5772, 0.6931, 0.8462}),
                                cfg.get_double("graphon.width", 1e-5));
  }
  if (name == "sbm")
    return families::sbm(cfg.get_double("graphon.p", 0.8), cfg.get_double("graphon.q", 0.2),
                         static_cast<std::size_t>(cfg.get_uint("graphon.communities", 2)));
  throw ConfigError("unknown graphon family '" + name + "'");
}

inline Graphon make_graphon(const Config& cfg, const std::string& fallback) {
  return make_graphon(cfg.get_string("graphon.family", fallback), cfg);
}

inline GraphonSignal make_signal(const std::string& name, const Config& cfg) {
  if (name == "linear") return families::linear();
  if (name == "constant") return families::constant_signal(cfg.get_double("signal.c", 1.0));
  if (name == "sine") return families::sine(cfg.get_double("signal.f", 1.0));
  if (name == "cosine") return families::cosine_signal(cfg.get_double("signal.f", 1.0));
  throw ConfigError("unknown signal family '" + name + "'");
}

inline std::vector<std::size_t> powers_of_two(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (std::size_t n = lo; n <= hi; n *= 2) v.push_back(n);
  return v;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  return os;
}

inline void write_svg(const std::filesystem::path& dir, const std::string& name, const svg::Chart& chart) {
  auto os = open_output(dir, name);
  svg::write_chart(os, chart);
}

inline Activation activation_from(const Config& cfg, const std::string& key, Activation fallback) {
  try {
    return cfg.has(key) ? parse_activation(cfg.get_string(key, "")) : fallback;
  } catch (const InvalidArgument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Propositions
// ---------------------------------------------------------------------------

struct PropositionRow {
  std::string proposition;
  std::string family;
  std::string check;
  std::size_t n = 0;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline constexpr double kPropositionSlack = 1e-6;

/// ||W - W_n|| <= sqrt(A1 / n) at each size, plus a grid check that A1 is a valid Lipschitz
/// constant for W (the hypothesis of the bound).
inline std::vector<PropositionRow> proposition1(const Graphon& w, const std::vector<std::size_t>& sizes,
                                                std::size_t lipschitz_grid = 257) {
  if (!w.lipschitz()) throw NotLipschitz("graphon '" + w.name() + "' has no Lipschitz constant");
  const double a1 = *w.lipschitz();
  std::vector<PropositionRow> rows;
  const double est = estimate_lipschitz(w, lipschitz_grid);
  rows.push_back({"1", w.name(), "lipschitz", lipschitz_grid, est, a1, est <= a1 * (1.0 + 1e-9) + 1e-12});
  for (auto n : sizes) {
    const double d = graphon_l2_distance(w, induce_graphon(sample_graph(w, n)));
    const double b = std::sqrt(a1 / static_cast<double>(n));
    rows.push_back({"1", w.name(), "l2", n, d, b, d <= b + kPropositionSlack});
  }
  return rows;
}

/// ||X - X_n|| <= A3 / sqrt(3n), with the same hypothesis check on A3.
inline std::vector<PropositionRow> proposition3(const std::string& name, const GraphonSignal& x,
                                                const std::vector<std::size_t>& sizes, std::size_t lipschitz_grid = 257) {
  if (!x.lipschitz()) throw NotLipschitz("signal '" + name + "' has no Lipschitz constant");
  const double a3 = *x.lipschitz();
  std::vector<PropositionRow> rows;
  const double est = estimate_lipschitz(x, lipschitz_grid * 16);
  rows.push_back({"3", name, "lipschitz", lipschitz_grid * 16, est, a3, est <= a3 * (1.0 + 1e-9) + 1e-12});
  for (auto n : sizes) {
    const double d = l2_distance(x, induce_signal(sample_signal(x, n)));
    const double b = a3 / std::sqrt(3.0 * static_cast<double>(n));
    rows.push_back({"3", name, "l2", n, d, b, d <= b + kPropositionSlack});
  }
  return rows;
}

/// Random symmetric step graphon with n cells and entries uniform in [0,1].
inline Graphon random_step_graphon(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
  return Graphon::step(std::move(m));
}

/// Eigenvalue perturbation over `pairs` random step-graphon pairs with sizes in [1, max_n].
/// Half the pairs are independent draws; the other half perturb the first graphon slightly.
inline std::vector<PropositionRow> proposition4(std::size_t pairs, std::size_t max_n, std::uint64_t seed) {
  auto rng = stream_rng(seed, 0, Purpose::Probe, 4);
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::uniform_real_distribution<double> eps(0.0, 0.05);
  std::vector<PropositionRow> rows;
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t n1 = size(rng);
    const Graphon w1 = random_step_graphon(n1, rng);
    Graphon w2 = w1;
    if (p % 2 == 0) {
      w2 = random_step_graphon(size(rng), rng);
    } else {
      Eigen::MatrixXd m = *w1.step_matrix();
      const double e = eps(rng);
      std::uniform_real_distribution<double> d(-e, e);
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = std::clamp(m(i, j) + d(rng), 0.0, 1.0);
      w2 = Graphon::step(std::move(m));
    }
    const int k = static_cast<int>(std::max(w1.step_matrix()->rows(), w2.step_matrix()->rows()));
    const auto r = eigenvalue_perturbation_check(w1, w2, k);
    rows.push_back({"4", "random-step", "weyl", static_cast<std::size_t>(k), r.max_eigenvalue_difference,
                    r.l2_distance, r.pass});
  }
  return rows;
}

inline void write_propositions_csv_header(std::ostream& os) {
  os << "proposition,family,check,n,measured,bound,pass\n";
}

inline void write_propositions_csv_row(std::ostream& os, const PropositionRow& r) {
  os << std::setprecision(17) << r.proposition << ',' << r.family << ',' << r.check << ',' << r.n << ','
     << r.measured << ',' << r.bound << ',' << (r.pass ? "true" : "false") << '\n';
}

inline int cmd_verify_propositions(const Config& cfg, const RunOptions& run, std::ostream& log) {
  cfg.check_known({"propositions"},
                  {"propositions.graphons", "propositions.signals", "propositions.sizes", "propositions.a1_scale",
                   "propositions.a3_scale", "propositions.pairs", "propositions.max_n", "propositions.lipschitz_grid"});
  const auto graphons = cfg.get_list("propositions.graphons", {"product", "min", "cosine", "gaussian"});
  const auto signals = cfg.get_list("propositions.signals", {"linear", "sine", "cosine"});
  const auto sizes = cfg.get_sizes("propositions.sizes", powers_of_two(4, 512));
  const double a1_scale = cfg.get_double("propositions.a1_scale", 1.0);
  const double a3_scale = cfg.get_double("propositions.a3_scale", 1.0);
  const auto pairs = static_cast<std::size_t>(cfg.get_uint("propositions.pairs", 200));
  const auto max_n = static_cast<std::size_t>(cfg.get_uint("propositions.max_n", 64));
  const auto grid = static_cast<std::size_t>(cfg.get_uint("propositions.lipschitz_grid", 257));
  if (max_n < 1) throw ConfigError("propositions.max_n must be positive");
  if (grid < 2) throw ConfigError("propositions.lipschitz_grid must be at least 2");

  std::vector<PropositionRow> rows;
  for (const auto& name : graphons) {
    Graphon w = make_graphon(name, cfg);
    if (!w.lipschitz()) throw ConfigError("graphon '" + name + "' is not Lipschitz; proposition 1 needs A1");
    w = w.with_lipschitz(*w.lipschitz() * a1_scale);
    for (auto& r : proposition1(w, sizes, grid)) rows.push_back(std::move(r));
  }
  for (const auto& name : signals) {
    const GraphonSignal base = make_signal(name, cfg);
    const GraphonSignal x = GraphonSignal::analytic([base](double u) { return base(u); }, *base.lipschitz() * a3_scale);
    for (auto& r : proposition3(name, x, sizes, grid)) rows.push_back(std::move(r));
  }
  for (auto& r : proposition4(pairs, max_n, run.seed)) rows.push_back(std::move(r));

  auto os = detail::open_output(run.out, "propositions.csv");
  write_propositions_csv_header(os);
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (const auto& r : rows) {
    write_propositions_csv_row(os, r);
    auto& t = tally[r.proposition];
    ++t.first;
    if (r.pass) ++t.second;
  }
  bool ok = true;
  for (const auto& [p, t] : tally) {
    log << "proposition " << p << ": " << t.second << "/" << t.first << " checks pass\n";
    ok = ok && t.first == t.second;
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

inline int cmd_bounds(const Config& cfg, const RunOptions& run, std::ostream& log) {
  cfg.check_known({"bounds"}, {"bounds.layers", "bounds.width", "bounds.c", "bounds.activation", "bounds.max_slope",
                               "bounds.sizes", "bounds.reference", "bounds.truncation_m", "bounds.theorems"});
  cfg.check_known({"graphon"}, graphon_keys());
  cfg.check_known({"signal"}, signal_keys());
  const Graphon w = make_graphon(cfg, "cosine");
  const GraphonSignal x = make_signal(cfg.get_string("signal.family", "linear"), cfg);
  const auto layers = static_cast<std::size_t>(cfg.get_uint("bounds.layers", 2));
  const auto width = static_cast<std::size_t>(cfg.get_uint("bounds.width", 2));
  const double c = cfg.get_double("bounds.c", 0.1);
  const Activation act = detail::activation_from(cfg, "bounds.activation", Activation::Tanh);
  const double max_slope = cfg.get_double("bounds.max_slope", 1.0);
  auto sizes = cfg.get_sizes("bounds.sizes", powers_of_two(64, 1024));
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  const auto reference = static_cast<std::size_t>(cfg.get_uint("bounds.reference", 0));
  const auto theorems = cfg.get_list("bounds.theorems", {"t1", "t2", "t4"});
  BoundOptions opts;
  opts.truncation_m = static_cast<std::size_t>(cfg.get_uint("bounds.truncation_m", 4096));
  opts.jobs = run.jobs;
  if (layers < 1 || width < 1) throw ConfigError("bounds.layers and bounds.width must be positive");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("bounds.c must lie in (0, 1]");
  for (const auto& t : theorems)
    if (t != "t1" && t != "t2" && t != "t4") throw ConfigError("bounds.theorems: unknown theorem '" + t + "'");
  if (w.kind() == GraphonKind::StochasticBlockModel || !w.lipschitz())
    throw NotLipschitz("graphon '" + w.name() +
                       "' is not Lipschitz (the bounds need an A1-Lipschitz graphon); choose a smooth family");

  auto rng = stream_rng(run.seed, 0, Purpose::Init);
  const GnnParams h = theorem_mode_params(layers, width, c, rng, act, max_slope);
  TransferContext ctx(w, x, opts);
  auto want = [&](const char* t) { return std::find(theorems.begin(), theorems.end(), t) != theorems.end(); };

  std::vector<std::size_t> all = sizes;
  if (want("t2"))
    for (auto n : sizes) all.push_back(reference ? reference : 2 * n);
  ctx.prepare(all);

  std::vector<BoundReport> rows;
  std::vector<svg::Series> series;
  auto add_series = [&](const std::string& label, const std::vector<BoundReport>& rs) {
    svg::Series e{label + " error", {}, {}, {}, false}, b{label + " bound", {}, {}, {}, true};
    for (const auto& r : rs) {
      e.x.push_back(static_cast<double>(r.n1));
      e.y.push_back(r.empirical_error);
      b.x.push_back(static_cast<double>(r.n1));
      b.y.push_back(r.bound_value);
    }
    series.push_back(std::move(e));
    series.push_back(std::move(b));
  };
  auto report_fit = [&](const std::string& label, const RateFit& f) {
    if (f.valid)
      log << label << " rate: slope " << f.slope << ", r2 " << f.r2 << "\n";
    else
      log << label << " rate: " << f.note << "\n";
  };

  if (want("t1")) {
    std::vector<BoundReport> rs;
    std::vector<double> errs;
    for (auto n : sizes) {
      rs.push_back(theorem1_bound(h, ctx, n));
      errs.push_back(rs.back().empirical_error);
    }
    report_fit("t1", fit_rate(sizes, errs));
    add_series("t1", rs);
    rows.insert(rows.end(), rs.begin(), rs.end());
  }
  if (want("t2")) {
    const auto sw = transfer_sweep(h, ctx, sizes, reference);
    report_fit("t2", sw.fit);
    add_series("t2", sw.reports);
    rows.insert(rows.end(), sw.reports.begin(), sw.reports.end());
  }
  if (want("t4")) {
    const SpectralFilter f = as_spectral(h.filter(0, 0, 0));
    std::vector<BoundReport> rs;
    for (auto n : sizes) rs.push_back(theorem4_bound(f, ctx, n, false));
    add_series("t4", rs);
    rows.insert(rows.end(), rs.begin(), rs.end());
  }

  auto os = detail::open_output(run.out, "bounds.csv");
  write_bounds_csv_header(os);
  bool ok = true;
  for (const auto& r : rows) {
    write_bounds_csv_row(os, r);
    ok = ok && r.satisfied;
  }
  detail::write_svg(run.out, "bounds.svg",
                    {"Empirical error and bound vs n (" + w.name() + ")", "n", "L2 error", true, true, series});
  log << rows.size() << " bound rows, " << (ok ? "all satisfied" : "some violated") << "\n";
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Consensus
// ---------------------------------------------------------------------------

inline const std::set<std::string>& train_keys() {
  static const std::set<std::string> k{"train.lr",    "train.beta1", "train.beta2",        "train.eps",
                                       "train.epochs", "train.batch", "train.split_factor", "train.rrmse_selection",
                                       "train.n",     "train.N"};
  return k;
}

inline TrainConfig train_config(const Config& cfg, std::uint64_t seed) {
  TrainConfig t;
  t.lr = cfg.get_double("train.lr", t.lr);
  t.beta1 = cfg.get_double("train.beta1", t.beta1);
  t.beta2 = cfg.get_double("train.beta2", t.beta2);
  t.eps = cfg.get_double("train.eps", t.eps);
  t.epochs = static_cast<std::size_t>(cfg.get_uint("train.epochs", t.epochs));
  t.batch = static_cast<std::size_t>(cfg.get_uint("train.batch", t.batch));
  t.split_factor = cfg.get_double("train.split_factor", t.split_factor);
  t.rrmse_selection = cfg.get_bool("train.rrmse_selection", t.rrmse_selection);
  t.seed = seed;
  try {
    t.validate();
    scaled_split(t.split_factor);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  return t;
}

inline ConsensusArch base_arch(const Config& cfg) {
  ConsensusArch a;
  a.features = static_cast<std::size_t>(cfg.get_uint("consensus.F", 8));
  a.taps = static_cast<std::size_t>(cfg.get_uint("consensus.K", 4));
  a.layers = static_cast<std::size_t>(cfg.get_uint("consensus.L", 1));
  if (a.features < 1 || a.taps < 1 || a.layers < 1) throw ConfigError("consensus.F, K and L must be positive");
  return a;
}

struct SweepSummary {
  std::string sweep;
  std::size_t value = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

/// Mean and sample standard deviation of the relative difference per (swept value, n), skipping NaN.
inline std::vector<SweepSummary> summarize(const std::vector<ConsensusTrial>& trials, const std::string& sweep) {
  auto value_of = [&sweep](const ConsensusArch& a) {
    return sweep == "K" ? a.taps : sweep == "L" ? a.layers : a.features;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> groups;
  for (const auto& t : trials)
    if (std::isfinite(t.transfer.relative_difference))
      groups[{value_of(t.arch), t.n}].push_back(t.transfer.relative_difference);
  std::vector<SweepSummary> out;
  for (const auto& [key, v] : groups) {
    SweepSummary s{sweep, key.first, key.second, 0.0, 0.0, v.size()};
    for (double d : v) s.mean += d;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
      for (double d : v) s.stddev += (d - s.mean) * (d - s.mean);
      s.stddev = std::sqrt(s.stddev / static_cast<double>(v.size() - 1));
    }
    out.push_back(s);
  }
  return out;
}

inline int cmd_consensus(const Config& cfg, const RunOptions& run, std::ostream& log) {
  cfg.check_known({"consensus"}, {"consensus.F", "consensus.K", "consensus.L", "consensus.sweep", "consensus.values",
                                  "consensus.sizes", "consensus.N", "consensus.graph_realizations",
                                  "consensus.data_realizations"});
  cfg.check_known({"train"}, train_keys());
  const std::string sweep = cfg.get_string("consensus.sweep", "F");
  std::vector<std::size_t> fallback;
  if (sweep == "F") fallback = {4, 8, 16};
  else if (sweep == "K") fallback = {2, 4, 8};
  else if (sweep == "L") fallback = {1, 2, 3};
  else if (sweep != "none") throw ConfigError("consensus.sweep must be F, K, L or none");

  ConsensusSweepSpec spec;
  const ConsensusArch base = base_arch(cfg);
  if (sweep == "none") {
    spec.archs = {base};
  } else {
    for (auto v : cfg.get_sizes("consensus.values", fallback)) {
      ConsensusArch a = base;
      (sweep == "F" ? a.features : sweep == "K" ? a.taps : a.layers) = v;
      spec.archs.push_back(a);
    }
  }
  spec.sizes = cfg.get_sizes("consensus.sizes", {50, 250, 500});
  spec.big_n = static_cast<std::size_t>(cfg.get_uint("consensus.N", 1000));
  spec.graph_realizations = static_cast<std::size_t>(cfg.get_uint("consensus.graph_realizations", 3));
  spec.data_realizations = static_cast<std::size_t>(cfg.get_uint("consensus.data_realizations", 3));
  spec.cfg = train_config(cfg, run.seed);
  spec.jobs = run.jobs;
  if (spec.big_n < 2) throw ConfigError("consensus.N must be at least 2");
  for (auto n : spec.sizes)
    if (n < 2) throw ConfigError("consensus.sizes must be at least 2");
  if (spec.graph_realizations < 1 || spec.data_realizations < 1) throw ConfigError("realization counts must be positive");

  const auto trials = consensus_sweep(spec);
  {
    auto os = detail::open_output(run.out, "consensus.csv");
    write_consensus_csv_header(os);
    for (const auto& t : trials) write_consensus_csv_row(os, t);
  }
  const std::string key = sweep == "none" ? "F" : sweep;
  const auto summary = summarize(trials, key);
  {
    auto os = detail::open_output(run.out, "consensus_summary.csv");
    os << "sweep,value,n,mean_relative_difference,std_relative_difference,count\n" << std::setprecision(17);
    for (const auto& s : summary)
      os << s.sweep << ',' << s.value << ',' << s.n << ',' << s.mean << ',' << s.stddev << ',' << s.count << '\n';
  }
  std::map<std::size_t, svg::Series> by_value;
  for (const auto& s : summary) {
    auto& ser = by_value[s.value];
    ser.name = key + " = " + std::to_string(s.value);
    ser.x.push_back(static_cast<double>(s.n));
    ser.y.push_back(s.mean);
    ser.err.push_back(s.stddev);
    log << key << "=" << s.value << " n=" << s.n << " mean relative difference " << s.mean << " (std " << s.stddev
        << ")\n";
  }
  svg::Chart chart{"Relative rRMSE difference, G_n vs G_N (N = " + std::to_string(spec.big_n) + ")", "n",
                   "|rRMSE_N - rRMSE_n| / rRMSE_n", false, false, {}};
  for (auto& [v, s] : by_value) chart.series.push_back(std::move(s));
  detail::write_svg(run.out, "consensus.svg", chart);
  return 0;
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

inline int cmd_spectra(const Config& cfg, const RunOptions& run, std::ostream& log) {
  cfg.check_known({"spectra"}, {"spectra.sizes", "spectra.k", "spectra.truncation_m"});
  cfg.check_known({"graphon"}, graphon_keys());
  const Graphon w = make_graphon(cfg, "sbm");
  const auto sizes = cfg.get_sizes("spectra.sizes", powers_of_two(8, 512));
  const auto k = static_cast<int>(cfg.get_uint("spectra.k", 4));
  const auto m = static_cast<std::size_t>(cfg.get_uint("spectra.truncation_m", kDefaultTruncation));
  if (k < 1) throw ConfigError("spectra.k must be positive");
  if (m < 2) throw ConfigError("spectra.truncation_m must be at least 2");

  auto keep = [k](const SpectralDecomposition& d) {
    std::vector<std::pair<int, double>> out;
    for (std::size_t i = 0; i < d.rank(); ++i)
      if (std::abs(d.indices()[i]) <= k) out.emplace_back(d.indices()[i], d.eigenvalues()(static_cast<Eigen::Index>(i)));
    return out;
  };
  auto os = detail::open_output(run.out, "spectra.csv");
  write_spectrum_csv_header(os);
  os << std::setprecision(17);
  const auto wd = decompose_graphon(w, m);
  const std::size_t wn = wd.source() == SpectrumSource::Discretized ? m : 0;
  for (const auto& [i, v] : keep(wd)) os << i << ',' << v << ",graphon," << wn << '\n';
  std::map<int, svg::Series> lines;
  for (auto n : sizes) {
    const auto d = decompose_graph(sample_graph(w, n).renormalized(Normalization::AdjacencyOverN));
    for (const auto& [i, v] : keep(d)) {
      os << i << ',' << v << ",induced," << n << '\n';
      auto& s = lines[i];
      s.name = "lambda_" + std::to_string(i);
      s.x.push_back(static_cast<double>(n));
      s.y.push_back(v);
    }
  }
  if (const auto l1 = wd.eigenvalue(1)) log << "graphon lambda_1 = " << *l1 << "\n";
  svg::Chart chart{"Induced eigenvalues vs n (" + w.name() + ")", "n", "eigenvalue", true, false, {}};
  for (auto& [i, s] : lines) chart.series.push_back(std::move(s));
  detail::write_svg(run.out, "spectra.svg", chart);
  return 0;
}

// ---------------------------------------------------------------------------
// Single training run
// ---------------------------------------------------------------------------

inline int cmd_train(const Config& cfg, const RunOptions& run, std::ostream& log) {
  cfg.check_known({"consensus"}, {"consensus.F", "consensus.K", "consensus.L"});
  cfg.check_known({"train"}, train_keys());
  const ConsensusArch arch = base_arch(cfg);
  const auto n = static_cast<std::size_t>(cfg.get_uint("train.n", 50));
  const auto big_n = static_cast<std::size_t>(cfg.get_uint("train.N", 0));
  if (n < 2) throw ConfigError("train.n must be at least 2");
  const TrainConfig tc = train_config(cfg, run.seed);
  const auto res = train_consensus(arch, n, tc);
  {
    auto os = detail::open_output(run.out, "train_log.csv");
    write_training_log_csv(os, res.log);
  }
  {
    auto os = detail::open_output(run.out, "model.txt");
    write_params(os, res.params);
  }
  log << "best epoch " << res.best_epoch << ", validation rRMSE " << res.log[res.best_epoch].val_rrmse << "\n";
  if (big_n >= 2) {
    const auto tr = transfer_eval(res.params, n, big_n, tc);
    log << "transfer to N=" << big_n << ": rRMSE_n " << tr.rrmse_n << ", rRMSE_N " << tr.rrmse_big
        << ", relative difference " << tr.relative_difference << (tr.degenerate ? " (" + tr.note + ")" : "") << "\n";
  }
  return 0;
}

}  // namespace wnn::experiments
