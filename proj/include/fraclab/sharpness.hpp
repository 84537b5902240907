#pragma once
//
// Counterexample data for the regularity thresholds:
//   f1^(xi) = psi0(lambda^(-1/m) xi),   f2^(xi) = lambda^-1 psi0(xi/lambda + lambda),
// the root t(x) of t^kappa + m lambda^(2m-2) t = x, lower-bound checks along
// the curve x - t^kappa, scaling sweeps and the closed-form exponents.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/curves.hpp"
#include "fraclab/dispersion.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/kernel_analysis.hpp"
#include "fraclab/maximal_lab.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/spectral_core.hpp"

namespace fraclab {

inline void check_exponents(double m, double kappa, double alpha) {
  detail::require(std::isfinite(m) && m > 1.0, "m must exceed 1");
  detail::require(kappa > 0.0 && kappa <= 1.0, "kappa must lie in (0, 1]");
  detail::require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
}

/// max{1/4, (1-alpha)/2, (1-m alpha kappa)/2}.
inline double threshold(double m, double kappa, double alpha) {
  check_exponents(m, kappa, alpha);
  return std::max({0.25, (1.0 - alpha) / 2.0, (1.0 - m * alpha * kappa) / 2.0});
}

struct DimBound {
  double value = 0.0;  // clamped to [0, 1]
  double raw = 0.0;
};

inline DimBound dim_bound(double s, double m, double kappa) {
  detail::require(s > 0.25, "dim_bound: requires s > 1/4");
  detail::require(std::isfinite(m) && m > 1.0, "dim_bound: m must exceed 1");
  detail::require(kappa > 0.0 && kappa <= 1.0, "dim_bound: kappa must lie in (0, 1]");
  DimBound d;
  d.raw = std::max(1.0 - 2.0 * s, (1.0 - 2.0 * s) / (m * kappa));
  d.value = std::clamp(d.raw, 0.0, 1.0);
  return d;
}

/// 1/m - min{alpha/m, alpha kappa}/2.
inline double predicted_f1_exponent(double m, double kappa, double alpha) {
  check_exponents(m, kappa, alpha);
  return 1.0 / m - std::min(alpha / m, alpha * kappa) / 2.0;
}

struct CounterexampleSpec {
  enum class Family { f1, f2 };
  Family family;
  double lambda;
  double m;
  double kappa;
  BumpProfile psi0;

  CounterexampleSpec(Family fam, double lambda_, double m_, double kappa_, BumpProfile psi = BumpProfile::origin())
      : family(fam), lambda(lambda_), m(m_), kappa(kappa_), psi0(psi) {
    detail::require(std::isfinite(lambda) && lambda >= 2.0, "CounterexampleSpec: lambda must be >= 2");
    detail::require(std::isfinite(m) && m > 1.0, "CounterexampleSpec: m must exceed 1");
    detail::require(kappa > 0.0 && kappa <= 1.0, "CounterexampleSpec: kappa must lie in (0, 1]");
    detail::require(psi0.kind() == BumpProfile::Kind::origin, "CounterexampleSpec: psi0 must be the origin bump");
  }

  double delta() const { return psi0.support_radius(); }
  /// Right end of the x-window of f1: (lambda^(-1/m) + lambda^(-kappa)) / 100.
  double f1_window() const { return (std::pow(lambda, -1.0 / m) + std::pow(lambda, -kappa)) / 100.0; }
  /// Right end of the t-window of f1: lambda^-1 / 100.
  double f1_time_window() const { return 0.01 / lambda; }
  /// Upper bound lambda^(2-2m) / (100 m) for t(x) on (0, 1/100).
  double f2_time_bound() const { return std::pow(lambda, 2.0 - 2.0 * m) / (100.0 * m); }
};

namespace detail {

inline constexpr std::size_t kGridBudget = std::size_t{1} << 25;

inline FrequencyGrid counterexample_grid(double lo, double hi, const DispersionSymbol& sym, double t_max) {
  const double speed = sym.max_abs_dphi(lo, hi);
  const double dxi = (kPi / 8.0) / (2.0 + 1.0 + t_max * speed);
  const double cells = std::ceil((hi - lo) / dxi);
  if (cells > static_cast<double>(kGridBudget)) {
    std::ostringstream os;
    os << "counterexample grid needs " << cells << " nodes, above the 2^25 budget";
    throw ResolutionError(os.str());
  }
  return {lo, hi, std::max<std::size_t>(512, static_cast<std::size_t>(cells))};
}

}  // namespace detail

/// Samples on [-2 delta lambda^(1/m), 2 delta lambda^(1/m)], resolved for |y| <= 2, |t| <= t_max.
inline FrequencySignal make_f1(const CounterexampleSpec& spec, double t_max = 1.0) {
  detail::require(spec.family == CounterexampleSpec::Family::f1, "make_f1: spec family must be f1");
  const double L = std::pow(spec.lambda, 1.0 / spec.m);
  const double half = 2.0 * spec.delta() * L;
  const auto sym = DispersionSymbol::power(spec.m);
  const auto grid = detail::counterexample_grid(-half, half, sym, t_max);
  const BumpProfile psi = spec.psi0;
  return FrequencySignal::sample(grid, [&](double xi) { return psi(xi / L); });
}

/// Samples on [-lambda^2 - 2 delta lambda, -lambda^2 + 2 delta lambda].
inline FrequencySignal make_f2(const CounterexampleSpec& spec, double t_max = 1.0) {
  detail::require(spec.family == CounterexampleSpec::Family::f2, "make_f2: spec family must be f2");
  const double lam = spec.lambda;
  const double c = -lam * lam, half = 2.0 * spec.delta() * lam;
  const auto sym = DispersionSymbol::power(spec.m);
  const auto grid = detail::counterexample_grid(c - half, c + half, sym, t_max);
  const BumpProfile psi = spec.psi0;
  return FrequencySignal::sample(grid, [&](double xi) { return psi(xi / lam + lam) / lam; });
}

/// Root of tau(t) = t^kappa + m lambda^(2m-2) t = x on (0, 1/100), by bisection.
inline double solve_t_of_x(double x, double kappa, double m, double lambda) {
  if (!(x > 0.0 && x < 0.01)) throw DomainError("solve_t_of_x: x must lie in (0, 1/100)");
  detail::require(kappa > 0.0 && kappa <= 1.0, "solve_t_of_x: kappa must lie in (0, 1]");
  detail::require(m > 1.0 && lambda >= 1.0, "solve_t_of_x: need m > 1 and lambda >= 1");
  const double slope = m * std::pow(lambda, 2.0 * m - 2.0);
  if (kappa == 1.0) return x / (1.0 + slope);
  auto tau = [&](double t) { return std::pow(t, kappa) + slope * t; };
  double lo = 0.0, hi = std::min(1.0, std::pow(x, 1.0 / kappa) + x / slope);
  const double tol = 1e-12 * std::max(1.0, std::pow(lambda, 2.0 * m - 2.0));
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (tau(mid) < x ? lo : hi) = mid;
  }
  const double t = std::abs(tau(lo) - x) <= std::abs(tau(hi) - x) ? lo : hi;
  if (std::abs(tau(t) - x) > tol) throw ResolutionError("solve_t_of_x: bisection missed the residual tolerance");
  return t;
}

/// 0.5 cos(1/2) int psi0 / (2 pi): the pass threshold used for both
/// counterexample lower bounds. An engineering choice, not a sharp constant.
inline double lower_bound_c0(const BumpProfile& psi0) { return 0.5 * std::cos(0.5) * psi0.integral() / kTwoPi; }

struct LowerBoundF1 {
  double min_normalized = 0.0;       // min over x of sup over the t-window of lambda^(-1/m)|S_t f1(gamma)|
  double min_rectangle = 0.0;        // min over the full (x, t) rectangle
  double max_phase_rectangle = 0.0;  // max |phi1| over the rectangle
  double max_phase_ridge = 0.0;      // max |phi1| at t = x^(1/kappa)
  bool phase_ok = false;             // rectangle phase bound <= 1/2
  double c0 = 0.0;
  bool pass = false;
};

inline void require_power_curve(const CurveFamily& curve, double kappa) {
  detail::require(curve.kind() == CurveFamily::Kind::power, "counterexample checks need the power curve");
  detail::require(std::abs(curve.kappa() - kappa) < 1e-15, "curve kappa differs from the spec");
}

/// Evaluates lambda^(-1/m)|S_t f1(gamma(x,t))| on an (x, t) grid of the
/// window (0, x_w) x (0, t_w). Atoms of mu inside the x-window are used as the
/// x-grid when there are at least 8 of them.
inline LowerBoundF1 verify_lower_bound_f1(const CounterexampleSpec& spec, const CurveFamily& curve,
                                          const FrostmanMeasure& mu, std::size_t grid_n = 24) {
  require_power_curve(curve, spec.kappa);
  const double lam = spec.lambda, m = spec.m;
  const double L = std::pow(lam, 1.0 / m);
  const double xw = spec.f1_window(), tw = spec.f1_time_window();
  std::vector<double> xs;
  for (double x : mu.positions()) {
    if (x > 0.0 && x < xw) xs.push_back(x);
  }
  if (xs.size() < 8) {
    xs.clear();
    for (std::size_t i = 0; i < grid_n; ++i) xs.push_back(xw * (static_cast<double>(i) + 0.5) / static_cast<double>(grid_n));
  }
  std::vector<double> ts;
  for (std::size_t k = 0; k < grid_n; ++k) ts.push_back(tw * (static_cast<double>(k) + 0.5) / static_cast<double>(grid_n));

  const FrequencySignal f1 = make_f1(spec, tw);
  const auto sym = DispersionSymbol::power(m);
  const double delta = spec.delta();
  auto phase_bound = [&](double x, double t) {
    return L * std::abs(curve(x, t)) * delta + lam * t * std::pow(delta, m);
  };

  LowerBoundF1 r;
  r.c0 = lower_bound_c0(spec.psi0);
  r.min_normalized = std::numeric_limits<double>::infinity();
  r.min_rectangle = std::numeric_limits<double>::infinity();
  for (double x : xs) {
    double sup = 0.0;
    for (double t : ts) {
      const double v = std::abs(evaluate_field(f1, {curve(x, t), t}, sym)) / L;
      sup = std::max(sup, v);
      r.min_rectangle = std::min(r.min_rectangle, v);
      r.max_phase_rectangle = std::max(r.max_phase_rectangle, phase_bound(x, t));
    }
    const double tr = std::pow(x, 1.0 / spec.kappa);
    if (tr < tw) {
      sup = std::max(sup, std::abs(evaluate_field(f1, {curve(x, tr), tr}, sym)) / L);
      r.max_phase_ridge = std::max(r.max_phase_ridge, phase_bound(x, tr));
    }
    r.min_normalized = std::min(r.min_normalized, sup);
  }
  r.phase_ok = r.max_phase_rectangle <= 0.5;
  r.pass = r.min_normalized >= r.c0;
  return r;
}

struct LowerBoundF2 {
  double min_along_graph = 0.0;
  double l2_window = 0.0;      // L2(mu) norm over window atoms of the graph values
  double max_remainder = 0.0;  // max |phi2 - lambda^(2m) t(x)|
  double max_t = 0.0;
  bool t_bound_ok = false;
  double c0 = 0.0;
  std::size_t atoms = 0;
  bool pass = false;
};

/// |S_{t(x)} f2(gamma(x, t(x)))| at every atom of mu in (0, 1/100).
inline LowerBoundF2 verify_lower_bound_f2(const CounterexampleSpec& spec, const CurveFamily& curve,
                                          const FrostmanMeasure& mu) {
  require_power_curve(curve, spec.kappa);
  const double lam = spec.lambda, m = spec.m;
  const FrequencySignal f2 = make_f2(spec, spec.f2_time_bound());
  const auto sym = DispersionSymbol::power(m);
  const double lam2m = std::pow(lam, 2.0 * m);
  const double delta = spec.delta();

  LowerBoundF2 r;
  r.c0 = lower_bound_c0(spec.psi0);
  r.min_along_graph = std::numeric_limits<double>::infinity();
  const auto xs = mu.positions();
  const auto ws = mu.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (!(x > 0.0 && x < 0.01)) continue;
    ++r.atoms;
    const double t = solve_t_of_x(x, spec.kappa, m, lam);
    r.max_t = std::max(r.max_t, t);
    const double v = std::abs(evaluate_field(f2, {curve(x, t), t}, sym));
    r.min_along_graph = std::min(r.min_along_graph, v);
    acc += ws[i] * v * v;
    for (int k = 0; k <= 16; ++k) {
      const double eta = -delta + 2.0 * delta * k / 16.0;
      const double u = eta / lam;
      const double rem = t * lam2m * (std::expm1(m * std::log1p(u)) - m * u);
      r.max_remainder = std::max(r.max_remainder, std::abs(rem));
    }
  }
  if (r.atoms == 0) throw ValidationError("verify_lower_bound_f2: no atoms in (0, 1/100)");
  r.l2_window = std::sqrt(acc);
  r.t_bound_ok = r.max_t < spec.f2_time_bound();
  r.pass = r.min_along_graph >= r.c0;
  return r;
}

struct F1SweepConfig {
  double m = 2.0, kappa = 1.0, alpha = 1.0;
  std::vector<double> lambdas;
  std::vector<double> s_values{0.0};
  double delta = 0.1;
  std::size_t base_atoms = 1024;
  std::size_t window_atoms = 64;
  std::size_t n_t = 2048;
  bool certify_time_grid = false;
};

struct F1SweepRow {
  double lambda = 0.0;
  double maximal_norm = 0.0;  // sup over t in the TimeGrid, L2(mu) over all of I
  double window_norm = 0.0;   // sup over the f1 t-window, L2(mu) over the f1 x-window
  std::vector<double> hs_norms;
  std::size_t atoms = 0;
  std::size_t grid_n = 0;
  int refinement_level = 0;
};

struct F1SweepResult {
  std::vector<F1SweepRow> rows;
  ScalingFit maximal_fit;
  ScalingFit window_fit;
  std::vector<ScalingFit> hs_fits;
  double predicted_maximal_slope = 0.0;
  std::vector<double> predicted_hs_slopes;
};

/// Measure for the f1 experiments: |x|^(alpha-1) dx on a uniform partition
/// with the window (0, x_w) refined to at least `window_atoms` cells.
inline FrostmanMeasure f1_measure(const CounterexampleSpec& spec, double alpha, std::size_t base_atoms,
                                  std::size_t window_atoms) {
  const auto b = refined_partition(base_atoms, 0.0, spec.f1_window(), window_atoms);
  return build_power_measure(alpha, b);
}

inline F1SweepResult f1_scaling_sweep(const F1SweepConfig& cfg) {
  check_exponents(cfg.m, cfg.kappa, cfg.alpha);
  F1SweepResult out;
  const auto curve = CurveFamily::power(cfg.kappa);
  const auto sym = DispersionSymbol::power(cfg.m);
  std::vector<std::vector<double>> hs(cfg.s_values.size());
  std::vector<double> mx, wn;
  for (double lam : cfg.lambdas) {
    CounterexampleSpec spec(CounterexampleSpec::Family::f1, lam, cfg.m, cfg.kappa, BumpProfile::origin(cfg.delta));
    const FrequencySignal f1 = make_f1(spec);
    const FrostmanMeasure mu = f1_measure(spec, cfg.alpha, cfg.base_atoms, cfg.window_atoms);
    const TimeGrid tg = TimeGrid::counterexample_default(lam, cfg.n_t);
    MaximalOptions opt;
    opt.data_extent = std::max(1.0, 4.0 / (cfg.delta * std::pow(lam, 1.0 / cfg.m)));
    const MaximalProfile prof = cfg.certify_time_grid ? certified_maximal_function(f1, curve, sym, tg, mu, opt)
                                                      : maximal_function(f1, curve, sym, tg, mu, opt);
    F1SweepRow row;
    row.lambda = lam;
    row.maximal_norm = prof.l2_mu;
    const FrostmanMeasure wmu = restrict_to(mu, 0.0, spec.f1_window());
    TimeGrid wtg = TimeGrid::uniform(0.0, spec.f1_time_window(), 257);
    wtg.add_geometric(1e-6 * spec.f1_time_window(), spec.f1_time_window(), 128);
    row.window_norm = maximal_function(f1, curve, sym, wtg, wmu, opt).l2_mu;
    wn.push_back(row.window_norm);
    row.atoms = mu.size();
    row.grid_n = f1.grid.size();
    row.refinement_level = prof.refinement_level;
    for (std::size_t k = 0; k < cfg.s_values.size(); ++k) {
      row.hs_norms.push_back(sobolev_norm(f1, {cfg.s_values[k]}));
      hs[k].push_back(row.hs_norms.back());
    }
    mx.push_back(row.maximal_norm);
    out.rows.push_back(std::move(row));
  }
  out.maximal_fit = scaling_regression(cfg.lambdas, mx);
  out.window_fit = scaling_regression(cfg.lambdas, wn);
  out.predicted_maximal_slope = predicted_f1_exponent(cfg.m, cfg.kappa, cfg.alpha);
  for (std::size_t k = 0; k < cfg.s_values.size(); ++k) {
    out.hs_fits.push_back(scaling_regression(cfg.lambdas, hs[k]));
    out.predicted_hs_slopes.push_back(cfg.s_values[k] / cfg.m + 1.0 / (2.0 * cfg.m));
  }
  return out;
}

struct F2SweepConfig {
  double m = 2.0, kappa = 1.0, alpha = 1.0;
  std::vector<double> lambdas;
  std::vector<double> s_values{0.0, 0.25};
  double delta = 0.1;
  std::size_t base_atoms = 1024;
  std::size_t window_atoms = 64;
};

struct F2SweepRow {
  double lambda = 0.0;
  LowerBoundF2 bound;
  std::vector<double> hs_norms;
  std::vector<double> ratios;  // l2_window / ||f2||_{H^s}
};

struct F2SweepResult {
  std::vector<F2SweepRow> rows;
  std::vector<ScalingFit> hs_fits;
  std::vector<ScalingFit> ratio_fits;
  std::vector<double> predicted_hs_slopes;
  double min_graph_variation = 0.0;  // max/min of min_along_graph over the sweep
};

inline F2SweepResult f2_sweep(const F2SweepConfig& cfg) {
  check_exponents(cfg.m, cfg.kappa, cfg.alpha);
  F2SweepResult out;
  const auto curve = CurveFamily::power(cfg.kappa);
  const std::size_t ns = cfg.s_values.size();
  std::vector<std::vector<double>> hs(ns), ratio(ns);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double lam : cfg.lambdas) {
    CounterexampleSpec spec(CounterexampleSpec::Family::f2, lam, cfg.m, cfg.kappa, BumpProfile::origin(cfg.delta));
    const auto b = refined_partition(cfg.base_atoms, 0.0, 0.01, cfg.window_atoms);
    const FrostmanMeasure mu = build_power_measure(cfg.alpha, b);
    F2SweepRow row;
    row.lambda = lam;
    row.bound = verify_lower_bound_f2(spec, curve, mu);
    const FrequencySignal f2 = make_f2(spec, spec.f2_time_bound());
    for (std::size_t k = 0; k < ns; ++k) {
      const double n = sobolev_norm(f2, {cfg.s_values[k]});
      row.hs_norms.push_back(n);
      row.ratios.push_back(row.bound.l2_window / n);
      hs[k].push_back(n);
      ratio[k].push_back(row.ratios.back());
    }
    lo = std::min(lo, row.bound.min_along_graph);
    hi = std::max(hi, row.bound.min_along_graph);
    out.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < ns; ++k) {
    out.hs_fits.push_back(scaling_regression(cfg.lambdas, hs[k]));
    out.ratio_fits.push_back(scaling_regression(cfg.lambdas, ratio[k]));
    out.predicted_hs_slopes.push_back(2.0 * cfg.s_values[k] - 0.5);
  }
  out.min_graph_variation = hi / lo;
  return out;
}

}  // namespace fraclab
