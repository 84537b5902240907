#pragma once
//
// Maximal functions sup_t |S_t f(gamma(x, t))| on the atoms of a measure,
// the maximal-estimate ratio, log-log regression over lambda sweeps and the
// discrete bilinear fractional-integral check.
//

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/curves.hpp"
#include "fraclab/dispersion.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/spectral_core.hpp"

namespace fraclab {

/// Union of uniform and geometric segments inside [-1, 1]. refined(k) doubles
/// every segment's node count k times, so node sets are nested.
class TimeGrid {
 public:
  struct Segment {
    bool geometric = false;
    double a = 0.0, b = 1.0;
    std::size_t n = 2;
  };

  static TimeGrid uniform(double t_min, double t_max, std::size_t n_t) {
    TimeGrid g;
    g.add_uniform(t_min, t_max, n_t);
    return g;
  }

  TimeGrid& add_uniform(double a, double b, std::size_t n) {
    check(a, b, n);
    segs_.push_back({false, a, b, n});
    return *this;
  }

  /// n nodes a * (b/a)^(k/(n-1)); requires 0 < a < b.
  TimeGrid& add_geometric(double a, double b, std::size_t n) {
    check(a, b, n);
    detail::require(a > 0.0, "TimeGrid: geometric segment needs a > 0");
    segs_.push_back({true, a, b, n});
    return *this;
  }

  /// Geometric segment with a fixed ratio between consecutive nodes.
  TimeGrid& add_ratio(double a, double b, double ratio) {
    detail::require(ratio > 1.0, "TimeGrid: ratio must exceed 1");
    const double steps = std::ceil(std::log(b / a) / std::log(ratio));
    return add_geometric(a, b, static_cast<std::size_t>(std::max(1.0, steps)) + 1);
  }

  TimeGrid refined(int levels = 1) const {
    TimeGrid g = *this;
    for (auto& s : g.segs_) s.n = ((s.n - 1) << levels) + 1;
    g.level_ += levels;
    return g;
  }

  std::vector<double> nodes() const {
    std::vector<double> out;
    for (const auto& s : segs_) {
      for (std::size_t k = 0; k < s.n; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(s.n - 1);
        double t = s.geometric ? s.a * std::pow(s.b / s.a, u) : s.a + (s.b - s.a) * u;
        if (k == s.n - 1) t = s.b;
        out.push_back(t);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  double t_min() const {
    double v = 1.0;
    for (const auto& s : segs_) v = std::min(v, s.a);
    return v;
  }
  double t_max() const {
    double v = -1.0;
    for (const auto& s : segs_) v = std::max(v, s.b);
    return v;
  }
  /// Node count of the first (primary) segment.
  std::size_t n_t() const { return segs_.empty() ? 0 : segs_.front().n; }
  int refinement_level() const { return level_; }
  const std::vector<Segment>& segments() const { return segs_; }

  /// [0, 1] with n_t uniform nodes plus 256 geometric nodes in (0, 1/lambda].
  static TimeGrid counterexample_default(double lambda, std::size_t n_t = 2048) {
    detail::require(lambda >= 1.0, "TimeGrid: lambda must be >= 1");
    TimeGrid g = uniform(0.0, 1.0, n_t);
    g.add_geometric(1e-6 / lambda, 1.0 / lambda, 256);
    return g;
  }

  /// Nodes for data in the band lambda/2 <= |xi| <= 2 lambda: dense where the
  /// wave packet is still coherent (t of order lambda^-m), ratio 1.02 up to
  /// the time the packet leaves I, ratio 2 afterwards.
  static TimeGrid band_default(double lambda, double m) {
    detail::require(lambda >= 1.0 && m > 1.0, "TimeGrid: band grid needs lambda >= 1, m > 1");
    const double tm = std::pow(lambda, -m);
    const double tc = std::min(1.0, 4.0 / (m * std::pow(lambda / 2.0, m - 1.0)));
    TimeGrid g = uniform(0.0, std::min(1.0, 4.0 * tm), 64);
    g.add_geometric(std::min(1e-4 * tm, 0.5), std::min(tm, 1.0), 32);
    if (4.0 * tm < tc) g.add_ratio(4.0 * tm, tc, 1.02);
    if (tc < 1.0) g.add_ratio(tc, 1.0, 2.0);
    return g;
  }

 private:
  static void check(double a, double b, std::size_t n) {
    detail::require(a >= -1.0 && b <= 1.0, "TimeGrid: times must lie in [-1, 1]");
    detail::require(a < b, "TimeGrid: t_min must be < t_max");
    detail::require(n >= 2, "TimeGrid: need at least 2 nodes");
  }

  std::vector<Segment> segs_;
  int level_ = 0;
};

struct MaximalProfile {
  std::vector<double> x;
  std::vector<double> weight;
  std::vector<double> sup_values;
  std::vector<double> argmax_t;
  double l2_mu = 0.0;
  int refinement_level = 0;
  bool converged = true;
};

struct MaximalOptions {
  int polish_iterations = 20;
  /// Spatial radius of the data, used by the evaluator's decimation margin.
  double data_extent = 1.0;
};

/// Per atom: grid sup of |S_t f(gamma(x_i, t))| followed by golden-section
/// polish on the bracketing interval of the discrete argmax.
inline MaximalProfile maximal_function(const FrequencySignal& sig, const CurveFamily& c, const DispersionSymbol& sym,
                                       const TimeGrid& tg, const FrostmanMeasure& mu, MaximalOptions opt = {}) {
  const auto xs = mu.positions();
  const std::size_t na = xs.size();
  MaximalProfile out;
  out.x.assign(xs.begin(), xs.end());
  out.weight.assign(mu.weights().begin(), mu.weights().end());
  out.sup_values.assign(na, 0.0);
  out.argmax_t.assign(na, 0.0);
  out.refinement_level = tg.refinement_level();
  const std::vector<double> ts = tg.nodes();
  if (sig.is_zero()) {
    out.argmax_t.assign(na, ts.front());
    return out;
  }

  FieldEvaluator ev(sig, sym, opt.data_extent);
  std::vector<std::size_t> best_k(na, 0);
  std::vector<double> best(na, -1.0), ys(na);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    double ymax = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      ys[i] = c(xs[i], t);
      ymax = std::max(ymax, std::abs(ys[i]));
    }
    const auto slice = ev.slice(t, ymax, na);
    for (std::size_t i = 0; i < na; ++i) {
      const double v = std::abs(slice.at(ys[i]));
      if (v > best[i]) {
        best[i] = v;
        best_k[i] = k;
      }
    }
  }

  constexpr double kInvPhi = 0.6180339887498949;
  for (std::size_t i = 0; i < na; ++i) {
    double sup = best[i], arg = ts[best_k[i]];
    if (opt.polish_iterations > 0 && ts.size() > 1) {
      const double x = xs[i];
      auto g = [&](double t) { return std::abs(ev.eval(c(x, t), t)); };
      double a = ts[best_k[i] == 0 ? 0 : best_k[i] - 1];
      double b = ts[std::min(best_k[i] + 1, ts.size() - 1)];
      double p = b - kInvPhi * (b - a), q = a + kInvPhi * (b - a);
      double gp = g(p), gq = g(q);
      for (int it = 0; it < opt.polish_iterations; ++it) {
        if (gp >= gq) {
          b = q;
          q = p;
          gq = gp;
          p = b - kInvPhi * (b - a);
          gp = g(p);
        } else {
          a = p;
          p = q;
          gp = gq;
          q = a + kInvPhi * (b - a);
          gq = g(q);
        }
      }
      if (gp > sup) sup = gp, arg = p;
      if (gq > sup) sup = gq, arg = q;
    }
    out.sup_values[i] = sup;
    out.argmax_t[i] = arg;
  }
  out.l2_mu = integrate_l2_mu(out.sup_values, mu);
  return out;
}

/// Halves the time step until the L2(mu) norm moves by less than rel_tol.
inline MaximalProfile certified_maximal_function(const FrequencySignal& sig, const CurveFamily& c,
                                                 const DispersionSymbol& sym, const TimeGrid& tg,
                                                 const FrostmanMeasure& mu, MaximalOptions opt = {},
                                                 double rel_tol = 1e-3, int max_levels = 4) {
  MaximalProfile prev = maximal_function(sig, c, sym, tg, mu, opt);
  for (int lvl = 1; lvl <= max_levels; ++lvl) {
    MaximalProfile next = maximal_function(sig, c, sym, tg.refined(lvl), mu, opt);
    const double change = std::abs(next.l2_mu - prev.l2_mu);
    prev = std::move(next);
    if (change <= rel_tol * std::max(prev.l2_mu, 1e-300)) return prev;
  }
  prev.converged = false;
  return prev;
}

inline double maximal_ratio(const FrequencySignal& sig, const CurveFamily& c, const DispersionSymbol& sym,
                            const TimeGrid& tg, const FrostmanMeasure& mu, SobolevParams s, MaximalOptions opt = {}) {
  if (sig.is_zero()) throw ValidationError("maximal_ratio: undefined for the zero signal");
  const double den = sobolev_norm(sig, s);
  return maximal_function(sig, c, sym, tg, mu, opt).l2_mu / den;
}

struct ScalingFit {
  std::vector<double> lambdas;
  std::vector<double> values;
  std::vector<double> log_values;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

struct LineFit {
  double slope = 0.0, intercept = 0.0, max_residual = 0.0;
};

inline LineFit least_squares(std::span<const double> u, std::span<const double> v) {
  detail::require(u.size() == v.size() && u.size() >= 2, "least_squares: need at least two aligned points");
  const double n = static_cast<double>(u.size());
  double mu_ = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) mu_ += u[i], mv += v[i];
  mu_ /= n;
  mv /= n;
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu_) * (u[i] - mu_);
    suv += (u[i] - mu_) * (v[i] - mv);
  }
  detail::require(suu > 0.0, "least_squares: abscissae are all equal");
  LineFit f;
  f.slope = suv / suu;
  f.intercept = mv - f.slope * mu_;
  for (std::size_t i = 0; i < u.size(); ++i) {
    f.max_residual = std::max(f.max_residual, std::abs(v[i] - f.intercept - f.slope * u[i]));
  }
  return f;
}

inline ScalingFit scaling_regression(std::span<const double> lambdas, std::span<const double> values) {
  detail::require(lambdas.size() == values.size(), "scaling_regression: lambda and value counts differ");
  detail::require(lambdas.size() >= 4, "scaling_regression: need at least 4 points");
  ScalingFit fit;
  std::vector<double> ll;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    detail::require(lambdas[i] > 0.0, "scaling_regression: lambdas must be positive");
    if (i > 0) detail::require(lambdas[i] > lambdas[i - 1], "scaling_regression: lambdas must increase");
    detail::require(values[i] > 0.0 && std::isfinite(values[i]), "scaling_regression: values must be positive");
    ll.push_back(std::log(lambdas[i]));
    fit.log_values.push_back(std::log(values[i]));
  }
  fit.lambdas.assign(lambdas.begin(), lambdas.end());
  fit.values.assign(values.begin(), values.end());
  const LineFit lf = least_squares(ll, fit.log_values);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.max_residual = lf.max_residual;
  return fit;
}

/// lo, lo*2, ..., hi for powers of two lo <= hi.
inline std::vector<double> dyadic_sweep(double lo, double hi) {
  detail::require(lo > 0.0 && hi >= lo, "dyadic_sweep: need 0 < lo <= hi");
  std::vector<double> out;
  for (double v = lo; v <= hi * (1 + 1e-12); v *= 2.0) out.push_back(v);
  return out;
}

struct HlsResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

namespace detail {

// sum_i a_i sum_{i' != i} k(|i - i'|) b_i' with k(d) = (d h)^-rho, by a
// zero-padded real FFT convolution.
inline double toeplitz_bilinear(std::span<const double> a, std::span<const double> b, double h, double rho) {
  const std::size_t n = a.size();
  std::size_t L = 1;
  while (L < 2 * n) L <<= 1;
  const std::size_t nc = L / 2 + 1;
  double* kr = fftw_alloc_real(L);
  double* br = fftw_alloc_real(L);
  fftw_complex* kc = fftw_alloc_complex(nc);
  fftw_complex* bc = fftw_alloc_complex(nc);
  std::fill(kr, kr + L, 0.0);
  std::fill(br, br + L, 0.0);
  for (std::size_t d = 1; d < n; ++d) {
    const double v = std::pow(static_cast<double>(d) * h, -rho);
    kr[d] = v;
    kr[L - d] = v;
  }
  for (std::size_t i = 0; i < n; ++i) br[i] = b[i];
  fftw_plan pk = fftw_plan_dft_r2c_1d(static_cast<int>(L), kr, kc, FFTW_ESTIMATE);
  fftw_plan pb = fftw_plan_dft_r2c_1d(static_cast<int>(L), br, bc, FFTW_ESTIMATE);
  fftw_execute(pk);
  fftw_execute(pb);
  for (std::size_t j = 0; j < nc; ++j) {
    const double re = kc[j][0] * bc[j][0] - kc[j][1] * bc[j][1];
    const double im = kc[j][0] * bc[j][1] + kc[j][1] * bc[j][0];
    bc[j][0] = re;
    bc[j][1] = im;
  }
  fftw_plan pi = fftw_plan_dft_c2r_1d(static_cast<int>(L), bc, br, FFTW_ESTIMATE);
  fftw_execute(pi);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * br[i];
  fftw_destroy_plan(pk);
  fftw_destroy_plan(pb);
  fftw_destroy_plan(pi);
  fftw_free(kr);
  fftw_free(br);
  fftw_free(kc);
  fftw_free(bc);
  return acc / static_cast<double>(L);
}

}  // namespace detail

enum class HlsMethod { automatic, direct, fft };

/// The discrete bilinear form without the rho < alpha precondition; used to
/// probe what happens when the hypothesis fails.
inline HlsResult hls_sum(std::span<const double> g, std::span<const double> h, double rho, const FrostmanMeasure& mu,
                         HlsMethod method = HlsMethod::automatic) {
  detail::require(g.size() == mu.size() && h.size() == mu.size(), "hls_check: arrays must align with atoms");
  detail::require(std::isfinite(rho) && rho > 0.0, "hls_check: rho must be positive");
  for (std::size_t i = 0; i < g.size(); ++i) {
    detail::require(g[i] >= 0.0 && h[i] >= 0.0, "hls_check: g and h must be nonnegative");
  }
  const auto x = mu.positions();
  const auto w = mu.weights();
  const std::size_t n = x.size();
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = g[i] * w[i];
    b[i] = h[i] * w[i];
  }
  HlsResult r;
  const bool uniform = mu.uniformly_spaced() && n >= 2;
  if (method == HlsMethod::fft && !uniform) throw ValidationError("hls_check: FFT path needs uniformly spaced atoms");
  if (method == HlsMethod::fft || (method == HlsMethod::automatic && uniform && n > 256)) {
    const double step = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
    r.lhs = detail::toeplitz_bilinear(a, b, step, rho);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0.0) continue;
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) row += b[j] * std::pow(std::abs(x[i] - x[j]), -rho);
      }
      r.lhs += a[i] * row;
    }
  }
  r.rhs = integrate_l2_mu(g, mu) * integrate_l2_mu(h, mu);
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  return r;
}

inline HlsResult hls_check(std::span<const double> g, std::span<const double> h, double rho, const FrostmanMeasure& mu,
                           HlsMethod method = HlsMethod::automatic) {
  if (!(rho > 0.0 && rho < mu.alpha())) {
    throw ValidationError("hls_check: requires 0 < rho < alpha");
  }
  return hls_sum(g, h, rho, mu, method);
}

/// Random data with Fourier support in lambda/2 <= |xi| <= 2 lambda:
///   f^(xi) = psi(xi/lambda) A(xi/lambda) exp(-i x0 xi)
/// where A mixes a few low Fourier modes with Gaussian coefficients and
/// x0 is uniform in [-1/2, 1/2]. The grid is sized for |y| <= 2, |t| <= t_max.
inline FrequencySignal make_band_signal(double lambda, const DispersionSymbol& sym, std::uint64_t seed,
                                        double t_max = 1.0) {
  detail::require(lambda >= 1.0, "make_band_signal: lambda must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(-0.5, 0.5);
  constexpr int kModes = 4;
  cplx ca[kModes], sa[kModes];
  for (int k = 0; k < kModes; ++k) {
    ca[k] = {nd(rng), nd(rng)};
    sa[k] = {nd(rng), nd(rng)};
  }
  const double x0 = ud(rng);
  const double band = 2.0 * lambda;
  const double speed = sym.max_abs_dphi(-band, band);
  const double dxi = (kPi / 8.0) / (2.0 + 1.0 + t_max * speed);
  const FrequencyGrid grid = FrequencyGrid::covering(-band, band, dxi, 1024);
  const BumpProfile psi = BumpProfile::annular();
  return FrequencySignal::sample(grid, [&](double xi) -> cplx {
    const double u = xi / lambda;
    const double p = psi(u);
    if (p == 0.0) return {};
    cplx amp = ca[0];
    for (int k = 1; k < kModes; ++k) {
      amp += ca[k] * std::cos(k * kPi * u / 2.0) + sa[k] * std::sin(k * kPi * u / 2.0);
    }
    return p * amp * std::polar(1.0, -x0 * xi);
  });
}

struct BandSweepConfig {
  double m = 2.0, kappa = 0.5, alpha = 0.5;
  std::vector<double> lambdas;
  std::size_t seeds = 4;
  std::uint64_t seed = 0;
  double s = 0.0;
  std::size_t atoms = 512;
};

struct BandSweepResult {
  std::vector<double> lambdas;
  std::vector<double> mean_ratio;
  std::vector<std::vector<double>> ratios;  // [lambda][seed]
  ScalingFit fit;
};

/// Mean maximal ratio of random band data over a lambda sweep. Seed k uses
/// the same value at every lambda.
inline BandSweepResult band_ratio_sweep(const BandSweepConfig& cfg) {
  detail::require(cfg.seeds >= 1, "band_ratio_sweep: need at least one seed");
  const auto sym = DispersionSymbol::power(cfg.m);
  const auto curve = CurveFamily::power(cfg.kappa);
  const FrostmanMeasure mu = build_power_measure(cfg.alpha, cfg.atoms);
  BandSweepResult out;
  for (double lam : cfg.lambdas) {
    const TimeGrid tg = TimeGrid::band_default(lam, cfg.m);
    std::vector<double> rs;
    double sum = 0.0;
    for (std::size_t k = 0; k < cfg.seeds; ++k) {
      const FrequencySignal f = make_band_signal(lam, sym, cfg.seed + k);
      rs.push_back(maximal_ratio(f, curve, sym, tg, mu, {cfg.s}));
      sum += rs.back();
    }
    out.lambdas.push_back(lam);
    out.mean_ratio.push_back(sum / static_cast<double>(cfg.seeds));
    out.ratios.push_back(std::move(rs));
  }
  out.fit = scaling_regression(out.lambdas, out.mean_ratio);
  return out;
}

}  // namespace fraclab
