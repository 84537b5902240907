#pragma once
//
// The oscillatory kernel
//   K_lambda(w, w') = int exp(i phi(xi, w, w')) psi(xi/lambda)^2 dxi,
//   phi = (gamma(x,t) - gamma(x',t')) xi + (t - t') Phi(xi),
// its region decomposition, decay-envelope fits, and a numerical check of
// the van der Corput decay rate.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/curves.hpp"
#include "fraclab/dispersion.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/maximal_lab.hpp"
#include "fraclab/spectral_core.hpp"

namespace fraclab {

inline double s_star(double m, double alpha, double kappa) {
  detail::require(std::isfinite(m) && m > 1.0, "s_star: m must exceed 1");
  detail::require(alpha > 0.0 && alpha <= 1.0, "s_star: alpha must lie in (0, 1]");
  detail::require(kappa > 0.0 && kappa <= 1.0, "s_star: kappa must lie in (0, 1]");
  return std::min({0.25, alpha / 2.0, m * alpha * kappa / 2.0});
}

struct KernelParams {
  double lambda;
  DispersionSymbol sym;
  CurveFamily curve;
  BumpProfile psi;
  double alpha;

  KernelParams(double lambda_, DispersionSymbol sym_, CurveFamily curve_, double alpha_,
               BumpProfile psi_ = BumpProfile::annular())
      : lambda(lambda_), sym(std::move(sym_)), curve(std::move(curve_)), psi(psi_), alpha(alpha_) {
    detail::require(std::isfinite(lambda) && lambda >= 1.0, "KernelParams: lambda must be >= 1");
    detail::require(psi.kind() == BumpProfile::Kind::annular, "KernelParams: psi must be the annular bump");
    if (!curve.C1 || !curve.C2) curve = certified(curve);
    s_star_ = fraclab::s_star(sym.order(), alpha, curve.kappa());
    psi_l2_ = psi.l2_squared();
  }

  double s_star() const { return s_star_; }
  /// 2 lambda^(-2 s_* / alpha), the V1 width.
  double v1_width() const { return 2.0 * std::pow(lambda, -2.0 * s_star_ / alpha); }
  /// lambda ||psi||_2^2, the modulus bound of K_lambda.
  double trivial_bound() const { return lambda * psi_l2_; }
  double psi_l2_squared() const { return psi_l2_; }

 private:
  double s_star_ = 0.0;
  double psi_l2_ = 0.0;
};

inline double phase_eval(double xi, SpaceTimePoint w, SpaceTimePoint wp, const KernelParams& kp) {
  const double dg = kp.curve(w.x, w.t) - kp.curve(wp.x, wp.t);
  const double dt = w.t - wp.t;
  return dg * xi + (dt == 0.0 ? 0.0 : dt * kp.sym.phi(xi));
}

/// Midpoint nodes per half-band interval used by kernel_eval for a pair: at
/// least 8 per period of the fastest phase, rounded up to a power of two.
inline std::size_t kernel_nodes(SpaceTimePoint w, SpaceTimePoint wp, const KernelParams& kp) {
  const double dg = std::abs(kp.curve(w.x, w.t) - kp.curve(wp.x, wp.t));
  const double dt = std::abs(w.t - wp.t);
  // Total phase variation of xi -> phi(lambda xi) over an interval of length 3/2.
  const double speed = kp.lambda * (dg + dt * kp.sym.max_abs_dphi(0.5 * kp.lambda, 2.0 * kp.lambda));
  const double need = std::max(256.0, std::ceil(8.0 * 1.5 * speed / kTwoPi));
  constexpr double kCap = 4194304.0;  // 2^22
  if (need > kCap) {
    std::ostringstream os;
    os << "kernel_eval: " << need << " nodes needed, above the 2^22 budget";
    throw ResolutionError(os.str());
  }
  std::size_t n = 256;
  while (static_cast<double>(n) < need) n <<= 1;
  return n;
}

namespace detail {

// psi(xi)^2 at the midpoints of [1/2, 2] split into n cells; psi is even so
// the same table serves [-2, -1/2] reversed.
inline const std::vector<double>& psi_squared_table(const BumpProfile& psi, std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> v(n);
  const double h = 1.5 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = psi(0.5 + (static_cast<double>(j) + 0.5) * h);
    v[j] = p * p;
  }
  return cache.emplace(n, std::move(v)).first->second;
}

}  // namespace detail

/// lambda int exp(i phi(lambda xi)) psi(xi)^2 dxi, midpoint rule on
/// [-2, -1/2] and [1/2, 2].
inline cplx kernel_eval(SpaceTimePoint w, SpaceTimePoint wp, const KernelParams& kp) {
  const double dg = kp.curve(w.x, w.t) - kp.curve(wp.x, wp.t);
  const double dt = w.t - wp.t;
  const std::size_t n = kernel_nodes(w, wp, kp);
  const std::vector<double>& p2 = detail::psi_squared_table(kp.psi, n);
  const double h = 1.5 / static_cast<double>(n);
  const double lam = kp.lambda;
  double re = 0.0, im = 0.0;
  for (int side = 0; side < 2; ++side) {
    for (std::size_t j = 0; j < n; ++j) {
      const double weight = side == 0 ? p2[n - 1 - j] : p2[j];
      if (weight == 0.0) continue;
      const double xi = side == 0 ? -2.0 + (static_cast<double>(j) + 0.5) * h : 0.5 + (static_cast<double>(j) + 0.5) * h;
      const double X = lam * xi;
      const double ph = dg * X + (dt == 0.0 ? 0.0 : dt * kp.sym.phi(X));
      re += weight * std::cos(ph);
      im += weight * std::sin(ph);
    }
  }
  return cplx{re, im} * (lam * h);
}

enum class Region { V1, V2, V3 };
enum class UDominance { U1, U2 };

inline const char* region_name(Region r) { return r == Region::V1 ? "V1" : r == Region::V2 ? "V2" : "V3"; }

struct PairClassification {
  Region region = Region::V1;
  std::optional<UDominance> sub_split;
};

/// V1: |dx| <= 2 lambda^(-2s_*/alpha); otherwise V2 when |dx|/C2 > 2 C1 |dt|^kappa
/// and V3 when not. For V2 the U1/U2 comparison is reported at xi = 1.
inline PairClassification classify_pair(SpaceTimePoint w, SpaceTimePoint wp, const KernelParams& kp) {
  const double dx = std::abs(w.x - wp.x);
  const double dt = std::abs(w.t - wp.t);
  PairClassification pc;
  if (dx <= kp.v1_width()) return pc;
  const double C1 = *kp.curve.C1, C2 = *kp.curve.C2;
  const double holder = dt == 0.0 ? 0.0 : 2.0 * C1 * std::pow(dt, kp.curve.kappa());
  if (dx / C2 > holder) {
    pc.region = Region::V2;
    const double m = kp.sym.order();
    const double u_bound = 4.0 * m * std::pow(kp.lambda, m - 1.0) * dt;
    pc.sub_split = dx / C2 > u_bound ? UDominance::U1 : UDominance::U2;
  } else {
    pc.region = Region::V3;
  }
  return pc;
}

/// d/dxi of phi(lambda xi) at the kernel quadrature nodes of a U1 pair, checked
/// against lambda |dx| / (4 C2). Returns the smallest ratio observed.
inline double u1_derivative_margin(SpaceTimePoint w, SpaceTimePoint wp, const KernelParams& kp) {
  const double dg = kp.curve(w.x, w.t) - kp.curve(wp.x, wp.t);
  const double dt = w.t - wp.t;
  const double dx = std::abs(w.x - wp.x);
  const double C2 = *kp.curve.C2;
  const double m = kp.sym.order();
  const std::size_t n = kernel_nodes(w, wp, kp);
  const double h = 1.5 / static_cast<double>(n);
  const double bound = kp.lambda * dx / (4.0 * C2);
  double worst = std::numeric_limits<double>::infinity();
  for (int side = 0; side < 2; ++side) {
    const double a = side == 0 ? -2.0 : 0.5;
    for (std::size_t j = 0; j < n; ++j) {
      const double xi = a + (static_cast<double>(j) + 0.5) * h;
      if (kp.psi(xi) == 0.0) continue;
      // U1 is the part of the band where |dx|/C2 > 4 m lambda^(m-1) |dt| |xi|^(m-1).
      if (!(dx / C2 > 4.0 * m * std::pow(kp.lambda, m - 1.0) * std::abs(dt) * std::pow(std::abs(xi), m - 1.0))) continue;
      const double d = kp.lambda * (dg + dt * kp.sym.dphi(kp.lambda * xi));
      worst = std::min(worst, std::abs(d) / bound);
    }
  }
  return worst;
}

struct PairSample {
  double dx = 0.0;
  double dt = 0.0;
  double abs_K = 0.0;
  Region region = Region::V1;
  int bin = -1;
  bool envelope = false;
};

struct EnvelopeFit {
  Region region = Region::V2;
  double decay_exponent = 0.0;
  double envelope_constant = 0.0;
  double intercept = 0.0;
  double theory_exponent = 0.0;
  double lambda_exponent = 0.0;
  double max_trivial_ratio = 0.0;
  bool trivial_bound_ok = true;
  std::size_t bins_used = 0;
  double crossover = 0.0;
  std::vector<PairSample> samples;
};

/// Samples pairs inside `region`, takes the per-dyadic-bin maximum of |K| in
/// |dx| and fits log max|K| against log |dx| at the argmax pairs. The
/// envelope constant is exp(intercept) / lambda^(lambda exponent of the bound).
inline EnvelopeFit kernel_envelope_fit(const KernelParams& kp, Region region, std::size_t pair_samples,
                                       std::uint64_t seed = 0) {
  detail::require(region != Region::V1, "kernel_envelope_fit: region must be V2 or V3");
  detail::require(pair_samples >= 1000, "kernel_envelope_fit: need at least 1000 pairs");
  const double lam = kp.lambda;
  const double m = kp.sym.order();
  const double kappa = kp.curve.kappa();
  const double C1 = *kp.curve.C1, C2 = *kp.curve.C2;
  const double dx_lo = kp.v1_width();
  if (!(dx_lo < 2.0)) throw ValidationError("kernel_envelope_fit: V1 covers all separations at this lambda");

  EnvelopeFit fit;
  fit.region = region;
  if (region == Region::V2) {
    const double a = std::min(0.5, kp.alpha);
    fit.theory_exponent = -a;
    fit.lambda_exponent = 1.0 - a;
  } else {
    fit.theory_exponent = -1.0 / (2.0 * kappa);
    fit.lambda_exponent = 1.0 - m / 2.0;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, U(rng)); };
  // Largest |dt| with dx/C2 > 2 C1 |dt|^kappa.
  auto dt_edge = [&](double dx) {
    if (C1 == 0.0) return 2.0;
    return std::min(2.0, std::pow(dx / (2.0 * C1 * C2), 1.0 / kappa));
  };

  std::size_t attempts = 0;
  while (fit.samples.size() < pair_samples && attempts < 50 * pair_samples) {
    ++attempts;
    const double dx = log_uniform(dx_lo * (1.0 + 1e-9), 2.0);
    const double edge = dt_edge(dx);
    double dt;
    if (region == Region::V2) {
      // A third of the draws aim at a stationary point of the phase near
      // frequency lambda xi*, where |K| is largest for the given separation.
      const double pick = U(rng);
      if (pick < 1.0 / 3.0) {
        const double xs = 0.6 + 1.3 * U(rng);
        dt = std::min(edge * (1.0 - 1e-9), dx / std::abs(kp.sym.dphi(lam * xs)));
      } else if (pick < 2.0 / 3.0) {
        dt = edge * log_uniform(0.25 * std::pow(lam, -m), 1.0);
      } else {
        dt = edge * U(rng);
      }
    } else {
      if (edge >= 2.0) continue;
      dt = log_uniform(edge, 2.0);
    }
    const double x = -1.0 + dx + (2.0 - dx) * U(rng);
    const double t = -1.0 + dt + (2.0 - dt) * U(rng);
    SpaceTimePoint w{x, t}, wp{x - dx, t - dt};
    if (U(rng) < 0.5) std::swap(w, wp);
    if (classify_pair(w, wp, kp).region != region) continue;
    PairSample s;
    s.dx = dx;
    s.dt = dt;
    s.region = region;
    s.abs_K = std::abs(kernel_eval(w, wp, kp));
    const double r = s.abs_K / kp.trivial_bound();
    fit.max_trivial_ratio = std::max(fit.max_trivial_ratio, r);
    if (r > 1.0 + 1e-10) fit.trivial_bound_ok = false;
    s.bin = static_cast<int>(std::floor(std::log2(2.0 / dx)));
    fit.samples.push_back(s);
  }
  if (fit.samples.empty()) {
    std::ostringstream os;
    os << "kernel_envelope_fit: region " << region_name(region) << " is empty at lambda=" << lam;
    throw ValidationError(os.str());
  }

  std::map<int, std::size_t> argmax;
  std::map<int, std::size_t> count;
  for (std::size_t i = 0; i < fit.samples.size(); ++i) {
    const auto& s = fit.samples[i];
    ++count[s.bin];
    auto it = argmax.find(s.bin);
    if (it == argmax.end() || s.abs_K > fit.samples[it->second].abs_K) argmax[s.bin] = i;
  }
  // Bins near the scale where the bound meets the trivial bound lambda ||psi||^2
  // are saturated and excluded: the fit uses bins whose lower edge is at
  // least 8 times that scale (lambda^-1 for V2, lambda^(-m kappa) for V3).
  fit.crossover = region == Region::V2 ? 1.0 / lam : std::pow(lam, -m * kappa);
  std::vector<double> lx, ly;
  for (const auto& [bin, idx] : argmax) {
    if (count[bin] < 8 || fit.samples[idx].abs_K <= 0.0) continue;
    if (std::ldexp(1.0, -bin) < 8.0 * fit.crossover) continue;
    fit.samples[idx].envelope = true;
    lx.push_back(std::log(fit.samples[idx].dx));
    ly.push_back(std::log(fit.samples[idx].abs_K));
  }
  if (lx.size() < 2) {
    throw ValidationError(std::string("kernel_envelope_fit: fewer than two populated bins in ") + region_name(region));
  }
  const LineFit lf = least_squares(lx, ly);
  fit.bins_used = lx.size();
  fit.decay_exponent = lf.slope;
  fit.intercept = lf.intercept;
  fit.envelope_constant = std::exp(lf.intercept) / std::pow(lam, fit.lambda_exponent);
  return fit;
}

/// A phase together with its certified k-th derivative.
struct OscillatoryPhase {
  std::function<double(double)> phi;
  std::function<double(double)> dk;  // k-th derivative
  std::function<double(double)> d1;  // first derivative, for the quadrature step
  std::string name;
};

struct VdcResult {
  std::vector<double> lambdas;
  std::vector<double> normalized;  // lambda^(1/k) |I(lambda)|
  double sup_normalized = 0.0;
  double trend_slope = 0.0;
  bool pass = false;
};

/// |int_a^b exp(i lambda phi) psi| over a lambda sweep; pass iff
/// log(lambda^(1/k) I) has regression slope <= 0.05 in log lambda.
inline VdcResult vdc_oracle(const OscillatoryPhase& ph, const BumpProfile& psi, int k, std::span<const double> sweep,
                            double a = 0.0, double b = -1.0) {
  detail::require(k == 1 || k == 2, "vdc_oracle: k must be 1 or 2");
  detail::require(sweep.size() >= 2, "vdc_oracle: need at least two lambdas");
  if (b < a) b = psi.support_radius();
  detail::require(b > a, "vdc_oracle: empty interval");
  constexpr int kProbe = 4097;
  double max_d1 = 0.0;
  for (int i = 0; i < kProbe; ++i) {
    const double xi = a + (b - a) * i / (kProbe - 1);
    if (!(std::abs(ph.dk(xi)) >= 1.0)) {
      throw ValidationError("vdc_oracle: certified derivative bound below 1 on the support");
    }
    max_d1 = std::max(max_d1, std::abs(ph.d1(xi)));
  }
  VdcResult r;
  std::vector<double> ll, lv;
  for (double lam : sweep) {
    detail::require(lam > 0.0, "vdc_oracle: lambdas must be positive");
    const double n = std::max(4096.0, std::ceil(lam * max_d1 * (b - a) / 0.005));
    const std::size_t N = static_cast<std::size_t>(n);
    const double h = (b - a) / n;
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double xi = a + (static_cast<double>(j) + 0.5) * h;
      const double p = psi(xi);
      if (p == 0.0) continue;
      const double q = lam * ph.phi(xi);
      re += p * std::cos(q);
      im += p * std::sin(q);
    }
    const double I = std::hypot(re, im) * h;
    const double v = std::pow(lam, 1.0 / k) * I;
    r.lambdas.push_back(lam);
    r.normalized.push_back(v);
    r.sup_normalized = std::max(r.sup_normalized, v);
    ll.push_back(std::log(lam));
    lv.push_back(std::log(v));
  }
  r.trend_slope = least_squares(ll, lv).slope;
  r.pass = r.trend_slope <= 0.05;
  return r;
}

}  // namespace fraclab
