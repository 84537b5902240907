#pragma once
//
// Frequency grids, band-limited signals, the Riemann-sum Fourier pairing
//
//   f^(xi) = sum_k exp(-i x_k xi) f(x_k) dx,
//   f(x)   = (1/2pi) sum_j exp(i x xi_j) f^(xi_j) dxi,
//
// Sobolev norms and the smooth bump profiles used to build test data.
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

namespace detail {

// Sum_k c_k exp(i freq (x0 + k dx)) in index order. The unit phasor is
// advanced by rotation and re-seeded from sincos every kReseed terms, which
// keeps the accumulated phase error at a few ulp regardless of length.
inline cplx phase_sum(std::span<const cplx> coeffs, double x0, double dx, double freq) {
  constexpr std::size_t kReseed = 64;
  const cplx step = std::polar(1.0, freq * dx);
  cplx acc{0.0, 0.0};
  const std::size_t n = coeffs.size();
  for (std::size_t base = 0; base < n; base += kReseed) {
    cplx rot = std::polar(1.0, freq * (x0 + static_cast<double>(base) * dx));
    const std::size_t end = std::min(n, base + kReseed);
    double re = 0.0, im = 0.0;
    for (std::size_t k = base; k < end; ++k) {
      const cplx c = coeffs[k];
      re += c.real() * rot.real() - c.imag() * rot.imag();
      im += c.real() * rot.imag() + c.imag() * rot.real();
      rot *= step;
    }
    acc += cplx{re, im};
  }
  return acc;
}

}  // namespace detail

/// Uniform midpoint grid: xi_j = xi_min + (j + 1/2) * delta, j = 0..n-1.
/// The midpoint offset keeps xi = 0 off the node set for symmetric grids.
class FrequencyGrid {
 public:
  FrequencyGrid(double xi_min, double xi_max, std::size_t n)
      : xi_min_(xi_min), xi_max_(xi_max), n_(n) {
    detail::require(std::isfinite(xi_min) && std::isfinite(xi_max), "FrequencyGrid: bounds must be finite");
    detail::require(xi_min < xi_max, "FrequencyGrid: xi_min must be < xi_max");
    detail::require(n >= 2, "FrequencyGrid: need at least 2 nodes");
  }

  /// Smallest grid over [lo, hi] with spacing <= max_delta and at least min_n nodes.
  static FrequencyGrid covering(double lo, double hi, double max_delta, std::size_t min_n = 2) {
    detail::require(max_delta > 0.0, "FrequencyGrid::covering: max_delta must be positive");
    const double cells = std::ceil((hi - lo) / max_delta);
    detail::require(cells < 1e9, "FrequencyGrid::covering: node budget exceeded");
    return {lo, hi, std::max(min_n, static_cast<std::size_t>(cells))};
  }

  double xi_min() const { return xi_min_; }
  double xi_max() const { return xi_max_; }
  std::size_t size() const { return n_; }
  double delta() const { return (xi_max_ - xi_min_) / static_cast<double>(n_); }
  double node(std::size_t j) const { return xi_min_ + (static_cast<double>(j) + 0.5) * delta(); }

  std::vector<double> nodes() const {
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = node(j);
    return out;
  }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double xi_min_;
  double xi_max_;
  std::size_t n_;
};

/// Samples of f^ on a FrequencyGrid.
struct FrequencySignal {
  FrequencyGrid grid;
  std::vector<cplx> values;
  /// Set by forward_transform when |f^| at the grid edge is not negligible.
  bool aliasing_warning = false;

  FrequencySignal(FrequencyGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    detail::require(values.size() == grid.size(), "FrequencySignal: values length must equal grid size");
    for (const auto& z : values) {
      detail::require(std::isfinite(z.real()) && std::isfinite(z.imag()), "FrequencySignal: non-finite sample");
    }
  }

  template <class F>
  static FrequencySignal sample(const FrequencyGrid& g, F&& fhat) {
    std::vector<cplx> v(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) v[j] = cplx(fhat(g.node(j)));
    return {g, std::move(v)};
  }

  static FrequencySignal zero(const FrequencyGrid& g) { return {g, std::vector<cplx>(g.size())}; }

  bool is_zero() const {
    return std::all_of(values.begin(), values.end(), [](const cplx& z) { return z == cplx{}; });
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : values) m = std::max(m, std::abs(z));
    return m;
  }

  FrequencySignal scaled(cplx factor) const {
    FrequencySignal out = *this;
    for (auto& z : out.values) z *= factor;
    return out;
  }
};

struct SobolevParams {
  double s = 0.0;
};

/// Edge test shared by the transform and the signal constructors.
inline bool edge_aliasing(std::span<const cplx> values, double rel_tol = 1e-8) {
  if (values.empty()) return false;
  double peak = 0.0;
  for (const auto& z : values) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return false;
  return std::abs(values.front()) > rel_tol * peak || std::abs(values.back()) > rel_tol * peak;
}

/// Riemann-sum transform of samples f(x_k) on a uniform spatial grid.
inline FrequencySignal forward_transform(std::span<const double> x, std::span<const cplx> f,
                                         const FrequencyGrid& target) {
  detail::require(x.size() == f.size(), "forward_transform: x and f lengths differ");
  detail::require(x.size() >= 2, "forward_transform: need at least 2 spatial samples");
  const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  detail::require(dx > 0.0, "forward_transform: spatial grid must be increasing");
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (std::abs((x[k] - x[k - 1]) - dx) > 1e-9 * dx) {
      throw ValidationError("forward_transform: spatial grid is not uniform");
    }
  }
  std::vector<cplx> out(target.size());
  for (std::size_t j = 0; j < target.size(); ++j) {
    out[j] = dx * detail::phase_sum(f, x.front(), dx, -target.node(j));
  }
  FrequencySignal sig(target, std::move(out));
  sig.aliasing_warning = edge_aliasing(sig.values);
  return sig;
}

/// f(x) = (1/2pi) sum_j exp(i x xi_j) f^(xi_j) dxi at each requested x.
inline std::vector<cplx> inverse_transform(const FrequencySignal& sig, std::span<const double> x) {
  const double dxi = sig.grid.delta();
  std::vector<cplx> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = dxi / kTwoPi * detail::phase_sum(sig.values, sig.grid.node(0), dxi, x[k]);
  }
  return out;
}

/// ((1/2pi) sum_j (1+xi_j^2)^s |f^(xi_j)|^2 dxi)^(1/2).
inline double sobolev_norm(const FrequencySignal& sig, SobolevParams p = {}) {
  detail::require(std::isfinite(p.s), "sobolev_norm: s must be finite");
  const double dxi = sig.grid.delta();
  double acc = 0.0;
  for (std::size_t j = 0; j < sig.values.size(); ++j) {
    const double a2 = std::norm(sig.values[j]);
    if (a2 == 0.0) continue;
    const double xi = sig.grid.node(j);
    acc += (p.s == 0.0 ? 1.0 : std::pow(1.0 + xi * xi, p.s)) * a2;
  }
  return std::sqrt(acc * dxi / kTwoPi);
}

/// exp(1 - 1/(1 - u^2)) on |u| < 1, zero elsewhere; equals 1 at u = 0.
inline double mollifier(double u) {
  const double a = 1.0 - u * u;
  if (a <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / a);
}

/// Smooth compactly supported profiles.
///   origin:  psi0(xi) = mollifier(xi / delta), support [-delta, delta]
///   annular: psi(xi)  = mollifier((|xi| - 5/4) / (3/4)), support 1/2 < |xi| < 2
class BumpProfile {
 public:
  enum class Kind { origin, annular };

  static BumpProfile origin(double radius = 0.1) {
    detail::require(radius > 0.0 && std::isfinite(radius), "BumpProfile: support radius must be positive");
    return BumpProfile(Kind::origin, radius);
  }
  static BumpProfile annular() { return BumpProfile(Kind::annular, 2.0); }

  Kind kind() const { return kind_; }
  /// delta for the origin bump, 2 for the annular one.
  double support_radius() const { return radius_; }

  double operator()(double xi) const {
    if (kind_ == Kind::origin) return mollifier(xi / radius_);
    return mollifier((std::abs(xi) - 1.25) / 0.75);
  }

  /// Integral of psi, midpoint rule on 2^16 cells over the support.
  double integral() const { return moment(1); }
  /// Integral of psi^2.
  double l2_squared() const { return moment(2); }

  std::string name() const { return kind_ == Kind::origin ? "origin" : "annular"; }

 private:
  BumpProfile(Kind k, double r) : kind_(k), radius_(r) {}

  double moment(int power) const {
    constexpr std::size_t n = 1u << 16;
    const double lo = -radius_, hi = radius_;
    const double h = (hi - lo) / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = (*this)(lo + (static_cast<double>(j) + 0.5) * h);
      acc += power == 1 ? v : v * v;
    }
    return acc * h;
  }

  Kind kind_;
  double radius_;
};

}  // namespace fraclab
