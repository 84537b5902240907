#pragma once
//
// Curves gamma(x, t) with gamma(x, 0) = x, Hoelder of order kappa in t and
// bilipschitz in x, together with numerical certification of (C1, C2).
//

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

class CurveFamily {
 public:
  enum class Kind { vertical, power, shifted_power, user };
  using Fn = std::function<double(double, double)>;

  static CurveFamily vertical() { return CurveFamily(Kind::vertical, 1.0, 0.0, {}, "vertical"); }

  /// x - sign(t)|t|^kappa. Odd in t so that negative times are defined.
  static CurveFamily power(double kappa) { return shifted_power(kappa, 1.0, "power"); }

  static CurveFamily shifted_power(double kappa, double amplitude, std::string name = "shifted_power") {
    check_kappa(kappa);
    detail::require(std::isfinite(amplitude), "CurveFamily: amplitude must be finite");
    CurveFamily c(Kind::shifted_power, kappa, amplitude, {}, std::move(name));
    if (c.name_ == "power") c.kind_ = Kind::power;
    return c;
  }

  static CurveFamily user(double kappa, Fn gamma, std::string name = "user") {
    check_kappa(kappa);
    detail::require(static_cast<bool>(gamma), "CurveFamily: user curve needs a callable");
    for (double x : {-1.0, -0.37, 0.0, 0.5, 1.0}) {
      if (gamma(x, 0.0) != x) throw ValidationError("CurveFamily: user curve must satisfy gamma(x,0)=x");
    }
    return CurveFamily(Kind::user, kappa, 0.0, std::move(gamma), std::move(name));
  }

  Kind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  double amplitude() const { return amplitude_; }
  const std::string& name() const { return name_; }

  double operator()(double x, double t) const {
    if (!(t >= -1.0 && t <= 1.0)) throw DomainError("curve_eval: t must lie in [-1, 1]");
    return eval_unchecked(x, t);
  }

  double eval_unchecked(double x, double t) const {
    switch (kind_) {
      case Kind::vertical:
        return x;
      case Kind::power:
      case Kind::shifted_power: {
        if (t == 0.0) return x;
        const double a = std::abs(t);
        const double p = kappa_ == 1.0 ? a : std::pow(a, kappa_);
        return x - amplitude_ * (t < 0.0 ? -p : p);
      }
      case Kind::user:
        return gamma_(x, t);
    }
    return x;
  }

  /// Certified constants; absent until certify() has run.
  std::optional<double> C1;
  std::optional<double> C2;

 private:
  CurveFamily(Kind k, double kappa, double a, Fn g, std::string name)
      : kind_(k), kappa_(kappa), amplitude_(a), gamma_(std::move(g)), name_(std::move(name)) {}

  static void check_kappa(double kappa) {
    detail::require(std::isfinite(kappa) && kappa > 0.0 && kappa <= 1.0, "CurveFamily: kappa must lie in (0, 1]");
  }

  Kind kind_;
  double kappa_;
  double amplitude_;
  Fn gamma_;
  std::string name_;
};

inline double curve_eval(const CurveFamily& c, double x, double t) { return c(x, t); }

struct CurveCertificate {
  double C1_est = 0.0;
  double C2_est = 1.0;
  bool pass = false;
};

/// Empirical Hoelder and bilipschitz constants. A symmetric node set on
/// [-1, 1] that contains 0 and +-1 is scanned pairwise, then `sample_count`
/// random triples are added for each constant.
inline CurveCertificate verify_curve_class(const CurveFamily& c, std::size_t sample_count, std::uint64_t seed = 0) {
  detail::require(sample_count >= 1000, "verify_curve_class: sample_count must be at least 1000");
  std::size_t g = static_cast<std::size_t>(std::sqrt(static_cast<double>(sample_count)));
  if (g % 2 == 0) ++g;
  std::vector<double> nodes(g);
  for (std::size_t i = 0; i < g; ++i) nodes[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(g - 1);

  const double kappa = c.kappa();
  CurveCertificate out;
  auto holder = [&](double x, double t, double tp) {
    if (t == tp) return;
    const double r = std::abs(c(x, t) - c(x, tp)) / std::pow(std::abs(t - tp), kappa);
    out.C1_est = std::max(out.C1_est, r);
  };
  auto bilip = [&](double t, double x, double xp) {
    if (x == xp) return;
    const double r = std::abs(c(x, t) - c(xp, t)) / std::abs(x - xp);
    out.C2_est = std::max(out.C2_est, std::max(r, 1.0 / r));
  };

  const double probe_x[] = {-1.0, -0.5, 0.0, 0.31, 1.0};
  for (double x : probe_x) {
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = a + 1; b < g; ++b) holder(x, nodes[a], nodes[b]);
    }
  }
  for (double t : {-1.0, -0.5, 0.0, 0.27, 1.0}) {
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = a + 1; b < g; ++b) bilip(t, nodes[a], nodes[b]);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 0; k < sample_count; ++k) {
    holder(u(rng), u(rng), u(rng));
    bilip(u(rng), u(rng), u(rng));
  }
  out.pass = std::isfinite(out.C1_est) && std::isfinite(out.C2_est);
  return out;
}

/// Copy of `c` with C1, C2 filled in from verify_curve_class.
inline CurveFamily certified(const CurveFamily& c, std::size_t sample_count = 4000, std::uint64_t seed = 0) {
  const CurveCertificate cert = verify_curve_class(c, sample_count, seed);
  if (!cert.pass) throw ValidationError("curve " + c.name() + " failed class certification");
  CurveFamily out = c;
  out.C1 = cert.C1_est;
  out.C2 = cert.C2_est;
  return out;
}

}  // namespace fraclab
