#pragma once
//
// alpha-dimensional measures on I = [-1, 1] stored as sorted weighted atoms.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

class FrostmanMeasure {
 public:
  /// Atoms must be sorted, inside I, with positive weights.
  FrostmanMeasure(double alpha, std::vector<double> positions, std::vector<double> weights, std::string kind)
      : alpha_(alpha), x_(std::move(positions)), w_(std::move(weights)), kind_(std::move(kind)) {
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0, "FrostmanMeasure: alpha must lie in (0, 1]");
    detail::require(!x_.empty() && x_.size() == w_.size(), "FrostmanMeasure: atom arrays empty or misaligned");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      detail::require(x_[i] >= -1.0 && x_[i] <= 1.0, "FrostmanMeasure: atom outside I");
      detail::require(w_[i] > 0.0 && std::isfinite(w_[i]), "FrostmanMeasure: weights must be positive");
      if (i > 0) detail::require(x_[i] > x_[i - 1], "FrostmanMeasure: atoms must be strictly increasing");
    }
    prefix_.resize(x_.size() + 1, 0.0);
    for (std::size_t i = 0; i < x_.size(); ++i) prefix_[i + 1] = prefix_[i] + w_[i];
    spacing_ = 2.0;
    for (std::size_t i = 1; i < x_.size(); ++i) spacing_ = std::min(spacing_, x_[i] - x_[i - 1]);
  }

  double alpha() const { return alpha_; }
  std::size_t size() const { return x_.size(); }
  std::span<const double> positions() const { return x_; }
  std::span<const double> weights() const { return w_; }
  double total_mass() const { return prefix_.back(); }
  const std::string& kind() const { return kind_; }
  /// Smallest gap between consecutive atoms (2 for a single atom).
  double atom_spacing() const { return spacing_; }

  /// Sum of weights with |x_i - x| <= r.
  double ball_mass(double x, double r) const {
    detail::require(r > 0.0, "ball_mass: r must be positive");
    auto lo = std::lower_bound(x_.begin(), x_.end(), x - r);
    auto hi = std::upper_bound(x_.begin(), x_.end(), x + r);
    return prefix_[static_cast<std::size_t>(hi - x_.begin())] - prefix_[static_cast<std::size_t>(lo - x_.begin())];
  }

  /// min of the two gaps adjacent to the atom nearest x.
  double local_spacing(double x) const {
    if (x_.size() == 1) return 2.0;
    auto it = std::lower_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == x_.size() || (i > 0 && x - x_[i - 1] < x_[i] - x)) --i;
    double g = 2.0;
    if (i > 0) g = std::min(g, x_[i] - x_[i - 1]);
    if (i + 1 < x_.size()) g = std::min(g, x_[i + 1] - x_[i]);
    return g;
  }

  bool uniformly_spaced(double rel_tol = 1e-9) const {
    if (x_.size() < 3) return true;
    const double h = (x_.back() - x_.front()) / static_cast<double>(x_.size() - 1);
    for (std::size_t i = 1; i < x_.size(); ++i) {
      if (std::abs(x_[i] - x_[i - 1] - h) > rel_tol * h) return false;
    }
    return true;
  }

  /// Filled by the builders (or certify_frostman()).
  double frostman_c = 0.0;

 private:
  double alpha_;
  std::vector<double> x_, w_, prefix_;
  std::string kind_;
  double spacing_ = 2.0;
};

/// max of ball_mass(x, r) / r^alpha over centres x in I and dyadic r = 2^-k
/// in [4 * local atom spacing, 2]. Centres are an offset uniform grid of
/// `sample_count` points plus the atoms themselves nudged off-atom; for very
/// large measures the atom centres are strided.
inline double frostman_constant(const FrostmanMeasure& mu, std::size_t sample_count) {
  detail::require(sample_count >= 1000, "frostman_constant: sample_count must be at least 1000");
  const double alpha = mu.alpha();
  double best = 0.0;
  auto probe = [&](double x) {
    // r = 2 is always probed so sparse atom sets still get a constant
    const double floor = 4.0 * mu.local_spacing(x);
    double r = 2.0;
    do {
      best = std::max(best, mu.ball_mass(x, r) / std::pow(r, alpha));
      r *= 0.5;
    } while (r >= floor);
  };
  for (std::size_t k = 0; k < sample_count; ++k) {
    probe(-1.0 + 2.0 * (static_cast<double>(k) + 0.318) / static_cast<double>(sample_count));
  }
  const auto pos = mu.positions();
  const std::size_t stride = std::max<std::size_t>(1, pos.size() / 65536);
  for (std::size_t i = 0; i < pos.size(); i += stride) {
    probe(std::clamp(pos[i] + 0.37 * mu.local_spacing(pos[i]), -1.0, 1.0));
  }
  return best;
}

inline FrostmanMeasure& certify_frostman(FrostmanMeasure& mu, std::size_t sample_count = 2048) {
  mu.frostman_c = frostman_constant(mu, sample_count);
  return mu;
}

namespace detail {
// sign(x)|x|^alpha / alpha, an antiderivative of |x|^(alpha-1).
inline double power_cdf(double x, double alpha) {
  const double v = std::pow(std::abs(x), alpha) / alpha;
  return x < 0.0 ? -v : v;
}
}  // namespace detail

/// |x|^(alpha-1) dx atomized over the cells of an increasing partition of I:
/// one atom per cell at its midpoint carrying the exact cell mass.
inline FrostmanMeasure build_power_measure(double alpha, std::span<const double> breakpoints) {
  detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0, "build_power_measure: alpha must lie in (0, 1]");
  detail::require(breakpoints.size() >= 2, "build_power_measure: need at least one cell");
  detail::require(breakpoints.front() == -1.0 && breakpoints.back() == 1.0, "build_power_measure: partition must span I");
  std::vector<double> x, w;
  x.reserve(breakpoints.size() - 1);
  w.reserve(breakpoints.size() - 1);
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k], b = breakpoints[k + 1];
    detail::require(b > a, "build_power_measure: partition must be increasing");
    x.push_back(0.5 * (a + b));
    w.push_back(alpha == 1.0 ? b - a : detail::power_cdf(b, alpha) - detail::power_cdf(a, alpha));
  }
  FrostmanMeasure mu(alpha, std::move(x), std::move(w), alpha == 1.0 ? "lebesgue" : "power");
  certify_frostman(mu);
  return mu;
}

inline std::vector<double> uniform_partition(std::size_t cells) {
  std::vector<double> b(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) b[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(cells);
  b.back() = 1.0;
  return b;
}

inline FrostmanMeasure build_power_measure(double alpha, std::size_t atom_count) {
  detail::require(atom_count >= 100, "build_power_measure: atom_count must be at least 100");
  const auto b = uniform_partition(atom_count);
  return build_power_measure(alpha, b);
}

/// A uniform partition of I with [lo, hi] replaced by at least `min_cells` cells.
inline std::vector<double> refined_partition(std::size_t base_cells, double lo, double hi, std::size_t min_cells) {
  detail::require(-1.0 <= lo && lo < hi && hi <= 1.0, "refined_partition: window must lie inside I");
  std::vector<double> b;
  for (double v : uniform_partition(base_cells)) {
    if (v < lo || v > hi) b.push_back(v);
  }
  for (std::size_t k = 0; k <= min_cells; ++k) {
    b.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(min_cells));
  }
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  const double tiny = 1e-3 * (hi - lo) / static_cast<double>(min_cells);
  for (double v : b) {
    if (out.empty() || v - out.back() > tiny) out.push_back(v);
  }
  out.front() = -1.0;
  out.back() = 1.0;
  return out;
}

/// Self-similar Cantor measure: 2^depth equal atoms at the midpoints of the
/// generation-`depth` intervals of the two-map Cantor construction on I.
inline FrostmanMeasure build_cantor_measure(double ratio, int depth) {
  detail::require(std::isfinite(ratio) && ratio > 0.0 && ratio < 0.5, "build_cantor_measure: ratio must lie in (0, 1/2)");
  detail::require(depth >= 0 && depth <= 30, "build_cantor_measure: depth must lie in [0, 30]");
  std::vector<double> left{-1.0};
  double len = 2.0;
  for (int d = 0; d < depth; ++d) {
    const double sub = len * ratio;
    std::vector<double> next;
    next.reserve(left.size() * 2);
    for (double a : left) {
      next.push_back(a);
      next.push_back(a + len - sub);
    }
    left.swap(next);
    len = sub;
  }
  std::vector<double> x(left.size()), w(left.size(), std::ldexp(1.0, -depth));
  for (std::size_t i = 0; i < left.size(); ++i) x[i] = left[i] + 0.5 * len;
  FrostmanMeasure mu(std::log(2.0) / std::log(1.0 / ratio), std::move(x), std::move(w), "cantor");
  certify_frostman(mu);
  return mu;
}

/// The atoms of mu inside the open interval (lo, hi), same alpha and weights.
inline FrostmanMeasure restrict_to(const FrostmanMeasure& mu, double lo, double hi) {
  std::vector<double> x, w;
  const auto pos = mu.positions();
  const auto wt = mu.weights();
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] > lo && pos[i] < hi) {
      x.push_back(pos[i]);
      w.push_back(wt[i]);
    }
  }
  if (x.empty()) throw ValidationError("restrict_to: no atoms in the interval");
  FrostmanMeasure out(mu.alpha(), std::move(x), std::move(w), mu.kind() + "_restricted");
  out.frostman_c = mu.frostman_c;
  return out;
}

/// (sum_i w_i v_i^2)^(1/2).
inline double integrate_l2_mu(std::span<const double> values, const FrostmanMeasure& mu) {
  detail::require(values.size() == mu.size(), "integrate_l2_mu: values length must equal atom count");
  const auto w = mu.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += w[i] * values[i] * values[i];
  return std::sqrt(acc);
}

}  // namespace fraclab
