#pragma once
//
// Dispersion symbols Phi (|xi|^m or a caller-supplied C^2 function) and the
// evolution S_t f(x) = (1/2pi) int exp(i(x xi + t Phi(xi))) f^(xi) dxi.
//

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/spectral_core.hpp"

namespace fraclab {

struct SpaceTimePoint {
  double x = 0.0;
  double t = 0.0;
};

class DispersionSymbol {
 public:
  enum class Kind { power, general, table };
  using Fn = std::function<double(double)>;

  static DispersionSymbol power(double m) {
    detail::require(std::isfinite(m) && m > 1.0, "DispersionSymbol: power symbol needs m > 1");
    DispersionSymbol s;
    s.kind_ = Kind::power;
    s.m_ = m;
    return s;
  }

  /// Arbitrary Phi with caller-supplied derivatives. `m` is the growth order
  /// used in the lower bound |xi|^(2-m) |Phi''| >= C3.
  static DispersionSymbol general(double m, Fn phi, Fn dphi, Fn d2phi = {}, std::string name = "general") {
    detail::require(std::isfinite(m) && m > 1.0, "DispersionSymbol: growth order m must exceed 1");
    detail::require(static_cast<bool>(phi) && static_cast<bool>(dphi),
                    "DispersionSymbol: general symbol needs Phi and Phi'");
    DispersionSymbol s;
    s.kind_ = Kind::general;
    s.m_ = m;
    s.phi_ = std::move(phi);
    s.dphi_ = std::move(dphi);
    s.d2phi_ = std::move(d2phi);
    s.name_ = std::move(name);
    return s;
  }

  /// Tabulated Phi on increasing nodes. Phi and Phi' are cubic Hermite
  /// interpolants of (phi, dphi) and (dphi, d2phi); Phi'' is piecewise linear.
  static DispersionSymbol table(double m, std::vector<double> xi, std::vector<double> phi, std::vector<double> dphi,
                                std::vector<double> d2phi) {
    const std::size_t n = xi.size();
    detail::require(n >= 2, "DispersionSymbol: table needs at least 2 nodes");
    detail::require(phi.size() == n && dphi.size() == n, "DispersionSymbol: table columns differ in length");
    detail::require(d2phi.empty() || d2phi.size() == n, "DispersionSymbol: d2phi length mismatch");
    for (std::size_t i = 1; i < n; ++i) {
      detail::require(xi[i] > xi[i - 1], "DispersionSymbol: table nodes must be strictly increasing");
    }
    auto tab = std::make_shared<Table>(Table{std::move(xi), std::move(phi), std::move(dphi), std::move(d2phi)});
    Fn p = [tab](double x) { return tab->hermite(x, tab->phi, tab->dphi); };
    Fn d = [tab](double x) {
      return tab->d2phi.empty() ? tab->linear(x, tab->dphi) : tab->hermite(x, tab->dphi, tab->d2phi);
    };
    Fn d2;
    if (!tab->d2phi.empty()) d2 = [tab](double x) { return tab->linear(x, tab->d2phi); };
    DispersionSymbol s = general(m, std::move(p), std::move(d), std::move(d2), "table");
    s.kind_ = Kind::table;
    s.table_ = std::move(tab);
    return s;
  }

  Kind kind() const { return kind_; }
  double order() const { return m_; }
  const std::string& name() const { return name_; }
  bool has_second_derivative() const { return kind_ == Kind::power || static_cast<bool>(d2phi_); }

  double phi(double xi) const {
    if (kind_ == Kind::power) {
      const double a = std::abs(xi);
      return m_ == 2.0 ? a * a : std::pow(a, m_);
    }
    return phi_(xi);
  }

  double dphi(double xi) const {
    if (kind_ == Kind::power) {
      const double a = std::abs(xi);
      const double mag = m_ == 2.0 ? 2.0 * a : m_ * std::pow(a, m_ - 1.0);
      return xi < 0.0 ? -mag : mag;
    }
    return dphi_(xi);
  }

  double d2phi(double xi) const {
    if (kind_ == Kind::power) {
      if (m_ == 2.0) return 2.0;
      return m_ * (m_ - 1.0) * std::pow(std::abs(xi), m_ - 2.0);
    }
    if (!d2phi_) throw ValidationError("DispersionSymbol: no second derivative supplied");
    return d2phi_(xi);
  }

  /// max |Phi'| over [lo, hi]. Closed form for power symbols, sampled otherwise.
  double max_abs_dphi(double lo, double hi) const {
    if (kind_ == Kind::power) return std::abs(dphi(std::max(std::abs(lo), std::abs(hi))));
    constexpr int n = 4097;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      best = std::max(best, std::abs(dphi(lo + (hi - lo) * i / (n - 1))));
    }
    return best;
  }

  /// Table nodes, when this symbol was built from a table (serialization).
  struct Table {
    std::vector<double> xi, phi, dphi, d2phi;

    std::size_t locate(double x) const {
      if (!(x >= xi.front() && x <= xi.back())) {
        throw DomainError("DispersionSymbol: xi outside tabulated range");
      }
      auto it = std::upper_bound(xi.begin(), xi.end(), x);
      std::size_t i = static_cast<std::size_t>(it - xi.begin());
      return std::clamp<std::size_t>(i, 1, xi.size() - 1) - 1;
    }
    double hermite(double x, const std::vector<double>& y, const std::vector<double>& dy) const {
      const std::size_t i = locate(x);
      const double h = xi[i + 1] - xi[i];
      const double u = (x - xi[i]) / h;
      const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
      const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
      return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
    }
    double linear(double x, const std::vector<double>& y) const {
      const std::size_t i = locate(x);
      const double u = (x - xi[i]) / (xi[i + 1] - xi[i]);
      return (1 - u) * y[i] + u * y[i + 1];
    }
  };
  const Table* table_data() const { return table_.get(); }

  /// Certified constants, present after certify().
  std::optional<double> c3;
  std::optional<double> c4;

 private:
  DispersionSymbol() = default;

  Kind kind_ = Kind::power;
  double m_ = 2.0;
  Fn phi_, dphi_, d2phi_;
  std::string name_ = "power";
  std::shared_ptr<const Table> table_;
};

struct SymbolCheck {
  bool pass = false;
  double c3_est = 0.0;
  double c4_est = 0.0;
  std::size_t samples_used = 0;
  std::string report;
};

/// Empirical infima of |xi|^(2-m)|Phi''| and |xi||Phi''|/|Phi'| over samples with |xi| >= 1.
inline SymbolCheck validate_symbol(const DispersionSymbol& sym, std::span<const double> xi_samples) {
  if (!sym.has_second_derivative()) {
    throw ValidationError("validate_symbol: symbol lacks second-derivative data");
  }
  SymbolCheck out;
  out.c3_est = std::numeric_limits<double>::infinity();
  out.c4_est = std::numeric_limits<double>::infinity();
  const double m = sym.order();
  for (double xi : xi_samples) {
    const double a = std::abs(xi);
    if (!(a >= 1.0) || !std::isfinite(a)) continue;
    ++out.samples_used;
    const double d2 = std::abs(sym.d2phi(xi));
    out.c3_est = std::min(out.c3_est, std::pow(a, 2.0 - m) * d2);
    const double d1 = std::abs(sym.dphi(xi));
    if (d1 > 0.0) out.c4_est = std::min(out.c4_est, a * d2 / d1);
  }
  if (out.samples_used == 0) {
    throw ValidationError("validate_symbol: no samples with |xi| >= 1");
  }
  constexpr double floor = 1e-6;
  out.pass = out.c3_est >= floor && out.c4_est >= floor;
  if (!out.pass) {
    std::ostringstream os;
    os << "symbol fails the convexity bounds on |xi|>=1: C3_est=" << out.c3_est << " C4_est=" << out.c4_est;
    out.report = os.str();
  }
  return out;
}

/// Copy of `sym` with C3, C4 filled in; throws if the bounds fail.
inline DispersionSymbol certify(const DispersionSymbol& sym, std::span<const double> xi_samples) {
  SymbolCheck chk = validate_symbol(sym, xi_samples);
  if (!chk.pass) throw ValidationError(chk.report);
  DispersionSymbol out = sym;
  out.c3 = chk.c3_est;
  out.c4 = chk.c4_est;
  return out;
}

/// values[j] <- exp(i t Phi(xi_j)) values[j].
inline FrequencySignal propagate_grid(const FrequencySignal& sig, double t, const DispersionSymbol& sym) {
  detail::require(std::isfinite(t), "propagate_grid: t must be finite");
  FrequencySignal out = sig;
  if (t == 0.0) return out;
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    out.values[j] *= std::polar(1.0, t * sym.phi(sig.grid.node(j)));
  }
  return out;
}

/// Largest per-node phase advance allowed by evaluate_field.
inline constexpr double kMaxPhaseAdvance = kPi / 4.0;

/// (1/2pi) sum_j exp(i(x xi_j + t Phi(xi_j))) f^(xi_j) dxi, summed in node order.
inline cplx evaluate_field(const FrequencySignal& sig, SpaceTimePoint p, const DispersionSymbol& sym) {
  detail::require(std::isfinite(p.x) && std::isfinite(p.t), "evaluate_field: point must be finite");
  const FrequencyGrid& g = sig.grid;
  const double dxi = g.delta();
  const double speed = p.t == 0.0 ? 0.0 : sym.max_abs_dphi(g.xi_min(), g.xi_max());
  const double advance = (std::abs(p.x) + std::abs(p.t) * speed) * dxi;
  if (advance > kMaxPhaseAdvance) {
    std::ostringstream os;
    os << "evaluate_field: grid too coarse (phase advance per node " << advance << " > pi/4 at x=" << p.x
       << ", t=" << p.t << ")";
    throw ResolutionError(os.str());
  }
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < sig.values.size(); ++j) {
    const cplx v = sig.values[j];
    if (v == cplx{}) continue;
    const double xi = g.node(j);
    const double ph = p.x * xi + (p.t == 0.0 ? 0.0 : p.t * sym.phi(xi));
    const double c = std::cos(ph), s = std::sin(ph);
    re += v.real() * c - v.imag() * s;
    im += v.real() * s + v.imag() * c;
  }
  return cplx{re, im} * (dxi / kTwoPi);
}

/// Repeated evaluation of S_t f at scattered points.
///
/// Caches Phi on the signal grid. For each time slice the sum runs on the
/// coarsest odd-stride subgrid of midpoints whose per-node phase advance,
/// including a data-extent margin, stays below pi/8; exact-zero runs of the
/// signal are skipped. The full grid must itself pass evaluate_field's rule.
class FieldEvaluator {
 public:
  struct Run {
    std::size_t begin;  // index into coeffs
    std::size_t length;
    double xi0;  // first node of the run
  };

  class Slice {
   public:
    double t = 0.0;
    std::size_t stride = 1;
    double dxi = 0.0;  // coarse spacing
    std::vector<cplx> coeffs;
    std::vector<Run> runs;

    // Optional block expansion, valid for |y| <= y_max: each run is cut into
    // blocks of `block` nodes with centre c_b and
    //   sum_{j in b} p_j e^{i y xi_j} = e^{i y c_b} sum_r a_{b,r} (i y h)^r,
    // a_{b,r} = sum_j p_j u_j^r / r!, u_j = (xi_j - c_b) / h, |u_j| <= 1.
    static constexpr int kOrder = 24;
    double y_max = 0.0;
    double h = 0.0;
    std::size_t block = 0;
    std::vector<std::size_t> run_block;  // first block index of each run, plus end
    std::vector<cplx> moments;           // kOrder per block

    cplx at(double y) const {
      if (block > 0 && std::abs(y) <= y_max) return at_expanded(y);
      cplx acc{};
      for (const Run& r : runs) {
        acc += detail::phase_sum(std::span<const cplx>(coeffs).subspan(r.begin, r.length), r.xi0, dxi, y);
      }
      return acc;
    }

    void expand(double ymax) {
      y_max = ymax;
      h = 1.0 / std::max(ymax, 1e-9);
      block = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(2.0 * h / dxi)));
      run_block.assign(1, 0);
      moments.clear();
      for (const Run& r : runs) {
        const std::size_t nb = (r.length + block - 1) / block;
        for (std::size_t b = 0; b < nb; ++b) {
          const double centre_off = (static_cast<double>(block) - 1.0) * 0.5;
          cplx a[kOrder] = {};
          const std::size_t end = std::min(r.length, (b + 1) * block);
          for (std::size_t k = b * block; k < end; ++k) {
            const double u = (static_cast<double>(k - b * block) - centre_off) * dxi / h;
            cplx term = coeffs[r.begin + k];
            for (int q = 0; q < kOrder; ++q) {
              a[q] += term;
              term *= u / static_cast<double>(q + 1);
            }
          }
          moments.insert(moments.end(), a, a + kOrder);
        }
        run_block.push_back(run_block.back() + nb);
      }
    }

   private:
    cplx at_expanded(double y) const {
      const cplx z{0.0, y * h};
      std::vector<cplx> local;
      cplx acc{};
      for (std::size_t ri = 0; ri < runs.size(); ++ri) {
        const std::size_t b0 = run_block[ri], b1 = run_block[ri + 1];
        local.resize(b1 - b0);
        for (std::size_t b = b0; b < b1; ++b) {
          const cplx* a = &moments[b * kOrder];
          cplx v = a[kOrder - 1];
          for (int q = kOrder - 2; q >= 0; --q) v = v * z + a[q];
          local[b - b0] = v;
        }
        const double c0 = runs[ri].xi0 + (static_cast<double>(block) - 1.0) * 0.5 * dxi;
        acc += detail::phase_sum(local, c0, static_cast<double>(block) * dxi, y);
      }
      return acc;
    }
  };

  FieldEvaluator(const FrequencySignal& sig, const DispersionSymbol& sym, double data_extent = 1.0)
      : sig_(&sig), sym_(&sym), data_extent_(data_extent) {
    const std::size_t n = sig.values.size();
    phi_.resize(n);
    for (std::size_t j = 0; j < n; ++j) phi_[j] = sym.phi(sig.grid.node(j));
    speed_ = sym.max_abs_dphi(sig.grid.xi_min(), sig.grid.xi_max());
    peak_ = sig.max_abs();
    first_nz_ = n;
    last_nz_ = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (sig.values[j] != cplx{}) {
        first_nz_ = std::min(first_nz_, j);
        last_nz_ = j;
      }
      if (std::abs(sig.grid.node(j)) <= 1.0) origin_mass_ = std::max(origin_mass_, std::abs(sig.values[j]));
    }
    const double m = sym.order();
    singular_ = sym.kind() == DispersionSymbol::Kind::power && std::fmod(m, 2.0) != 0.0;
  }

  double max_speed() const { return speed_; }

  /// Stride used for a slice at time t covering |y| <= y_max.
  std::size_t stride_for(double t, double y_max) const {
    const double dxi = sig_->grid.delta();
    const double full = (y_max + std::abs(t) * speed_) * dxi;
    if (full > kMaxPhaseAdvance) {
      std::ostringstream os;
      os << "FieldEvaluator: grid too coarse (phase advance " << full << " > pi/4 at t=" << t << ", |y|<=" << y_max
         << ")";
      throw ResolutionError(os.str());
    }
    if (first_nz_ > last_nz_) return 1;
    const double per_node = (y_max + data_extent_ + std::abs(t) * speed_) * dxi;
    std::size_t q = per_node > 0.0 ? static_cast<std::size_t>(std::floor((kPi / 8.0) / per_node)) : 1;
    const std::size_t support = last_nz_ - first_nz_ + 1;
    q = std::min(q, std::max<std::size_t>(1, support / 256));
    // |xi|^m is not smooth at 0 unless m is even, so S_t f has a tail of size
    // about |f(0)| |t| Gamma(m+1) / pi |x|^-(m+1); a stride q folds it back
    // from distance 2 pi / (q dxi).
    if (singular_ && origin_mass_ > 0.0 && t != 0.0) {
      const double m = sym_->order();
      const double amp = 2.0 * origin_mass_ * std::abs(t) * std::tgamma(m + 1.0) / kPi;
      const double reach = std::pow(amp / (kAliasTol * peak_), 1.0 / (m + 1.0)) + y_max + data_extent_;
      q = std::min(q, static_cast<std::size_t>(std::max(1.0, std::floor(kTwoPi / (reach * dxi)))));
    }
    if (q < 1) q = 1;
    if (q % 2 == 0) --q;
    while (q > 1 && !remainder_negligible(q)) q -= 2;
    return std::max<std::size_t>(q, 1);
  }

  /// `points` is the number of evaluations planned on this slice; when it
  /// makes the block expansion cheaper than direct sums, the slice is expanded.
  Slice slice(double t, double y_max, std::size_t points = 1) const {
    Slice s;
    s.t = t;
    s.stride = stride_for(t, y_max);
    const std::size_t q = s.stride;
    const FrequencyGrid& g = sig_->grid;
    s.dxi = g.delta() * static_cast<double>(q);
    if (first_nz_ > last_nz_) return s;
    const std::size_t n = sig_->values.size();
    const std::size_t n_coarse = n / q;
    const std::size_t half = (q - 1) / 2;
    const double w = s.dxi / kTwoPi;
    s.coeffs.resize(n_coarse);
    for (std::size_t i = 0; i < n_coarse; ++i) {
      const std::size_t j = q * i + half;
      const cplx v = sig_->values[j];
      s.coeffs[i] = v == cplx{} ? cplx{} : v * std::polar(w, t * phi_[j]);
    }
    // Runs separated by long stretches of exact zeros.
    constexpr std::size_t kGap = 64;
    std::size_t i = 0;
    while (i < n_coarse) {
      while (i < n_coarse && s.coeffs[i] == cplx{}) ++i;
      if (i == n_coarse) break;
      std::size_t end = i, zeros = 0;
      std::size_t k = i;
      for (; k < n_coarse; ++k) {
        if (s.coeffs[k] == cplx{}) {
          if (++zeros >= kGap) break;
        } else {
          zeros = 0;
          end = k;
        }
      }
      s.runs.push_back(Run{i, end - i + 1, g.node(q * i + half)});
      i = end + 1;
    }
    if (points > 1 && y_max > 0.0) {
      std::size_t active = 0;
      for (const Run& r : s.runs) active += r.length;
      const double blocks = static_cast<double>(active) * s.dxi * y_max / 2.0 + static_cast<double>(s.runs.size());
      const double direct = static_cast<double>(points) * static_cast<double>(active);
      const double expanded = Slice::kOrder * static_cast<double>(active) + static_cast<double>(points) * blocks * (Slice::kOrder + 4);
      if (expanded < 0.5 * direct) s.expand(y_max);
    }
    return s;
  }

  cplx eval(double y, double t) const { return slice(t, std::abs(y)).at(y); }

 private:
  bool remainder_negligible(std::size_t q) const {
    const std::size_t n = sig_->values.size();
    for (std::size_t j = (n / q) * q; j < n; ++j) {
      if (std::abs(sig_->values[j]) > 1e-13 * peak_) return false;
    }
    return true;
  }

  const FrequencySignal* sig_;
  const DispersionSymbol* sym_;
  double data_extent_;
  std::vector<double> phi_;
  double speed_ = 0.0;
  double peak_ = 0.0;
  std::size_t first_nz_ = 0, last_nz_ = 0;
  double origin_mass_ = 0.0;
  bool singular_ = false;
  static constexpr double kAliasTol = 1e-12;
};

struct UnitarityReport {
  double m = 0.0;
  std::size_t signals = 0;
  double max_norm_deviation = 0.0;  // relative, over signals and times
  double max_group_deviation = 0.0;  // relative to max |S_t f|
};

/// Random smooth signals supported in [-4, 4]: norm preservation of
/// propagate_grid and S_t S_t0 = S_(t+t0) at scattered points.
inline UnitarityReport unitarity_check(double m, std::size_t signals = 4, std::uint64_t seed = 0) {
  const auto sym = DispersionSymbol::power(m);
  const FrequencyGrid g(-4.0, 4.0, 4096);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  UnitarityReport r;
  r.m = m;
  r.signals = signals;
  const double times[] = {0.1, 0.37, -0.5, 1.0};
  for (std::size_t k = 0; k < signals; ++k) {
    cplx a[4];
    double b[4];
    for (int j = 0; j < 4; ++j) {
      a[j] = cplx(nd(rng), nd(rng));
      b[j] = 2.0 * ud(rng);
    }
    const auto f = FrequencySignal::sample(g, [&](double xi) {
      cplx v{};
      for (int j = 0; j < 4; ++j) v += a[j] * std::polar(1.0, b[j] * xi);
      return v * mollifier(xi / 4.0);
    });
    const double n0 = sobolev_norm(f);
    for (double t : times) {
      r.max_norm_deviation = std::max(r.max_norm_deviation, std::abs(sobolev_norm(propagate_grid(f, t, sym)) - n0) / n0);
    }
    const double t0 = 0.5 * ud(rng);
    const auto ft = propagate_grid(f, t0, sym);
    double peak = 0.0, dev = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double x = 2.0 * ud(rng), t = 0.45 * ud(rng);
      const cplx u = evaluate_field(ft, {x, t}, sym);
      const cplx v = evaluate_field(f, {x, t + t0}, sym);
      peak = std::max(peak, std::abs(v));
      dev = std::max(dev, std::abs(u - v));
    }
    r.max_group_deviation = std::max(r.max_group_deviation, dev / peak);
  }
  return r;
}

}  // namespace fraclab
