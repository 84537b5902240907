// fraclab: experiments for maximal estimates of dispersive flows along
// curves, restricted to fractal measures.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "fraclab/fraclab.hpp"
#include "fraclab/io.hpp"

using namespace fraclab;
using io::fmt;
using io::json;

namespace {

struct Flag {
  std::string key;
  char type;  // n number, s string, b switch
  CLI::Option* opt = nullptr;
  std::string text;
  bool on = false;
};

// Parameters of one subcommand: defaults < --config file < flags.
class Params {
 public:
  Params(CLI::App* app, json defaults) : app_(app), defaults_(std::move(defaults)) {
    app_->add_option("--config", config_path_, "JSON config file");
    app_->add_option("--out", out_path_, "output file (default stdout)");
    number("seed", "64-bit seed for sampling");
  }

  void number(const std::string& key, const std::string& help) { add(key, 'n', help); }
  void text(const std::string& key, const std::string& help) { add(key, 's', help); }
  void flag(const std::string& key, const std::string& help) { add(key, 'b', help); }

  json resolve() const {
    json cfg = defaults_;
    if (!cfg.contains("seed")) cfg["seed"] = 0;
    if (!config_path_.empty()) {
      json file = io::read_json_file(config_path_);
      if (!file.is_object()) throw ValidationError("config must be a JSON object");
      for (auto it = file.begin(); it != file.end(); ++it) cfg[it.key()] = it.value();
    }
    for (const auto& f : flags_) {
      if (f->type == 'b') {
        if (f->on) cfg[f->key] = true;
        continue;
      }
      if (f->opt->count() == 0) continue;
      if (f->type == 's') {
        cfg[f->key] = f->text;
      } else {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(f->text, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != f->text.size()) throw ValidationError("--" + f->key + ": not a number: " + f->text);
        cfg[f->key] = v;
      }
    }
    return cfg;
  }

  std::ostream& out() {
    if (out_path_.empty()) return std::cout;
    file_ = std::make_unique<std::ofstream>(out_path_);
    if (!*file_) throw ValidationError("cannot write " + out_path_);
    return *file_;
  }

 private:
  void add(const std::string& key, char type, const std::string& help) {
    auto f = std::make_unique<Flag>();
    f->key = key;
    f->type = type;
    std::string name = "--" + key;
    for (auto& ch : name) if (ch == '_') ch = '-';
    f->opt = type == 'b' ? app_->add_flag(name, f->on, help) : app_->add_option(name, f->text, help);
    flags_.push_back(std::move(f));
  }

  CLI::App* app_;
  json defaults_;
  std::string config_path_, out_path_;
  std::vector<std::unique_ptr<Flag>> flags_;
  std::unique_ptr<std::ofstream> file_;
};

double num(const json& cfg, const char* key) { return io::detail::number(cfg, key); }

std::string str(const json& cfg, const char* key) {
  const json& v = io::detail::field(cfg, key);
  if (!v.is_string()) throw ValidationError(std::string("config: field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t count(const json& cfg, const char* key, double lo, double hi) {
  const double v = num(cfg, key);
  if (!(v >= lo && v <= hi && v == std::floor(v))) {
    throw ValidationError(std::string(key) + " must be an integer in [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t seed_of(const json& cfg) {
  const json& v = io::detail::field(cfg, "seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const double d = num(cfg, "seed");
  if (!(d >= 0 && d == std::floor(d) && d < 1.8e19)) throw ValidationError("seed must be a nonnegative integer");
  return static_cast<std::uint64_t>(d);
}

std::vector<double> lambdas_of(const json& cfg) {
  const json& v = io::detail::field(cfg, "lambda");
  if (v.is_string()) return io::parse_lambdas(v.get<std::string>());
  if (v.is_number()) return {v.get<double>()};
  return io::detail::numbers(cfg, "lambda");
}

std::vector<double> s_list(const json& cfg) {
  const json& v = io::detail::field(cfg, "s");
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) {
    std::vector<double> out;
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double d = 0.0;
      try {
        d = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size() || !std::isfinite(d)) throw ValidationError("s: cannot parse '" + item + "'");
      out.push_back(d);
    }
    if (out.empty()) throw ValidationError("s: empty list");
    return out;
  }
  return io::detail::numbers(cfg, "s");
}

DispersionSymbol symbol_of(const json& cfg) {
  if (cfg.contains("symbol") && cfg["symbol"].is_object()) return io::symbol_from_json(cfg["symbol"]);
  return DispersionSymbol::power(num(cfg, "m"));
}

CurveFamily curve_of(const json& cfg) {
  if (cfg.contains("curve") && cfg["curve"].is_object()) return io::curve_from_json(cfg["curve"]);
  return CurveFamily::power(num(cfg, "kappa"));
}

FrostmanMeasure measure_of(const json& cfg) {
  if (cfg.contains("measure") && cfg["measure"].is_object()) return io::measure_from_json(cfg["measure"]);
  return build_power_measure(num(cfg, "alpha"), count(cfg, "atoms", 100, 1 << 24));
}

// Gaussian data f^(xi) = sqrt(2 pi) exp(-xi^2/2), resolved for |x| <= xmax, |t| <= tmax.
FrequencySignal gaussian_signal(const DispersionSymbol& sym, double xmax, double tmax) {
  const double speed = sym.max_abs_dphi(-12.0, 12.0);
  const auto g = FrequencyGrid::covering(-12.0, 12.0, (kPi / 8.0) / (xmax + 4.0 + tmax * speed), 512);
  return FrequencySignal::sample(g, [](double xi) { return std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi); });
}

int run_propagate(Params& p, const json& cfg) {
  const auto sym = symbol_of(cfg);
  const double t = num(cfg, "t"), x0 = num(cfg, "x_min"), x1 = num(cfg, "x_max");
  const std::size_t n = count(cfg, "points", 1, 1e7);
  const std::string src = str(cfg, "signal");
  const FrequencySignal f = src == "gaussian"   ? gaussian_signal(sym, std::max(std::abs(x0), std::abs(x1)), std::abs(t))
                            : src == "zero"     ? FrequencySignal::zero(FrequencyGrid(-1.0, 1.0, 64))
                                                : io::signal_from_json(io::read_json_file(src));
  json res;
  res["symbol"] = io::to_json(sym);
  res["grid"] = {{"xi_min", f.grid.xi_min()}, {"xi_max", f.grid.xi_max()}, {"n", f.grid.size()}};
  io::CsvWriter w(p.out(), "propagate", cfg, {"x", "t", "re", "im", "abs"}, res);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = n == 1 ? x0 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1);
    const cplx u = evaluate_field(f, {x, t}, sym);
    w.row(std::vector<double>{x, t, u.real(), u.imag(), std::abs(u)});
  }
  return 0;
}

int run_maximal(Params& p, const json& cfg) {
  const auto sym = symbol_of(cfg);
  const auto curve = certified(curve_of(cfg), 4000, seed_of(cfg));
  const std::string src = str(cfg, "signal");
  const double s = num(cfg, "s");
  const std::size_t n_t = count(cfg, "n_t", 2, 1 << 20);
  MaximalOptions opt;
  std::optional<FrequencySignal> f;
  std::optional<FrostmanMeasure> mu;
  std::optional<TimeGrid> tg;
  json res;
  if (src == "f1") {
    const double lam = num(cfg, "lambda");
    CounterexampleSpec spec(CounterexampleSpec::Family::f1, lam, sym.order(), curve.kappa(),
                            BumpProfile::origin(num(cfg, "delta")));
    f = make_f1(spec);
    mu = f1_measure(spec, num(cfg, "alpha"), count(cfg, "atoms", 100, 1 << 24), 64);
    tg = TimeGrid::counterexample_default(lam, n_t);
    opt.data_extent = std::max(1.0, 4.0 / (spec.delta() * std::pow(lam, 1.0 / spec.m)));
    res["psi0"] = io::to_json(spec.psi0);
  } else if (src == "band") {
    const double lam = num(cfg, "lambda");
    f = make_band_signal(lam, sym, seed_of(cfg));
    mu = measure_of(cfg);
    tg = TimeGrid::band_default(lam, sym.order());
  } else {
    mu = measure_of(cfg);
    tg = TimeGrid::uniform(num(cfg, "t_min"), num(cfg, "t_max"), n_t);
    const double tmax = std::max(std::abs(tg->t_min()), std::abs(tg->t_max()));
    if (src == "gaussian") {
      f = gaussian_signal(sym, 2.0, tmax);
      opt.data_extent = 4.0;
    } else if (src == "zero") {
      f = FrequencySignal::zero(FrequencyGrid(-1.0, 1.0, 64));
    } else {
      f = io::signal_from_json(io::read_json_file(src));
    }
  }
  // the ratio is undefined for f = 0; fail before any output
  if (f->is_zero()) throw ValidationError("maximal: the zero signal has no maximal ratio");
  const bool cert = cfg.value("certify", false);
  const MaximalProfile prof =
      cert ? certified_maximal_function(*f, curve, sym, *tg, *mu, opt) : maximal_function(*f, curve, sym, *tg, *mu, opt);
  const double hs = sobolev_norm(*f, {s});
  res["symbol"] = io::to_json(sym);
  res["curve"] = io::to_json(curve);
  res["measure"] = io::measure_summary(*mu);
  res["time_grid"] = {{"t_min", tg->t_min()}, {"t_max", tg->t_max()}, {"n_t", tg->n_t()}};
  io::CsvWriter w(p.out(), "maximal", cfg, {"x", "weight", "sup_value", "argmax_t"}, res);
  for (std::size_t i = 0; i < prof.x.size(); ++i) {
    w.row(std::vector<double>{prof.x[i], prof.weight[i], prof.sup_values[i], prof.argmax_t[i]});
  }
  w.footer("l2_mu", prof.l2_mu);
  w.footer("hs_norm", hs);
  w.footer("ratio", prof.l2_mu / hs);
  w.footer("refinement_level", prof.refinement_level);
  w.footer("converged", prof.converged ? 1 : 0);
  return 0;
}

void write_manifest(const json& cfg, const json& body) {
  if (!cfg.contains("manifest")) return;
  json j;
  j["schema_version"] = io::kSchemaVersion;
  j["config"] = cfg;
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  std::ofstream out(str(cfg, "manifest"));
  if (!out) throw ValidationError("cannot write manifest");
  out << j.dump(2) << '\n';
}

int run_scaling(Params& p, const json& cfg) {
  const std::string fam = str(cfg, "family");
  const double m = num(cfg, "m"), kappa = num(cfg, "kappa"), alpha = num(cfg, "alpha");
  check_exponents(m, kappa, alpha);
  const auto lams = lambdas_of(cfg);
  if (lams.size() < 4) throw ValidationError("scaling: need at least four lambdas");
  const auto svals = s_list(cfg);
  json manifest;
  manifest["family"] = fam;
  manifest["lambdas"] = lams;
  manifest["m"] = m;
  manifest["kappa"] = kappa;
  manifest["alpha"] = alpha;
  manifest["delta"] = num(cfg, "delta");
  json res = {{"psi0", io::to_json(BumpProfile::origin(num(cfg, "delta")))}};

  if (fam == "f1") {
    F1SweepConfig c;
    c.m = m, c.kappa = kappa, c.alpha = alpha, c.lambdas = lams, c.s_values = svals, c.delta = num(cfg, "delta");
    c.base_atoms = count(cfg, "atoms", 100, 1 << 22);
    c.n_t = count(cfg, "n_t", 2, 1 << 20);
    c.certify_time_grid = cfg.value("certify", false);
    const auto r = f1_scaling_sweep(c);
    const double pred = r.predicted_maximal_slope;
    std::vector<std::string> cols{"lambda", "value", "log_lambda", "log_value", "fitted_slope", "predicted_f1_exponent",
                                  "full_norm"};
    for (double s : svals) cols.push_back("hs_norm_s" + fmt(s));
    io::CsvWriter w(p.out(), "scaling", cfg, cols, res);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto& row = r.rows[i];
      std::vector<double> v{row.lambda, row.window_norm, std::log(row.lambda), std::log(row.window_norm),
                            r.window_fit.slope, pred, row.maximal_norm};
      v.insert(v.end(), row.hs_norms.begin(), row.hs_norms.end());
      w.row(v);
    }
    w.footer("slope", r.window_fit.slope);
    w.footer("intercept", r.window_fit.intercept);
    w.footer("max_residual", r.window_fit.max_residual);
    w.footer("predicted_f1_exponent", pred);
    w.footer("full_norm_slope", r.maximal_fit.slope);
    json hs = json::array();
    for (std::size_t k = 0; k < svals.size(); ++k) {
      w.footer("hs_slope_s" + fmt(svals[k]), r.hs_fits[k].slope);
      w.footer("predicted_hs_slope_s" + fmt(svals[k]), r.predicted_hs_slopes[k]);
      hs.push_back({{"s", svals[k]}, {"slope", r.hs_fits[k].slope}, {"predicted", r.predicted_hs_slopes[k]}});
    }
    manifest["grids"] = {{"time", "counterexample_default"}, {"n_t", c.n_t}, {"base_atoms", c.base_atoms},
                         {"window_atoms", c.window_atoms}};
    manifest["fits"] = {{"window_norm", {{"slope", r.window_fit.slope}, {"predicted", pred}}},
                        {"full_norm", {{"slope", r.maximal_fit.slope}, {"predicted", pred}}},
                        {"hs_norm", hs}};
  } else if (fam == "f2") {
    F2SweepConfig c;
    c.m = m, c.kappa = kappa, c.alpha = alpha, c.lambdas = lams, c.s_values = svals, c.delta = num(cfg, "delta");
    c.base_atoms = count(cfg, "atoms", 100, 1 << 22);
    const auto r = f2_sweep(c);
    std::vector<std::string> cols{"lambda", "min_along_graph", "l2_window", "max_t", "max_remainder"};
    for (double s : svals) {
      cols.push_back("hs_norm_s" + fmt(s));
      cols.push_back("ratio_s" + fmt(s));
    }
    io::CsvWriter w(p.out(), "scaling", cfg, cols, res);
    for (const auto& row : r.rows) {
      std::vector<double> v{row.lambda, row.bound.min_along_graph, row.bound.l2_window, row.bound.max_t,
                            row.bound.max_remainder};
      for (std::size_t k = 0; k < svals.size(); ++k) {
        v.push_back(row.hs_norms[k]);
        v.push_back(row.ratios[k]);
      }
      w.row(v);
    }
    w.footer("min_graph_variation", r.min_graph_variation);
    json fits = json::array();
    for (std::size_t k = 0; k < svals.size(); ++k) {
      w.footer("hs_slope_s" + fmt(svals[k]), r.hs_fits[k].slope);
      w.footer("predicted_hs_slope_s" + fmt(svals[k]), r.predicted_hs_slopes[k]);
      w.footer("ratio_slope_s" + fmt(svals[k]), r.ratio_fits[k].slope);
      fits.push_back({{"s", svals[k]},
                      {"hs_slope", r.hs_fits[k].slope},
                      {"predicted_hs_slope", r.predicted_hs_slopes[k]},
                      {"ratio_slope", r.ratio_fits[k].slope},
                      {"ratio_slope_bound", -r.predicted_hs_slopes[k]}});
    }
    manifest["grids"] = {{"base_atoms", c.base_atoms}, {"window_atoms", c.window_atoms}};
    manifest["fits"] = fits;
    manifest["min_graph_variation"] = r.min_graph_variation;
  } else if (fam == "band") {
    BandSweepConfig c;
    c.m = m, c.kappa = kappa, c.alpha = alpha, c.lambdas = lams, c.s = svals.front();
    c.seeds = count(cfg, "seeds", 1, 1024);
    c.seed = seed_of(cfg);
    c.atoms = count(cfg, "atoms", 100, 1 << 22);
    const auto r = band_ratio_sweep(c);
    const double bound = 0.5 - s_star(m, alpha, kappa);
    io::CsvWriter w(p.out(), "scaling", cfg,
                    {"lambda", "value", "log_lambda", "log_value", "fitted_slope", "half_minus_s_star"}, res);
    for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
      w.row(std::vector<double>{r.lambdas[i], r.mean_ratio[i], std::log(r.lambdas[i]), std::log(r.mean_ratio[i]),
                                r.fit.slope, bound});
    }
    w.footer("slope", r.fit.slope);
    w.footer("intercept", r.fit.intercept);
    w.footer("max_residual", r.fit.max_residual);
    w.footer("half_minus_s_star", bound);
    manifest["grids"] = {{"time", "band_default"}, {"atoms", c.atoms}, {"seeds", c.seeds}};
    manifest["fits"] = {{"ratio", {{"slope", r.fit.slope}, {"predicted_bound", bound}}}};
  } else {
    throw ValidationError("scaling: family must be f1, f2 or band");
  }
  write_manifest(cfg, manifest);
  return 0;
}

int run_kernel(Params& p, const json& cfg) {
  const auto sym = symbol_of(cfg);
  const auto seed = seed_of(cfg);
  const auto curve = certified(curve_of(cfg), 4000, seed);
  const std::string rn = str(cfg, "region");
  if (rn != "V2" && rn != "V3") throw ValidationError("kernel: region must be V2 or V3");
  const Region region = rn == "V2" ? Region::V2 : Region::V3;
  const KernelParams kp(num(cfg, "lambda"), sym, curve, num(cfg, "alpha"));
  const auto fit = kernel_envelope_fit(kp, region, count(cfg, "pairs", 1000, 1e7), seed);
  json res = {{"symbol", io::to_json(sym)}, {"curve", io::to_json(kp.curve)}, {"psi", io::to_json(kp.psi)},
              {"s_star", kp.s_star()}};
  io::CsvWriter w(p.out(), "kernel", cfg, {"dx", "dt", "abs_K", "region", "bin", "envelope"}, res);
  for (const auto& s : fit.samples) {
    w.row(std::vector<std::string>{fmt(s.dx), fmt(s.dt), fmt(s.abs_K), region_name(s.region), std::to_string(s.bin),
                                   s.envelope ? "1" : "0"});
  }
  w.footer("decay_exponent", fit.decay_exponent);
  w.footer("theory_exponent", fit.theory_exponent);
  w.footer("envelope_constant", fit.envelope_constant);
  w.footer("crossover", fit.crossover);
  w.footer("bins_used", static_cast<double>(fit.bins_used));
  w.footer("max_trivial_ratio", fit.max_trivial_ratio);
  w.footer("trivial_bound_ok", fit.trivial_bound_ok ? 1 : 0);
  return 0;
}

int run_sharpness(Params& p, const json& cfg) {
  const double m = num(cfg, "m"), kappa = num(cfg, "kappa"), alpha = num(cfg, "alpha");
  const double lam = num(cfg, "lambda");
  json r;
  r["schema_version"] = io::kSchemaVersion;
  r["command"] = "sharpness";
  r["config"] = cfg;
  r["threshold"] = threshold(m, kappa, alpha);
  r["s_star"] = s_star(m, alpha, kappa);
  r["half_minus_s_star"] = 0.5 - s_star(m, alpha, kappa);
  r["predicted_f1_exponent"] = predicted_f1_exponent(m, kappa, alpha);
  const double s = num(cfg, "s");
  if (s > 0.25) {
    const auto d = dim_bound(s, m, kappa);
    r["dim_bound"] = {{"value", d.value}, {"raw", d.raw}};
  }
  const auto psi0 = BumpProfile::origin(num(cfg, "delta"));
  const auto curve = CurveFamily::power(kappa);
  CounterexampleSpec s1(CounterexampleSpec::Family::f1, lam, m, kappa, psi0);
  const auto mu1 = f1_measure(s1, alpha, 1024, 64);
  const auto b1 = verify_lower_bound_f1(s1, curve, mu1);
  r["f1"] = {{"lambda", lam},
             {"min_normalized", b1.min_normalized},
             {"min_rectangle", b1.min_rectangle},
             {"max_phase_rectangle", b1.max_phase_rectangle},
             {"max_phase_ridge", b1.max_phase_ridge},
             {"phase_ok", b1.phase_ok},
             {"c0", b1.c0},
             {"pass", b1.pass}};
  CounterexampleSpec s2(CounterexampleSpec::Family::f2, lam, m, kappa, psi0);
  const auto mu2 = build_power_measure(alpha, refined_partition(1024, 0.0, 0.01, 64));
  const auto b2 = verify_lower_bound_f2(s2, curve, mu2);
  r["f2"] = {{"lambda", lam},
             {"min_along_graph", b2.min_along_graph},
             {"l2_window", b2.l2_window},
             {"max_remainder", b2.max_remainder},
             {"max_t", b2.max_t},
             {"t_bound_ok", b2.t_bound_ok},
             {"c0", b2.c0},
             {"pass", b2.pass}};
  r["psi0"] = io::to_json(psi0);
  r["note"] = "c0 = cos(1/2) int(psi0) / (4 pi) is an engineering pass threshold";
  p.out() << r.dump(2) << '\n';
  return 0;
}

int run_verify(Params& p, const json& cfg) {
  const std::string suite = str(cfg, "suite");
  json r;
  r["schema_version"] = io::kSchemaVersion;
  r["command"] = "verify";
  r["config"] = cfg;
  r["suite"] = suite;
  bool pass = true;
  if (suite == "unitarity") {
    double worst = 0.0;
    json rows = json::array();
    for (double m : {1.2, 1.5, 2.0, 3.0}) {
      const auto u = unitarity_check(m, 4, seed_of(cfg));
      worst = std::max({worst, u.max_norm_deviation, u.max_group_deviation});
      rows.push_back({{"m", m}, {"norm_deviation", u.max_norm_deviation}, {"group_deviation", u.max_group_deviation}});
    }
    r["cases"] = rows;
    r["max_deviation"] = worst;
    r["tolerance"] = 1e-10;
    pass = worst < 1e-10;
  } else if (suite == "gaussian") {
    double worst = 0.0;
    const auto sym = DispersionSymbol::power(2.0);
    const auto f = gaussian_signal(sym, 4.0, 0.5);
    for (double t : {0.1, 0.5}) {
      for (int i = 0; i <= 80; ++i) {
        const double x = -4.0 + 0.1 * i;
        const double a = 1.0 + 4.0 * t * t;
        const double exact = std::pow(a, -0.25) * std::exp(-x * x / (2.0 * a));
        worst = std::max(worst, std::abs(std::abs(evaluate_field(f, {x, t}, sym)) - exact) / exact);
      }
    }
    r["max_relative_error"] = worst;
    r["tolerance"] = 1e-6;
    pass = worst <= 1e-6;
  } else if (suite == "frostman") {
    json rows = json::array();
    for (double a : {0.3, 0.5, 1.0}) {
      const auto mu = build_power_measure(a, 4096);
      const double rel = std::abs(mu.frostman_c - 2.0 / a) / (2.0 / a);
      pass = pass && rel <= 0.05;
      rows.push_back({{"alpha", a}, {"frostman_c", mu.frostman_c}, {"expected", 2.0 / a}, {"relative_error", rel}});
    }
    const auto cantor = build_cantor_measure(1.0 / 3.0, 12);
    rows.push_back({{"kind", "cantor"}, {"alpha", cantor.alpha()}, {"frostman_c", cantor.frostman_c}});
    pass = pass && std::isfinite(cantor.frostman_c) && cantor.frostman_c < 4.0;
    r["cases"] = rows;
  } else if (suite == "threshold") {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        for (int k = 0; k < 10; ++k) {
          const double m = 1.05 + 0.3 * i, kappa = 0.1 * (j + 1), alpha = 0.1 * (k + 1);
          worst = std::max(worst, std::abs(threshold(m, kappa, alpha) - (0.5 - s_star(m, alpha, kappa))));
        }
      }
    }
    r["max_identity_error"] = worst;
    r["threshold_2_1_1"] = threshold(2.0, 1.0, 1.0);
    pass = worst <= 1e-12 && threshold(2.0, 1.0, 1.0) == 0.25;
  } else if (suite == "curves") {
    json rows = json::array();
    for (double kappa : {0.2, 0.5, 1.0}) {
      const auto c = verify_curve_class(CurveFamily::power(kappa), 4000, seed_of(cfg));
      pass = pass && c.pass;
      rows.push_back({{"kappa", kappa}, {"C1", c.C1_est}, {"C2", c.C2_est}, {"pass", c.pass}});
    }
    r["cases"] = rows;
  } else {
    throw ValidationError("verify: suite must be unitarity, gaussian, frostman, threshold or curves");
  }
  r["pass"] = pass;
  p.out() << r.dump(2) << '\n';
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: dispersive maximal estimates along curves on fractal measures"};
  app.require_subcommand(1);

  auto* prop = app.add_subcommand("propagate", "evaluate S_t f on a line of points");
  Params pp(prop, {{"m", 2.0}, {"signal", "gaussian"}, {"t", 0.1}, {"x_min", -4.0}, {"x_max", 4.0}, {"points", 81}});
  pp.number("m", "power symbol order");
  pp.text("signal", "gaussian, zero or a signal JSON path");
  pp.number("t", "time");
  pp.number("x_min", "first x");
  pp.number("x_max", "last x");
  pp.number("points", "number of x points");

  auto* maxi = app.add_subcommand("maximal", "maximal function along a curve on a measure");
  Params pm(maxi, {{"m", 2.0},
                   {"kappa", 1.0},
                   {"alpha", 1.0},
                   {"atoms", 1024},
                   {"signal", "gaussian"},
                   {"lambda", 64.0},
                   {"delta", 0.1},
                   {"t_min", 0.0},
                   {"t_max", 1.0},
                   {"n_t", 256},
                   {"s", 0.0}});
  for (const char* k : {"m", "kappa", "alpha", "atoms", "lambda", "delta", "t_min", "t_max", "n_t", "s"}) {
    pm.number(k, k);
  }
  pm.text("signal", "gaussian, zero, f1, band or a signal JSON path");
  pm.flag("certify", "refine the time grid until the norm settles");

  auto* scal = app.add_subcommand("scaling", "lambda sweep with slope fit");
  Params ps(scal, {{"family", "f1"},
                   {"m", 2.0},
                   {"kappa", 1.0},
                   {"alpha", 1.0},
                   {"lambda", "16..1024"},
                   {"s", 0.0},
                   {"delta", 0.1},
                   {"atoms", 1024},
                   {"n_t", 2048},
                   {"seeds", 4}});
  ps.text("family", "f1, f2 or band");
  for (const char* k : {"m", "kappa", "alpha", "delta", "atoms", "n_t", "seeds"}) ps.number(k, k);
  ps.text("lambda", "a..b (dyadic) or a,b,c");
  ps.text("s", "Sobolev exponent(s), comma separated");
  ps.text("manifest", "write a JSON manifest here");
  ps.flag("certify", "certify the time grid");

  auto* kern = app.add_subcommand("kernel", "kernel envelope fit in V2 or V3");
  Params pk(kern, {{"m", 2.0}, {"kappa", 1.0}, {"alpha", 1.0}, {"lambda", 256.0}, {"region", "V2"}, {"pairs", 4000}});
  for (const char* k : {"m", "kappa", "alpha", "lambda", "pairs"}) pk.number(k, k);
  pk.text("region", "V2 or V3");

  auto* shp = app.add_subcommand("sharpness", "threshold algebra and counterexample lower bounds");
  Params psh(shp, {{"m", 2.0}, {"kappa", 1.0}, {"alpha", 1.0}, {"s", 0.3}, {"lambda", 64.0}, {"delta", 0.1}});
  for (const char* k : {"m", "kappa", "alpha", "s", "lambda", "delta"}) psh.number(k, k);

  auto* ver = app.add_subcommand("verify", "built-in invariant suites");
  Params pv(ver, {{"suite", "unitarity"}});
  pv.text("suite", "unitarity, gaussian, frostman, threshold or curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::vector<std::pair<CLI::App*, std::pair<Params*, int (*)(Params&, const json&)>>> cmds{
      {prop, {&pp, run_propagate}}, {maxi, {&pm, run_maximal}}, {scal, {&ps, run_scaling}},
      {kern, {&pk, run_kernel}},    {shp, {&psh, run_sharpness}}, {ver, {&pv, run_verify}}};
  try {
    for (auto& [sub, h] : cmds) {
      if (sub->parsed()) return h.second(*h.first, h.first->resolve());
    }
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << '\n';
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
