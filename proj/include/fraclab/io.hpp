#pragma once
//
// JSON configs for symbols, curves, bumps, measures and signals; CSV output
// with a one-line JSON header.
//

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclab/curves.hpp"
#include "fraclab/dispersion.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/measures.hpp"
#include "fraclab/spectral_core.hpp"

namespace fraclab::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("config: missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ValidationError(std::string("config: field '") + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& j, const char* key, double dflt) {
  return j.is_object() && j.contains(key) ? number(j, key) : dflt;
}

inline std::vector<double> numbers(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw ValidationError(std::string("config: field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(std::string("config: '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::string kind_of(const json& j) {
  const json& k = field(j, "kind");
  if (!k.is_string()) throw ValidationError("config: 'kind' must be a string");
  return k.get<std::string>();
}

}  // namespace detail

inline DispersionSymbol symbol_from_json(const json& j) {
  const std::string kind = detail::kind_of(j);
  if (kind == "power") return DispersionSymbol::power(detail::number(j, "m"));
  if (kind == "table") {
    std::vector<double> d2;
    if (j.contains("d2phi")) d2 = detail::numbers(j, "d2phi");
    return DispersionSymbol::table(detail::number(j, "m"), detail::numbers(j, "xi"), detail::numbers(j, "phi"),
                                   detail::numbers(j, "dphi"), std::move(d2));
  }
  throw ValidationError("symbol: unknown kind '" + kind + "'");
}

inline json to_json(const DispersionSymbol& s) {
  json j;
  if (s.kind() == DispersionSymbol::Kind::power) {
    j["kind"] = "power";
    j["m"] = s.order();
  } else if (const auto* t = s.table_data()) {
    j["kind"] = "table";
    j["m"] = s.order();
    j["xi"] = t->xi;
    j["phi"] = t->phi;
    j["dphi"] = t->dphi;
    if (!t->d2phi.empty()) j["d2phi"] = t->d2phi;
  } else {
    j["kind"] = "general";
    j["m"] = s.order();
    j["name"] = s.name();
  }
  if (s.c3) j["C3"] = *s.c3;
  if (s.c4) j["C4"] = *s.c4;
  return j;
}

inline CurveFamily curve_from_json(const json& j) {
  const std::string kind = detail::kind_of(j);
  if (kind == "vertical") return CurveFamily::vertical();
  if (kind == "power") return CurveFamily::power(detail::number(j, "kappa"));
  if (kind == "shifted_power") {
    return CurveFamily::shifted_power(detail::number(j, "kappa"), detail::number(j, "amplitude"));
  }
  throw ValidationError("curve: unknown kind '" + kind + "'");
}

inline json to_json(const CurveFamily& c) {
  json j;
  switch (c.kind()) {
    case CurveFamily::Kind::vertical:
      j["kind"] = "vertical";
      break;
    case CurveFamily::Kind::power:
      j["kind"] = "power";
      j["kappa"] = c.kappa();
      break;
    case CurveFamily::Kind::shifted_power:
      j["kind"] = "shifted_power";
      j["kappa"] = c.kappa();
      j["amplitude"] = c.amplitude();
      break;
    case CurveFamily::Kind::user:
      j["kind"] = "user";
      j["kappa"] = c.kappa();
      j["name"] = c.name();
      break;
  }
  if (c.C1) j["C1"] = *c.C1;
  if (c.C2) j["C2"] = *c.C2;
  return j;
}

inline BumpProfile bump_from_json(const json& j) {
  const std::string kind = detail::kind_of(j);
  if (kind == "origin") return BumpProfile::origin(detail::number_or(j, "radius", 0.1));
  if (kind == "annular") return BumpProfile::annular();
  throw ValidationError("bump: unknown kind '" + kind + "'");
}

inline json to_json(const BumpProfile& b) {
  json j;
  j["kind"] = b.name();
  j["radius"] = b.support_radius();
  j["profile"] = "exp(1 - 1/(1 - u^2))";
  return j;
}

/// {"kind":"power","alpha","atoms"} | {"kind":"cantor","ratio","depth"} |
/// {"kind":"atoms","alpha","positions","weights"}
inline FrostmanMeasure measure_from_json(const json& j) {
  const std::string kind = detail::kind_of(j);
  if (kind == "power" || kind == "lebesgue") {
    const double alpha = kind == "lebesgue" ? 1.0 : detail::number(j, "alpha");
    const double atoms = detail::number_or(j, "atoms", 4096);
    if (!(atoms >= 100 && atoms <= 1 << 24)) throw ValidationError("measure: atoms must lie in [100, 2^24]");
    return build_power_measure(alpha, static_cast<std::size_t>(atoms));
  }
  if (kind == "cantor") {
    const double depth = detail::number(j, "depth");
    if (depth != std::floor(depth)) throw ValidationError("measure: cantor depth must be an integer");
    return build_cantor_measure(detail::number_or(j, "ratio", 1.0 / 3.0), static_cast<int>(depth));
  }
  if (kind == "atoms") {
    FrostmanMeasure mu(detail::number(j, "alpha"), detail::numbers(j, "positions"), detail::numbers(j, "weights"),
                       "atoms");
    certify_frostman(mu);
    return mu;
  }
  throw ValidationError("measure: unknown kind '" + kind + "'");
}

inline json measure_summary(const FrostmanMeasure& mu) {
  json j;
  j["kind"] = mu.kind();
  j["alpha"] = mu.alpha();
  j["atoms"] = mu.size();
  j["total_mass"] = mu.total_mass();
  j["frostman_c"] = mu.frostman_c;
  return j;
}

inline FrequencySignal signal_from_json(const json& j) {
  const json& g = detail::field(j, "grid");
  const double n = detail::number(g, "n");
  if (!(n >= 2 && n == std::floor(n))) throw ValidationError("signal: grid.n must be an integer >= 2");
  const FrequencyGrid grid(detail::number(g, "xi_min"), detail::number(g, "xi_max"), static_cast<std::size_t>(n));
  const json& vals = detail::field(j, "values");
  if (!vals.is_array()) throw ValidationError("signal: values must be an array");
  std::vector<cplx> v;
  v.reserve(vals.size());
  for (const auto& e : vals) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ValidationError("signal: each value must be [re, im]");
    }
    v.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return {grid, std::move(v)};
}

inline json to_json(const FrequencySignal& s) {
  json j;
  j["grid"] = {{"xi_min", s.grid.xi_min()}, {"xi_max", s.grid.xi_max()}, {"n", s.grid.size()}};
  json vals = json::array();
  for (const auto& z : s.values) vals.push_back({z.real(), z.imag()});
  j["values"] = std::move(vals);
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

/// "16..1024" (dyadic, inclusive) or "16,32,100".
inline std::vector<double> parse_lambdas(const std::string& text) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v) || v <= 0.0) {
      throw ValidationError("lambda: cannot parse '" + s + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const double lo = num(text.substr(0, dots)), hi = num(text.substr(dots + 2));
    if (hi < lo) throw ValidationError("lambda: empty range " + text);
    for (double v = lo; v <= hi * (1 + 1e-12); v *= 2.0) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(num(item));
  if (out.empty()) throw ValidationError("lambda: empty list");
  return out;
}

/// First line "# {json header}", then a column row, then data rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& command, const json& config, std::vector<std::string> columns,
            const json& resolved = nullptr)
      : out_(out), width_(columns.size()) {
    json h;
    h["schema_version"] = kSchemaVersion;
    h["command"] = command;
    h["config"] = config;
    if (!resolved.is_null()) h["resolved"] = resolved;
    out_ << "# " << h.dump() << '\n';
    line(columns);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("CsvWriter: row width differs from header");
    line(cells);
  }

  void row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    for (double v : cells) s.push_back(fmt(v));
    row(s);
  }

  /// Trailing "# key,value" lines.
  void footer(const std::string& key, double value) { out_ << "# " << key << ',' << fmt(value) << '\n'; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t width_;
};

/// Header of a CSV written by CsvWriter.
inline json read_csv_header(std::istream& in) {
  std::string first;
  if (!std::getline(in, first) || first.rfind("# ", 0) != 0) throw ValidationError("csv: missing header line");
  try {
    return json::parse(first.substr(2));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("csv: bad header: ") + e.what());
  }
}

}  // namespace fraclab::io
