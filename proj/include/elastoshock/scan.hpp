#pragma once

// Single-point classification combining every method, and parameter-space
// scans over a rectangular grid with a deterministic parallel merge.

#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "elastoshock/energy_criterion.hpp"
#include "elastoshock/json_io.hpp"
#include "elastoshock/lopatinski.hpp"
#include "elastoshock/symmetrizer.hpp"

namespace elastoshock {

struct MethodSet {
  bool energy = true;
  bool lc = true;
  bool spectral = false;
  bool symmetrizer = false;
};

/// Comma-separated subset of energy, lc, spectral, symmetrizer.
inline MethodSet parse_methods(const std::string& text) {
  MethodSet m{false, false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "energy") m.energy = true;
    else if (item == "lc") m.lc = true;
    else if (item == "spectral") m.spectral = true;
    else if (item == "symmetrizer") m.symmetrizer = true;
    else fail(ErrorKind::ConfigError, "unknown method '" + item + "'");
  }
  if (!(m.energy || m.lc || m.spectral || m.symmetrizer)) fail(ErrorKind::ConfigError, "no method selected");
  return m;
}

inline std::string methods_string(const MethodSet& m) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(m.energy, "energy");
  add(m.lc, "lc");
  add(m.spectral, "spectral");
  add(m.symmetrizer, "symmetrizer");
  return out;
}

struct ClassifyOptions {
  MethodSet methods;
  GridConfig grid;
  AdmissionFlags flags;
  Tolerances tol;
  SymmetrizerOptions symmetrizer;
  int probe_samples = 64;
};

struct SymmetrizerSummary {
  bool spectrum_stable = false;
  bool certified = false;  // H > 0, B0~ > 0 and a positive dissipativity probe
  double H_min_eigenvalue = 0.0;
  double lyapunov_residual = 0.0;
  double probe_min = 0.0;
  double max_real_eigenvalue = 0.0;
};

struct PointReport {
  ShockParameters params;
  LaxCheck lax;
  bool valid = true;  // parameter invariants hold
  std::string invalid_reason;
  std::optional<EnergyVerdict> energy;
  std::optional<LienardChipart> lc;
  std::optional<double> pattern_margin;  // stretching / antidiagonal condition
  std::optional<DeformationPattern> pattern;
  std::optional<SpectralVerdict> spectral;
  std::optional<SpectralVerdict> closed_form;
  std::optional<SymmetrizerSummary> symmetrizer;
  StabilityClass cls = StabilityClass::Indeterminate;
  bool agree = true;
  std::vector<std::string> disagreements;
};

/// Class shown in the spectral column: the spectral verdict when it ran,
/// otherwise the combined class.
inline StabilityClass spectral_column(const PointReport& r) {
  if (!r.lax.admissible) return StabilityClass::LaxInadmissible;
  return r.spectral ? r.spectral->cls : r.cls;
}

inline SymmetrizerSummary summarize_symmetrizer(const DerivedScales& s, const ClassifyOptions& opt) {
  SymmetrizerSummary out;
  const BoundaryMatrices bm = build_G(s, opt.symmetrizer.alpha);
  out.max_real_eigenvalue = bm.max_real_eigenvalue;
  out.spectrum_stable = bm.max_real_eigenvalue < 0.0;
  if (!out.spectrum_stable) return out;
  const SymmetrizerBundle b = build_symmetrizer(s, opt.symmetrizer, opt.tol);
  out.H_min_eigenvalue = b.H_min_eigenvalue;
  out.lyapunov_residual = b.lyapunov_residual;
  out.probe_min = dissipativity_probe(b, opt.probe_samples, 1).min_normalized;
  out.certified = b.H_positive && b.B0_tilde_positive && out.probe_min > 0.0;
  return out;
}

/// Runs the requested methods at one parameter point. Lax-inadmissible and
/// invalid points get no classification. Numerical failures propagate.
inline PointReport classify_point(const ShockParameters& p, const ClassifyOptions& opt) {
  PointReport r;
  r.params = p;
  r.lax = check_lax(p);
  try {
    validate_parameters(p, opt.flags);
  } catch (const Error& e) {
    r.valid = false;
    r.invalid_reason = e.what();
  }
  if (!r.valid) {
    r.lax.admissible = false;
    r.cls = StabilityClass::Indeterminate;
    return r;
  }
  if (!r.lax.admissible) {
    r.cls = StabilityClass::LaxInadmissible;
    return r;
  }
  const DerivedScales s = derived_scales(p, opt.flags, opt.tol);
  const double band = opt.tol.zero_band;

  r.pattern = detect_pattern(p.F, opt.tol.pattern);
  if (r.pattern) {
    r.pattern_margin = stretching_condition(s, *r.pattern, opt.tol);
    r.closed_form = classify_stretching(s, opt.tol);
  }
  if (opt.methods.energy) r.energy = energy_verdict(s, opt.tol);
  if (opt.methods.lc || opt.methods.energy) r.lc = lienard_chipart(s);
  if (opt.methods.spectral) r.spectral = classify_spectral(s, opt.grid);
  if (opt.methods.symmetrizer) r.symmetrizer = summarize_symmetrizer(s, opt);

  // The energy margin drives the comparisons; without it LC stands in.
  const double margin = r.energy ? r.energy->usc_margin : uniform_stability_margin(s, opt.tol);
  const bool decided = std::abs(margin) > band;
  auto disagree = [&](const std::string& why) {
    r.agree = false;
    r.disagreements.push_back(why);
  };
  if (decided) {
    const bool stable = margin > 0.0;
    if (opt.methods.lc && r.lc->pass != stable) disagree("lc_pass differs from the sign of the energy margin");
    if (r.spectral) {
      if (stable && r.spectral->cls != StabilityClass::UniformlyStable) {
        disagree("positive energy margin but spectral class " + std::string(to_string(r.spectral->cls)));
      }
      if (!stable && r.pattern && r.spectral->cls != StabilityClass::NeutrallyStable) {
        disagree("closed-form pattern with negative margin but spectral class " +
                 std::string(to_string(r.spectral->cls)));
      }
    }
    if (r.symmetrizer && r.symmetrizer->certified != stable) {
      disagree("symmetrizer certificate differs from the sign of the energy margin");
    }
  }
  if (r.spectral && r.pattern && r.closed_form && !r.closed_form->transition && r.spectral->cls != r.closed_form->cls) {
    disagree("spectral scan differs from the closed-form verdict");
  }

  if (r.spectral) {
    r.cls = r.spectral->cls;
  } else if (!decided) {
    r.cls = StabilityClass::Indeterminate;
  } else if (margin > 0.0) {
    r.cls = StabilityClass::UniformlyStable;
  } else if (r.closed_form) {
    r.cls = r.closed_form->cls;
  } else {
    r.cls = StabilityClass::Indeterminate;
  }
  return r;
}

inline json to_json(const PointReport& r) {
  json j = {{"params", to_json(r.params)}, {"lax", to_json(r.lax)}, {"valid", r.valid}};
  if (!r.valid) j["invalid_reason"] = r.invalid_reason;
  j["class"] = std::string(to_string(r.cls));
  if (r.energy) {
    json roots = json::array();
    for (const auto& z : r.energy->quartic_roots) roots.push_back(jsonio::complex_value(z));
    j["energy_margin"] = r.energy->usc_margin;
    j["d_value"] = r.energy->d_value;
    j["quartic_roots"] = roots;
  }
  if (r.lc) {
    j["lc_pass"] = r.lc->pass;
    j["lc_coeffs"] = r.lc->b;
    j["lc_margins"] = r.lc->margins;
  }
  if (r.pattern) {
    j["pattern"] = std::string(to_string(*r.pattern));
    j["pattern_margin"] = *r.pattern_margin;
    j["closed_form"] = to_json(*r.closed_form);
  }
  if (r.spectral) j["spectral"] = to_json(*r.spectral);
  if (r.symmetrizer) {
    const auto& s = *r.symmetrizer;
    j["symmetrizer"] = {{"spectrum_stable", s.spectrum_stable}, {"certified", s.certified},
                        {"max_real_eigenvalue", s.max_real_eigenvalue}, {"H_min_eigenvalue", s.H_min_eigenvalue},
                        {"lyapunov_residual", s.lyapunov_residual}, {"probe_min", s.probe_min}};
  }
  j["agree"] = r.agree;
  j["disagreements"] = r.disagreements;
  return j;
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

struct Axis {
  std::string name;
  double min = 0.0, max = 0.0;
  int steps = 2;
  double value(int k) const { return min + (max - min) * k / (steps - 1); }
};

struct ScanConfig {
  std::vector<Axis> axes;
  std::map<std::string, double> fixed;
  std::optional<double> M_minus;
  MethodSet methods;
  GridConfig grid;
  std::string out_path;
  std::string format = "csv";
  bool allow_degenerate = false;
  double zero_band = Tolerances{}.zero_band;
};

inline const std::array<const char*, 6>& parameter_names() {
  static const std::array<const char*, 6> names = {"M", "R", "F11", "F12", "F21", "F22"};
  return names;
}

inline void validate_scan_config(const ScanConfig& c) {
  if (c.axes.empty()) fail(ErrorKind::ConfigError, "axes must be nonempty");
  std::map<std::string, int> seen;
  for (const auto& a : c.axes) {
    if (a.steps < 2) fail(ErrorKind::ConfigError, "axis " + a.name + ": steps must be at least 2");
    if (!std::isfinite(a.min) || !std::isfinite(a.max)) fail(ErrorKind::ConfigError, "axis " + a.name + ": bounds");
    ++seen[a.name];
  }
  for (const auto& [k, v] : c.fixed) ++seen[k];
  for (const auto& [k, n] : seen) {
    if (std::find_if(parameter_names().begin(), parameter_names().end(), [&](const char* p) { return k == p; }) ==
        parameter_names().end()) {
      fail(ErrorKind::ConfigError, "unknown parameter '" + k + "'");
    }
    if (n != 1) fail(ErrorKind::ConfigError, "parameter '" + k + "' given more than once");
  }
  if (seen.size() != 6) fail(ErrorKind::ConfigError, "axes and fixed must cover M, R, F11, F12, F21, F22");
  if (c.format != "csv" && c.format != "json") fail(ErrorKind::ConfigError, "format must be csv or json");
  if (c.grid.n_elev < 2 || c.grid.n_azim < 4 || c.grid.max_candidates < 1 || c.grid.boundary_factor < 1) {
    fail(ErrorKind::ConfigError, "spectral grid too coarse");
  }
}

/// Strict parse; unknown keys are rejected.
inline ScanConfig parse_scan_config(const json& j) {
  jsonio::require_keys(j, {"axes", "fixed", "methods", "grid", "output", "allow_degenerate", "tol"}, "config");
  ScanConfig c;
  if (!j.contains("axes") || !j.at("axes").is_array()) fail(ErrorKind::ConfigError, "config: 'axes' must be an array");
  for (const auto& a : j.at("axes")) {
    jsonio::require_keys(a, {"name", "min", "max", "steps"}, "axis");
    if (!a.contains("name") || !a.at("name").is_string()) fail(ErrorKind::ConfigError, "axis: missing name");
    if (!a.contains("steps") || !a.at("steps").is_number_integer()) fail(ErrorKind::ConfigError, "axis: steps must be an integer");
    c.axes.push_back({a.at("name").get<std::string>(), jsonio::field(a, "min", "axis"), jsonio::field(a, "max", "axis"),
                      a.at("steps").get<int>()});
  }
  if (j.contains("fixed")) {
    if (!j.at("fixed").is_object()) fail(ErrorKind::ConfigError, "config: 'fixed' must be an object");
    for (const auto& [k, v] : j.at("fixed").items()) {
      if (k == "M_minus") c.M_minus = jsonio::number(v, "fixed.M_minus");
      else c.fixed[k] = jsonio::number(v, "fixed." + k);
    }
  }
  if (j.contains("methods")) {
    if (!j.at("methods").is_array()) fail(ErrorKind::ConfigError, "config: 'methods' must be an array");
    std::string joined;
    for (const auto& m : j.at("methods")) {
      if (!m.is_string()) fail(ErrorKind::ConfigError, "config: methods must be strings");
      joined += (joined.empty() ? "" : ",") + m.get<std::string>();
    }
    c.methods = parse_methods(joined);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    jsonio::require_keys(g, {"n_elev", "n_azim", "zero_tol", "band", "max_candidates", "boundary_factor"}, "grid");
    auto integer = [&](const char* k, int& dst) {
      if (!g.contains(k)) return;
      if (!g.at(k).is_number_integer()) fail(ErrorKind::ConfigError, std::string("grid.") + k + " must be an integer");
      dst = g.at(k).get<int>();
    };
    integer("n_elev", c.grid.n_elev);
    integer("n_azim", c.grid.n_azim);
    integer("max_candidates", c.grid.max_candidates);
    integer("boundary_factor", c.grid.boundary_factor);
    if (g.contains("zero_tol")) c.grid.zero_tol = jsonio::number(g.at("zero_tol"), "grid.zero_tol");
    if (g.contains("band")) c.grid.band = jsonio::number(g.at("band"), "grid.band");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    jsonio::require_keys(o, {"path", "format"}, "output");
    if (o.contains("path")) {
      if (!o.at("path").is_string()) fail(ErrorKind::ConfigError, "output.path must be a string");
      c.out_path = o.at("path").get<std::string>();
    }
    if (o.contains("format")) {
      if (!o.at("format").is_string()) fail(ErrorKind::ConfigError, "output.format must be a string");
      c.format = o.at("format").get<std::string>();
    }
  }
  if (j.contains("allow_degenerate")) {
    if (!j.at("allow_degenerate").is_boolean()) fail(ErrorKind::ConfigError, "allow_degenerate must be a boolean");
    c.allow_degenerate = j.at("allow_degenerate").get<bool>();
  }
  if (j.contains("tol")) c.zero_band = jsonio::number(j.at("tol"), "tol");
  validate_scan_config(c);
  return c;
}

inline std::size_t grid_size(const ScanConfig& c) {
  std::size_t n = 1;
  for (const auto& a : c.axes) n *= static_cast<std::size_t>(a.steps);
  return n;
}

/// Grid point by index; the last axis varies fastest.
inline ShockParameters grid_point(const ScanConfig& c, std::size_t index) {
  std::map<std::string, double> v = c.fixed;
  for (int k = static_cast<int>(c.axes.size()) - 1; k >= 0; --k) {
    const Axis& a = c.axes[k];
    v[a.name] = a.value(static_cast<int>(index % a.steps));
    index /= a.steps;
  }
  ShockParameters p;
  p.M = v.at("M");
  p.R = v.at("R");
  p.F << v.at("F11"), v.at("F12"), v.at("F21"), v.at("F22");
  p.M_minus = c.M_minus;
  return p;
}

struct ScanRow {
  PointReport report;
  std::optional<Error> error;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  std::map<std::string, int> counts;
  std::vector<std::size_t> disagreements;
  std::optional<std::size_t> first_error;
};

inline ClassifyOptions scan_options(const ScanConfig& c) {
  ClassifyOptions o;
  o.methods = c.methods;
  o.grid = c.grid;
  o.grid.threads = 1;
  o.flags.allow_degenerate = c.allow_degenerate;
  o.tol.zero_band = c.zero_band;
  return o;
}

/// Evaluates every grid point on `jobs` workers; rows are stored by grid
/// index, so the report does not depend on scheduling.
inline ScanReport run_scan(const ScanConfig& c, int jobs) {
  validate_scan_config(c);
  const std::size_t n = grid_size(c);
  const ClassifyOptions opt = scan_options(c);
  ScanReport rep;
  rep.rows.resize(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const ShockParameters p = grid_point(c, i);
      try {
        rep.rows[i].report = classify_point(p, opt);
      } catch (const Error& e) {
        rep.rows[i].report.params = p;
        rep.rows[i].error = e;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rep.rows[i].error) {
      rep.first_error = i;
      break;
    }
    const PointReport& r = rep.rows[i].report;
    ++rep.counts[std::string(to_string(spectral_column(r)))];
    if (!r.agree) rep.disagreements.push_back(i);
  }
  return rep;
}

inline const char* csv_header() { return "F11,F12,F21,F22,M,R,lax_ok,energy_margin,lc_pass,spectral_class,agree"; }

inline std::string csv_row(const PointReport& r) {
  const ShockParameters& p = r.params;
  std::string line;
  for (double x : {p.F11(), p.F12(), p.F21(), p.F22(), p.M, p.R}) line += format_double(x) + ",";
  line += r.lax.admissible ? "true," : "false,";
  line += (r.energy ? format_double(r.energy->usc_margin) : std::string("nan")) + ",";
  line += std::string(r.lc ? (r.lc->pass ? "true" : "false") : "na") + ",";
  line += std::string(to_string(spectral_column(r))) + ",";
  line += r.agree ? "true" : "false";
  return line;
}

/// Rows up to the first failing point, then one trailing error record.
inline void write_scan_csv(std::ostream& os, const ScanReport& rep) {
  os << csv_header() << "\n";
  const std::size_t stop = rep.first_error.value_or(rep.rows.size());
  for (std::size_t i = 0; i < stop; ++i) os << csv_row(rep.rows[i].report) << "\n";
  if (rep.first_error) {
    const Error& e = *rep.rows[*rep.first_error].error;
    os << "# error at row " << *rep.first_error << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
  }
}

inline json scan_to_json(const ScanReport& rep) {
  json rows = json::array();
  const std::size_t stop = rep.first_error.value_or(rep.rows.size());
  for (std::size_t i = 0; i < stop; ++i) {
    const PointReport& r = rep.rows[i].report;
    json row = to_json(r.params);
    row["lax_ok"] = r.lax.admissible;
    row["energy_margin"] = r.energy ? json(r.energy->usc_margin) : json(nullptr);
    row["lc_pass"] = r.lc ? json(r.lc->pass) : json(nullptr);
    row["spectral_class"] = std::string(to_string(spectral_column(r)));
    row["agree"] = r.agree;
    rows.push_back(row);
  }
  json dis = json::array();
  for (std::size_t i : rep.disagreements) {
    json d = to_json(rep.rows[i].report);
    d["row"] = i;
    dis.push_back(d);
  }
  json out = {{"rows", rows}, {"summary", {{"counts", rep.counts}, {"disagreements", rep.disagreements.size()}}},
              {"disagreements", dis}};
  if (rep.first_error) {
    const Error& e = *rep.rows[*rep.first_error].error;
    out["error"] = {{"row", *rep.first_error}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  }
  return out;
}

}  // namespace elastoshock
