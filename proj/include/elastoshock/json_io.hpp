#pragma once

// JSON (de)serialisation of states, equations of state and verdicts.
// Parsing is strict: unknown keys and non-finite numbers raise ConfigError.

#include <cstdio>
#include <initializer_list>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "elastoshock/core_states.hpp"
#include "elastoshock/lopatinski.hpp"
#include "elastoshock/symmetrizer.hpp"

namespace elastoshock {

using json = nlohmann::json;

/// Shortest round-trip-safe text for reports: 17 significant digits.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace jsonio {

inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::ConfigError, where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) fail(ErrorKind::ConfigError, where + ": unknown key '" + k + "'");
  }
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorKind::ConfigError, where + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(ErrorKind::ConfigError, where + ": non-finite number");
  return x;
}

inline double field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(ErrorKind::ConfigError, where + ": missing '" + key + "'");
  return number(j.at(key), where + "." + key);
}

inline Vec2 vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::ConfigError, where + ": expected [x, y]");
  return Vec2(number(j[0], where + "[0]"), number(j[1], where + "[1]"));
}

inline Mat2 mat2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::ConfigError, where + ": expected [[a, b], [c, d]]");
  Mat2 m;
  m.row(0) = vec2(j[0], where + "[0]").transpose();
  m.row(1) = vec2(j[1], where + "[1]").transpose();
  return m;
}

template <typename Derived>
json matrix(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json complex_value(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace jsonio

inline SideState parse_state(const json& j, const std::string& where = "state") {
  jsonio::require_keys(j, {"rho", "v", "F"}, where);
  SideState s;
  s.rho = jsonio::field(j, "rho", where);
  if (!j.contains("v") || !j.contains("F")) fail(ErrorKind::ConfigError, where + ": needs rho, v and F");
  s.v = jsonio::vec2(j.at("v"), where + ".v");
  s.F = jsonio::mat2(j.at("F"), where + ".F");
  return s;
}

inline EquationOfState parse_eos(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    fail(ErrorKind::ConfigError, "eos: missing 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "polytropic") {
    jsonio::require_keys(j, {"kind", "A", "gamma"}, "eos");
    return EquationOfState::polytropic(jsonio::field(j, "A", "eos"), jsonio::field(j, "gamma", "eos"));
  }
  if (kind == "table") {
    jsonio::require_keys(j, {"kind", "rho", "p"}, "eos");
    auto list = [&](const char* key) {
      if (!j.contains(key) || !j.at(key).is_array()) fail(ErrorKind::ConfigError, std::string("eos: '") + key + "' must be an array");
      std::vector<double> v;
      for (const auto& x : j.at(key)) v.push_back(jsonio::number(x, std::string("eos.") + key));
      return v;
    };
    return EquationOfState::tabulated(list("rho"), list("p"));
  }
  fail(ErrorKind::ConfigError, "eos: unknown kind '" + kind + "'");
}

inline json to_json(const SideState& s) {
  return {{"rho", s.rho}, {"v", {s.v(0), s.v(1)}}, {"F", jsonio::matrix(s.F)}};
}

inline json to_json(const ShockParameters& p) {
  json j = {{"M", p.M}, {"R", p.R}, {"F11", p.F11()}, {"F12", p.F12()}, {"F21", p.F21()}, {"F22", p.F22()}};
  j["M_minus"] = p.M_minus ? json(*p.M_minus) : json(nullptr);
  return j;
}

inline json to_json(const LaxCheck& l) {
  return {{"admissible", l.admissible},
          {"margins", {l.lower, l.upper, l.upstream ? json(*l.upstream) : json(nullptr)}}};
}

inline json to_json(const Frequency& f) { return {{"eta", f.eta}, {"xi", f.xi}, {"omega", f.omega}}; }

inline json to_json(const SpectralVerdict& v) {
  json j = {{"class", std::string(to_string(v.cls))},
            {"min_abs_det", v.min_abs_det},
            {"median_abs_det", v.median_abs_det},
            {"grid_points", v.grid_points},
            {"excluded_points", v.excluded_points},
            {"candidates", v.candidates},
            {"transition", v.transition}};
  j["witness"] = v.witness ? to_json(*v.witness) : json(nullptr);
  j["witness_lambda"] = v.witness_lambda ? jsonio::complex_value(*v.witness_lambda) : json(nullptr);
  return j;
}

inline json to_json(const RankineHugoniotSolution& s) {
  return {{"upstream", to_json(s.upstream)},
          {"downstream", to_json(s.downstream)},
          {"params", to_json(s.params)},
          {"front_speed", s.front_speed},
          {"rarefaction", s.rarefaction},
          {"residuals", s.residuals},
          {"lax", to_json(check_lax(s.params))}};
}

inline json to_json(const SymmetrizerBundle& b) {
  json eig = json::array();
  for (int i = 0; i < b.G_eigenvalues.size(); ++i) eig.push_back(jsonio::complex_value(b.G_eigenvalues(i)));
  return {{"alpha", b.alpha},
          {"A_mat", jsonio::matrix(b.A_mat)},
          {"B_mat", jsonio::matrix(b.B_mat)},
          {"C_mat", jsonio::matrix(b.C_mat)},
          {"G", jsonio::matrix(b.G)},
          {"G_eigenvalues", eig},
          {"G0", jsonio::matrix(b.G0)},
          {"H", jsonio::matrix(b.H)},
          {"K_b", jsonio::matrix(b.K_b)},
          {"L_b", jsonio::matrix(b.L_b)},
          {"M_b", jsonio::matrix(b.M_b)},
          {"N_b", jsonio::matrix(b.N_b)},
          {"B0", jsonio::matrix(b.B0)},
          {"B1", jsonio::matrix(b.B1)},
          {"B2", jsonio::matrix(b.B2)},
          {"B0_tilde", jsonio::matrix(b.B0_tilde)},
          {"B2_tilde", jsonio::matrix(b.B2_tilde)},
          {"T_mat", jsonio::matrix(b.T_mat)},
          {"certificates",
           {{"lyapunov_residual", b.lyapunov_residual},
            {"symmetry_defect", b.symmetry_defect},
            {"block_factor_mismatch", b.block_factor_mismatch},
            {"H_min_eigenvalue", b.H_min_eigenvalue},
            {"H_positive", b.H_positive},
            {"B0_tilde_min_eigenvalue", b.B0_tilde_min_eigenvalue},
            {"B0_tilde_positive", b.B0_tilde_positive}}}};
}

}  // namespace elastoshock
