// stabmap: classify rectilinear shocks in 2D isentropic elastodynamics.
//
//   stabmap classify    --M 0.9 --R 2 --F11 0.5 --F22 0.8 [--methods energy,lc,spectral]
//   stabmap scan        --config scan.json [--jobs 4] [--out map.csv]
//   stabmap rh          --config rh.json       (or JSON on stdin)
//   stabmap symmetrizer --M 0.9 --R 2 --F11 0.5 --F22 0.8
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "elastoshock/elastoshock.hpp"

namespace es = elastoshock;
using es::json;

namespace {

constexpr int kOk = 0;
constexpr int kInput = 2;
constexpr int kNumerical = 3;

struct Options {
  std::optional<double> M, R, M_minus;
  double F11 = 0.0, F12 = 0.0, F21 = 0.0, F22 = 0.0;
  std::string methods;
  std::string config;
  std::string out;
  std::string format;
  int jobs = 1;
  std::optional<double> tol;
  bool allow_degenerate = false;
  double alpha = 2.0;
};

void add_point_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--M", o.M, "downstream Mach number");
  cmd->add_option("--R", o.R, "density ratio rho+/rho-");
  cmd->add_option("--F11", o.F11, "scaled deformation F11");
  cmd->add_option("--F12", o.F12, "scaled deformation F12");
  cmd->add_option("--F21", o.F21, "scaled deformation F21");
  cmd->add_option("--F22", o.F22, "scaled deformation F22");
  cmd->add_option("--M-minus", o.M_minus, "upstream Mach number (Lax reporting only)");
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON input file");
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "width of the indeterminate margin band");
  cmd->add_flag("--allow-degenerate", o.allow_degenerate, "admit det F = 0 (gas-dynamics limit)");
}

es::ShockParameters point_from(const Options& o) {
  if (!o.M || !o.R) es::fail(es::ErrorKind::InvalidParameters, "--M and --R are required");
  es::ShockParameters p;
  p.M = *o.M;
  p.R = *o.R;
  p.F << o.F11, o.F12, o.F21, o.F22;
  p.M_minus = o.M_minus;
  return p;
}

json read_json_input(const std::string& path) {
  std::string text;
  if (path.empty() || path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path);
    if (!in) es::fail(es::ErrorKind::ConfigError, "cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    es::fail(es::ErrorKind::ConfigError, std::string("JSON parse error: ") + e.what());
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) es::fail(es::ErrorKind::ConfigError, "cannot write " + path);
  out << text;
}

es::ClassifyOptions classify_options(const Options& o) {
  es::ClassifyOptions c;
  if (!o.methods.empty()) c.methods = es::parse_methods(o.methods);
  c.grid.threads = o.jobs;
  c.flags.allow_degenerate = o.allow_degenerate;
  if (o.tol) c.tol.zero_band = *o.tol;
  return c;
}

int cmd_classify(const Options& o) {
  const es::PointReport r = es::classify_point(point_from(o), classify_options(o));
  if (!r.valid) es::fail(es::ErrorKind::InvalidParameters, r.invalid_reason);
  if (o.format == "csv") {
    emit(std::string(es::csv_header()) + "\n" + es::csv_row(r) + "\n", o.out);
  } else {
    json j = es::to_json(r);
    j["methods"] = es::methods_string(classify_options(o).methods);
    emit(j.dump(2) + "\n", o.out);
  }
  return kOk;
}

int cmd_scan(const Options& o) {
  if (o.config.empty()) es::fail(es::ErrorKind::ConfigError, "scan needs --config");
  es::ScanConfig c = es::parse_scan_config(read_json_input(o.config));
  if (!o.methods.empty()) c.methods = es::parse_methods(o.methods);
  if (!o.out.empty()) c.out_path = o.out;
  if (!o.format.empty()) c.format = o.format;
  if (o.tol) c.zero_band = *o.tol;
  if (o.allow_degenerate) c.allow_degenerate = true;
  const es::ScanReport rep = es::run_scan(c, o.jobs);
  std::ostringstream text;
  if (c.format == "json") {
    text << es::scan_to_json(rep).dump(2) << "\n";
  } else {
    es::write_scan_csv(text, rep);
  }
  emit(text.str(), c.out_path);
  std::cerr << "rows: " << (rep.first_error ? *rep.first_error : rep.rows.size()) << " of " << rep.rows.size();
  for (const auto& [cls, n] : rep.counts) std::cerr << ", " << cls << ": " << n;
  std::cerr << ", disagreements: " << rep.disagreements.size() << "\n";
  for (std::size_t i : rep.disagreements) {
    std::cerr << "disagreement at row " << i << ": " << es::to_json(rep.rows[i].report).dump() << "\n";
  }
  if (rep.first_error) {
    const es::Error& e = *rep.rows[*rep.first_error].error;
    std::cerr << "error: " << es::to_string(e.kind()) << ": " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_rh(const Options& o) {
  const json in = read_json_input(o.config);
  es::jsonio::require_keys(in, {"upstream", "rho_plus", "eos"}, "rh input");
  if (!in.contains("upstream") || !in.contains("eos")) es::fail(es::ErrorKind::ConfigError, "rh input needs upstream, rho_plus and eos");
  const es::SideState up = es::parse_state(in.at("upstream"), "upstream");
  const double rho_plus = es::jsonio::field(in, "rho_plus", "rh input");
  const es::EquationOfState eos = es::parse_eos(in.at("eos"));
  es::AdmissionFlags flags;
  flags.allow_degenerate = o.allow_degenerate;
  const es::RankineHugoniotSolution sol = es::solve_rankine_hugoniot(up, rho_plus, eos, flags);
  emit(es::to_json(sol).dump(2) + "\n", o.out);
  return kOk;
}

int cmd_symmetrizer(const Options& o) {
  es::ShockParameters p;
  es::SymmetrizerOptions so;
  so.alpha = o.alpha;
  if (!o.config.empty()) {
    const json in = read_json_input(o.config);
    es::jsonio::require_keys(in, {"M", "R", "F", "alpha", "G0"}, "symmetrizer input");
    p.M = es::jsonio::field(in, "M", "symmetrizer input");
    p.R = es::jsonio::field(in, "R", "symmetrizer input");
    if (!in.contains("F")) es::fail(es::ErrorKind::ConfigError, "symmetrizer input needs F");
    p.F = es::jsonio::mat2(in.at("F"), "F");
    if (in.contains("alpha")) so.alpha = es::jsonio::number(in.at("alpha"), "alpha");
    if (in.contains("G0")) {
      const json& g = in.at("G0");
      if (!g.is_array() || g.size() != 6) es::fail(es::ErrorKind::ConfigError, "G0 must be 6 x 6");
      for (int i = 0; i < 6; ++i) {
        if (!g[i].is_array() || g[i].size() != 6) es::fail(es::ErrorKind::ConfigError, "G0 must be 6 x 6");
        for (int j = 0; j < 6; ++j) so.G0(i, j) = es::jsonio::number(g[i][j], "G0");
      }
    }
  } else {
    p = point_from(o);
  }
  es::AdmissionFlags flags;
  flags.allow_degenerate = o.allow_degenerate;
  es::Tolerances tol;
  const es::DerivedScales s = es::derived_scales(p, flags, tol);
  const es::SymmetrizerBundle b = es::build_symmetrizer(s, so, tol);
  const es::DissipativityProbe probe = es::dissipativity_probe(b, 1000, 1);
  json j = es::to_json(b);
  j["params"] = es::to_json(p);
  j["probe"] = {{"samples", probe.samples}, {"min_normalized", probe.min_normalized},
                {"max_identity_defect", probe.max_identity_defect},
                {"max_boundary_residual", probe.max_boundary_residual}};
  j["certificates"]["dissipative"] = probe.min_normalized > 0.0;
  emit(j.dump(2) + "\n", o.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability classification of rectilinear shocks in 2D isentropic elastodynamics"};
  app.require_subcommand(1);
  Options o;

  auto* classify = app.add_subcommand("classify", "classify one parameter point");
  add_point_flags(classify, o);
  add_common_flags(classify, o);
  classify->add_option("--methods", o.methods, "comma-separated subset of energy,lc,spectral,symmetrizer");

  auto* scan = app.add_subcommand("scan", "scan a parameter grid");
  add_common_flags(scan, o);
  scan->add_option("--methods", o.methods, "override the methods of the config");

  auto* rh = app.add_subcommand("rh", "solve the jump relations for a downstream state");
  add_common_flags(rh, o);

  auto* sym = app.add_subcommand("symmetrizer", "build the dissipative symmetrizer");
  add_point_flags(sym, o);
  add_common_flags(sym, o);
  sym->add_option("--alpha", o.alpha, "free constant of the boundary matrix, > 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*scan) return cmd_scan(o);
    if (*rh) return cmd_rh(o);
    if (*sym) return cmd_symmetrizer(o);
  } catch (const es::Error& e) {
    std::cerr << "error: " << es::to_string(e.kind()) << ": " << e.what() << "\n";
    return es::is_input_error(e.kind()) ? kInput : kNumerical;
  } catch (const json::exception& e) {
    std::cerr << "error: ConfigError: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kInput;
}
