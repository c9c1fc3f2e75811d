#pragma once

// Energy-method uniform stability criterion and the algebra around it:
// the closed condition and its specialisations, the Lienard-Chipart test on
// the quartic factor of the boundary matrix' characteristic polynomial, a
// companion-matrix root oracle for that quartic, and the positivity chain
// that makes every compressive shock with a convex EOS uniformly stable.

#include <algorithm>
#include <array>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "elastoshock/classification.hpp"
#include "elastoshock/core_states.hpp"

namespace elastoshock {

/// Signed margin of the uniform stability condition; positive means
/// uniformly stable. Both algebraic arrangements (through the derived scales
/// and directly through the entries of F) are evaluated and must agree.
inline double uniform_stability_margin(const DerivedScales& s, const Tolerances& tol = {}) {
  using detail::sq;
  const double M = s.M(), R = s.R();
  const double Ms2 = sq(s.M_star), sig2 = sq(s.sigma), l0 = s.ell0;
  const double margin = (Ms2 + M * M) * sig2 - (R * sq(s.M_tilde) + sq(s.M2)) * Ms2 * Ms2 +
                        l0 * l0 * (2 * sq(s.beta) + M * M) - 2 * std::abs(l0) * s.beta * M * s.sigma;

  const Mat2& F = s.params.F;
  const double m1 = sq(F(0, 0)) + sq(F(0, 1));
  const double frob = F.squaredNorm();
  const double det = F.determinant();
  const double lz = F(0, 0) * F(1, 0) + F(0, 1) * F(1, 1);
  const double t1 = (1 + m1 + M * M) * (1 + frob + det * det);
  const double t2 = (R * (M * M - m1) + sq(F(1, 0)) + sq(F(1, 1))) * sq(1 + m1);
  const double t3 = lz * lz * (2 * (1 + m1) - M * M);
  const double t4 = 2 * M * std::abs(lz) * std::sqrt((1 + m1 - M * M) * (1 + frob + det * det));
  const double alt = t1 - t2 + t3 - t4;
  const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
  if (std::abs(margin - alt) > tol.residual_rel * scale) {
    fail(ErrorKind::InternalInconsistency, "the two arrangements of the stability condition disagree");
  }
  return margin;
}

/// The stability condition for stretching (F12 = F21 = 0) or its mirror
/// image (F11 = F22 = 0):  1 + a^2 + M^2 - R(1 + a^2)(M^2 - a^2) + b^2 M^2,
/// with (a, b) = (F11, F22) or (F12, F21).
inline double stretching_condition(const DerivedScales& s, DeformationPattern which,
                                   const Tolerances& tol = {}) {
  const Mat2& F = s.params.F;
  if (!matches_pattern(F, which, tol.pattern)) {
    fail(ErrorKind::PatternMismatch, std::string("deformation is not of ") + std::string(to_string(which)) + " type");
  }
  const double a = which == DeformationPattern::Stretching ? F(0, 0) : F(0, 1);
  const double b = which == DeformationPattern::Stretching ? F(1, 1) : F(1, 0);
  const double M = s.M(), R = s.R();
  return 1 + a * a + M * M - R * (1 + a * a) * (M * M - a * a) + b * b * M * M;
}

struct ElasticMachMargins {
  double gas_prime = 0.0;           // 1 - Mt^2 (R - 1)
  std::optional<double> str_prime;  // stretching only
};

/// Margins of the elastic-Mach-number conditions. R is passed separately so
/// that the boundary value R = 1 can be probed with otherwise valid scales.
inline ElasticMachMargins elastic_mach_check(const DerivedScales& s, double R, const Tolerances& tol = {}) {
  ElasticMachMargins out;
  const double mt2 = s.M_tilde * s.M_tilde;
  out.gas_prime = 1.0 - mt2 * (R - 1.0);
  if (matches_pattern(s.params.F, DeformationPattern::Stretching, tol.pattern)) {
    const double f11 = s.params.F(0, 0), f22 = s.params.F(1, 1);
    const double bonus = (f11 * f11 * (1 - mt2) + f22 * f22 * (mt2 + f11 * f11)) / (1 + f11 * f11);
    out.str_prime = 1.0 + bonus - mt2 * (R - 1.0);
  }
  return out;
}

struct LienardChipart {
  std::array<double, 5> b{};        // b[k] multiplies lambda^k
  bool pass = false;
  std::array<double, 6> margins{};  // b0..b4 and b1(b2 b3 - b1 b4) - b3^2 b0
};

/// Coefficients of the quartic factor h(lambda) of the characteristic
/// polynomial of G and the Lienard-Chipart inequalities on them.
inline LienardChipart lienard_chipart(const DerivedScales& s) {
  const double M = s.M(), b2 = s.beta * s.beta;
  LienardChipart out;
  out.b[4] = M * (s.a1 / b2 + s.a2);
  out.b[3] = 2 * (1 + s.M_star * s.a2);
  out.b[2] = (2 * M / b2) * (2 * b2 * s.d0_tilde - s.a1);
  out.b[1] = 2 * (1 - s.M_star * s.a2);
  out.b[0] = M * (s.a1 / b2 - s.a2);
  const auto& b = out.b;
  for (int k = 0; k < 5; ++k) out.margins[k] = b[k];
  out.margins[5] = b[1] * (b[2] * b[3] - b[1] * b[4]) - b[3] * b[3] * b[0];
  out.pass = std::all_of(out.margins.begin(), out.margins.end(), [](double m) { return m > 0.0; });
  return out;
}

struct PolynomialRoots {
  std::vector<std::complex<double>> roots;
  bool left_half_plane = false;     // every root has Re < -tol
  bool degenerate_leading = false;  // leading coefficient negligible, degree dropped
  double max_real = 0.0;
};

/// Roots of sum_k b[k] lambda^k via eigenvalues of the companion matrix.
inline PolynomialRoots polynomial_roots(std::vector<double> b, double tol = 1e-12) {
  double big = 0.0;
  for (double c : b) big = std::max(big, std::abs(c));
  if (big == 0.0) fail(ErrorKind::InvalidParameters, "zero polynomial");
  PolynomialRoots out;
  while (b.size() > 1 && std::abs(b.back()) <= 1e-14 * big) {
    b.pop_back();
    out.degenerate_leading = true;
  }
  const int n = static_cast<int>(b.size()) - 1;
  if (n >= 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -b[i] / b[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    for (int i = 0; i < n; ++i) out.roots.push_back(es.eigenvalues()(i));
  }
  out.max_real = -std::numeric_limits<double>::infinity();
  for (const auto& r : out.roots) out.max_real = std::max(out.max_real, r.real());
  out.left_half_plane = out.max_real < -tol;
  return out;
}

/// Root oracle for h(lambda) = b4 l^4 + b3 l^3 + b2 l^2 + b1 l + b0.
inline PolynomialRoots quartic_root_oracle(const std::array<double, 5>& b, double tol = 1e-12) {
  return polynomial_roots(std::vector<double>(b.begin(), b.end()), tol);
}

struct PositivityChain {
  double D = 0.0;                       // product of the two factors below
  std::array<double, 2> factors{};      // M sigma - |l0| beta -/+ M*^2 Mt
  double sos_residual = 0.0;            // relative mismatch of the sum-of-squares form
  double rr_residual = 0.0;             // relative mismatch of M^2 sigma^2 - l0^2 beta^2
  double sos_value = 0.0;               // quadratic in Z = Mt^2, positive on (0, 1)
};

/// The quantity D whose positivity makes the elastic force stabilising, with
/// the algebraic identities behind its sign.
inline PositivityChain positivity_chain(const DerivedScales& s) {
  using detail::sq;
  const double M = s.M(), Ms2 = sq(s.M_star), mt = s.M_tilde;
  PositivityChain out;
  const double base = M * s.sigma - std::abs(s.ell0) * s.beta;
  out.factors = {base - Ms2 * mt, base + Ms2 * mt};
  out.D = out.factors[0] * out.factors[1];

  const double m1s = sq(s.M1), m2s = sq(s.M2), k2 = sq(s.kappa), Z = mt * mt;
  const double quad = (sq(m1s + m2s) - 4 * k2) * Z * Z +
                      2 * ((m2s - m1s) * (m1s + k2) + 2 * k2 - 2 * m1s * m2s) * Z + sq(m1s + k2);
  const double sos = 4 * k2 * Z * (1 - Z) + sq((m1s + m2s) * Z - (m1s + k2)) + 4 * m2s * k2 * Z;
  const double qscale = std::abs(sq(m1s + m2s) * Z * Z) + 4 * k2 * Z * Z +
                        2 * std::abs((m2s - m1s) * (m1s + k2) + 2 * k2 - 2 * m1s * m2s) * Z + sq(m1s + k2);
  out.sos_value = sos;
  out.sos_residual = std::abs(quad - sos) / qscale;

  const double lhs = M * M * sq(s.sigma) - sq(s.ell0 * s.beta);
  const double rhs = Ms2 * (m2s * Z + M * M + k2);
  out.rr_residual = std::abs(lhs - rhs) / (M * M * sq(s.sigma) + sq(s.ell0 * s.beta));
  return out;
}

/// 1 + D / M*^4 - Mt^2 (R - 1): the stability condition rearranged around D.
inline double usc1_margin(const DerivedScales& s) {
  const double ms4 = std::pow(s.M_star, 4);
  return 1.0 + positivity_chain(s).D / ms4 - s.M_tilde * s.M_tilde * (s.R() - 1.0);
}

struct EnergyVerdict {
  double usc_margin = 0.0;
  bool lc_pass = false;
  std::array<double, 5> lc_coeffs{};
  std::vector<std::complex<double>> quartic_roots;
  double d_value = 0.0;
  bool stable = false;         // usc_margin > 0
  bool indeterminate = false;  // |usc_margin| inside the zero band
};

inline EnergyVerdict energy_verdict(const DerivedScales& s, const Tolerances& tol = {}) {
  EnergyVerdict v;
  v.usc_margin = uniform_stability_margin(s, tol);
  const auto lc = lienard_chipart(s);
  v.lc_pass = lc.pass;
  v.lc_coeffs = lc.b;
  v.quartic_roots = quartic_root_oracle(lc.b).roots;
  v.d_value = positivity_chain(s).D;
  v.stable = v.usc_margin > 0.0;
  v.indeterminate = std::abs(v.usc_margin) < tol.zero_band;
  return v;
}

struct ConvexShockVerdict {
  RankineHugoniotSolution rh;
  LaxCheck lax;
  double usc_margin = 0.0;
  double gas_prime_margin = 0.0;
  double rw = 0.0;  // R Mt^2, at most 1 for convex EOS
  double d_value = 0.0;
  bool lc_pass = false;
  StabilityClass verdict = StabilityClass::Indeterminate;
};

/// Full chain for a compressive shock with convex EOS: jump relations, Lax,
/// the elastic gas-dynamics bound and the stability condition. Every stage
/// must pass; a failure means the convexity argument was violated and is
/// reported as InternalInconsistency.
inline ConvexShockVerdict convex_shock_verdict(const SideState& upstream, double rho_plus,
                                               const EquationOfState& eos, const AdmissionFlags& flags = {},
                                               const Tolerances& tol = {}) {
  if (!eos.is_convex()) fail(ErrorKind::ConvexityRequired, "equation of state is not convex");
  if (!(rho_plus > upstream.rho)) fail(ErrorKind::InvalidParameters, "shock must be compressive (rho+ > rho-)");
  ConvexShockVerdict out;
  out.rh = solve_rankine_hugoniot(upstream, rho_plus, eos, flags, tol);
  out.lax = check_lax(out.rh.params);
  if (!out.lax.admissible) fail(ErrorKind::InternalInconsistency, "compressive convex shock violates Lax conditions");
  const DerivedScales s = derived_scales(out.rh.params, flags, tol);
  out.rw = s.R() * s.M_tilde * s.M_tilde;
  out.gas_prime_margin = elastic_mach_check(s, s.R(), tol).gas_prime;
  out.d_value = positivity_chain(s).D;
  out.usc_margin = uniform_stability_margin(s, tol);
  out.lc_pass = lienard_chipart(s).pass;
  const bool ok = out.rw <= 1.0 + tol.residual_rel && out.gas_prime_margin > 0.0 &&
                  (out.d_value > 0.0 || flags.allow_degenerate) && out.usc_margin > 0.0 && out.lc_pass;
  if (!ok) fail(ErrorKind::InternalInconsistency, "convex compressive shock fails the stability chain");
  out.verdict = StabilityClass::UniformlyStable;
  return out;
}

}  // namespace elastoshock
