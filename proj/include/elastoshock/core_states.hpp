#pragma once

// Physical and dimensionless shock states for 2D isentropic elastodynamics:
// equations of state, jump relations across a rectilinear front, the Lax
// 1-shock inequalities and the secondary constants of the linearized problem.
//
// Conventions
//   * The front is the line x1 = 0 and the flow crosses it from x1 < 0
//     (upstream, "-") to x1 > 0 (downstream, "+").
//   * F(i, j) = F_ij; the columns F_j = (F_1j, F_2j) are the deformation
//     columns of the elastic fluid.
//   * All dimensionless quantities are scaled by the downstream sound speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elastoshock/errors.hpp"
#include "elastoshock/tolerances.hpp"

namespace elastoshock {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

namespace detail {

inline bool all_finite(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

inline double sq(double x) { return x * x; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Equation of state p = p(rho)
// ---------------------------------------------------------------------------

struct EosSample {
  double p;
  double c2;         // p'(rho), square of the sound speed
  double d2p;        // p''(rho) of the interpolant (exact for polytropic)
  bool convex_ok;
};

class EquationOfState {
 public:
  enum class Kind { Polytropic, Tabulated };

  /// p = A rho^gamma with A > 0 and gamma > 1.
  static EquationOfState polytropic(double A, double gamma) {
    if (!detail::all_finite({A, gamma}) || A <= 0.0 || gamma <= 1.0) {
      fail(ErrorKind::InvalidParameters, "polytropic EOS requires A > 0 and gamma > 1");
    }
    EquationOfState eos;
    eos.kind_ = Kind::Polytropic;
    eos.A_ = A;
    eos.gamma_ = gamma;
    return eos;
  }

  /// Monotone cubic (Fritsch-Carlson) interpolation of (rho, p) samples.
  /// Densities must be strictly increasing and pressures strictly increasing.
  static EquationOfState tabulated(std::vector<double> rho, std::vector<double> p,
                                   double convexity_tol = 1e-12) {
    if (rho.size() != p.size() || rho.size() < 2) {
      fail(ErrorKind::InvalidParameters, "EOS table needs at least two (rho, p) samples of equal length");
    }
    for (std::size_t k = 0; k < rho.size(); ++k) {
      if (!detail::all_finite({rho[k], p[k]})) fail(ErrorKind::InvalidParameters, "EOS table entries must be finite");
      if (rho[k] <= 0.0) fail(ErrorKind::InvalidParameters, "EOS table densities must be positive");
      if (k > 0 && rho[k] <= rho[k - 1]) fail(ErrorKind::InvalidParameters, "EOS table densities must increase strictly");
      if (k > 0 && p[k] <= p[k - 1]) fail(ErrorKind::NonHyperbolic, "EOS table pressure must increase with density");
    }
    EquationOfState eos;
    eos.kind_ = Kind::Tabulated;
    eos.rho_ = std::move(rho);
    eos.p_ = std::move(p);
    eos.convexity_tol_ = convexity_tol;
    eos.build_slopes();
    eos.second_dd_ = eos.second_divided_differences();
    eos.convex_ = std::all_of(eos.second_dd_.begin(), eos.second_dd_.end(),
                              [&](double d) { return d >= -convexity_tol; });
    return eos;
  }

  Kind kind() const { return kind_; }
  double A() const { return A_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& table_rho() const { return rho_; }
  const std::vector<double>& table_p() const { return p_; }

  /// Global convexity flag: gamma > 1 for polytropic, nonnegative second
  /// divided differences of the samples for tabulated.
  bool is_convex() const { return kind_ == Kind::Polytropic ? gamma_ >= 1.0 : convex_; }

  EosSample eval(double rho) const {
    if (!std::isfinite(rho) || rho <= 0.0) fail(ErrorKind::InvalidParameters, "density must be positive and finite");
    EosSample out{};
    if (kind_ == Kind::Polytropic) {
      out.p = A_ * std::pow(rho, gamma_);
      out.c2 = A_ * gamma_ * std::pow(rho, gamma_ - 1.0);
      out.d2p = A_ * gamma_ * (gamma_ - 1.0) * std::pow(rho, gamma_ - 2.0);
      out.convex_ok = out.d2p >= 0.0;
    } else {
      if (rho < rho_.front() || rho > rho_.back()) {
        fail(ErrorKind::OutOfRange, "density " + std::to_string(rho) + " outside EOS table range");
      }
      const std::size_t k = interval(rho);
      const double h = rho_[k + 1] - rho_[k];
      const double t = (rho - rho_[k]) / h;
      const double t2 = t * t, t3 = t2 * t;
      const double y0 = p_[k], y1 = p_[k + 1], m0 = slope_[k] * h, m1 = slope_[k + 1] * h;
      out.p = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
      out.c2 = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
      out.d2p = ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1) / (h * h);
      out.convex_ok = local_convex(k);
    }
    if (!(out.c2 > 0.0)) fail(ErrorKind::NonHyperbolic, "p'(rho) <= 0 at rho = " + std::to_string(rho));
    return out;
  }

 private:
  EquationOfState() = default;

  std::size_t interval(double rho) const {
    auto it = std::upper_bound(rho_.begin(), rho_.end(), rho);
    std::size_t k = static_cast<std::size_t>(std::distance(rho_.begin(), it));
    k = k == 0 ? 0 : k - 1;
    return std::min(k, rho_.size() - 2);
  }

  void build_slopes() {
    const std::size_t n = rho_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = rho_[k + 1] - rho_[k];
      delta[k] = (p_[k + 1] - p_[k]) / h[k];
    }
    slope_.assign(n, 0.0);
    if (n == 2) {
      slope_[0] = slope_[1] = delta[0];
      return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (delta[k - 1] * delta[k] <= 0.0) continue;
      const double w1 = 2 * h[k] + h[k - 1];
      const double w2 = h[k] + 2 * h[k - 1];
      slope_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (d * d0 <= 0.0) return 0.0;
      if (d0 * d1 <= 0.0 && std::abs(d) > 3 * std::abs(d0)) return 3 * d0;
      return d;
    };
    slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  // dd[k] is the second divided difference over samples k, k+1, k+2.
  std::vector<double> second_divided_differences() const {
    std::vector<double> dd;
    for (std::size_t k = 0; k + 2 < rho_.size(); ++k) {
      const double s0 = (p_[k + 1] - p_[k]) / (rho_[k + 1] - rho_[k]);
      const double s1 = (p_[k + 2] - p_[k + 1]) / (rho_[k + 2] - rho_[k + 1]);
      dd.push_back((s1 - s0) / (rho_[k + 2] - rho_[k]));
    }
    return dd;
  }

  bool local_convex(std::size_t k) const {
    bool ok = true;
    if (k >= 1 && k - 1 < second_dd_.size()) ok = ok && second_dd_[k - 1] >= -convexity_tol_;
    if (k < second_dd_.size()) ok = ok && second_dd_[k] >= -convexity_tol_;
    return ok;
  }

  Kind kind_ = Kind::Polytropic;
  double A_ = 1.0;
  double gamma_ = 2.0;
  std::vector<double> rho_, p_, slope_, second_dd_;
  double convexity_tol_ = 1e-12;
  bool convex_ = true;
};

/// p, c^2 and the convexity flag at a single density.
inline EosSample eos_eval(const EquationOfState& eos, double rho) { return eos.eval(rho); }

// ---------------------------------------------------------------------------
// States and parameters
// ---------------------------------------------------------------------------

struct SideState {
  double rho = 1.0;
  Vec2 v = Vec2::Zero();
  Mat2 F = Mat2::Identity();
};

/// Opt-in relaxations of the parameter invariants. The gas-dynamics limit
/// (F = 0) and other singular deformations need allow_degenerate.
struct AdmissionFlags {
  bool allow_degenerate = false;
  bool allow_unit_density_ratio = false;
};

/// The six dimensionless numbers of the linearized problem plus the optional
/// upstream Mach number used only for Lax reporting.
struct ShockParameters {
  double M = 0.0;       // downstream Mach number
  double R = 0.0;       // density ratio rho+/rho-
  Mat2 F = Mat2::Zero(); // scaled downstream deformation gradient
  std::optional<double> M_minus;

  double F11() const { return F(0, 0); }
  double F12() const { return F(0, 1); }
  double F21() const { return F(1, 0); }
  double F22() const { return F(1, 1); }
};

inline void validate_state(const SideState& s, const AdmissionFlags& flags = {}) {
  if (!detail::all_finite({s.rho, s.v(0), s.v(1)}) || !s.F.allFinite()) {
    fail(ErrorKind::InvalidParameters, "state entries must be finite");
  }
  if (s.rho <= 0.0) fail(ErrorKind::InvalidParameters, "density must be positive");
  if (!flags.allow_degenerate && s.F.determinant() == 0.0) {
    fail(ErrorKind::InvalidParameters, "det F = 0 requires allow_degenerate");
  }
}

inline void validate_parameters(const ShockParameters& p, const AdmissionFlags& flags = {}) {
  if (!detail::all_finite({p.M, p.R}) || !p.F.allFinite() || (p.M_minus && !std::isfinite(*p.M_minus))) {
    fail(ErrorKind::InvalidParameters, "parameters must be finite");
  }
  if (p.M <= 0.0) fail(ErrorKind::InvalidParameters, "M must be positive");
  if (p.R <= 0.0) fail(ErrorKind::InvalidParameters, "R must be positive");
  if (p.R == 1.0 && !flags.allow_unit_density_ratio) {
    fail(ErrorKind::InvalidParameters, "R = 1 (zero density jump) is not a shock");
  }
  const double scale = std::max(1.0, p.F.squaredNorm());
  if (!flags.allow_degenerate && std::abs(p.F.determinant()) <= 1e-14 * scale) {
    fail(ErrorKind::InvalidParameters, "det F = 0 requires allow_degenerate");
  }
}

// ---------------------------------------------------------------------------
// Derived scales
// ---------------------------------------------------------------------------

struct DerivedScales {
  ShockParameters params;
  double M1 = 0, M2 = 0, M_star = 0;
  double beta = 0, sigma = 0, ell0 = 0, kappa = 0, M_tilde = 0;
  double d0 = 0, a0 = 0, d0_tilde = 0, a1 = 0, a2 = 0;
  double K = 0, K1 = 0, K2 = 0;

  double M() const { return params.M; }
  double R() const { return params.R; }
};

/// Secondary constants of the linearized problem. Throws LaxViolated unless
/// M1 < M < M*, since beta and the elastic Mach number must be real.
///
/// K = R(M^2 - M1^2) + M2^2 and K2 = 1 + M2^2 reduce to the stretching
/// constants when F12 = F21 = 0 and to their mirror images when F11 = F22 = 0.
inline DerivedScales derived_scales(const ShockParameters& p, const AdmissionFlags& flags = {},
                                    const Tolerances& tol = {}) {
  using detail::sq;
  validate_parameters(p, flags);
  DerivedScales s;
  s.params = p;
  const double M = p.M, R = p.R;
  const double M1s = sq(p.F11()) + sq(p.F12());
  const double M2s = sq(p.F21()) + sq(p.F22());
  const double Ms2 = 1.0 + M1s;
  s.M1 = std::sqrt(M1s);
  s.M2 = std::sqrt(M2s);
  s.M_star = std::sqrt(Ms2);
  const double beta2 = Ms2 - M * M;
  const double w = M * M - M1s;
  if (!(w > 0.0) || !(beta2 > 0.0)) {
    fail(ErrorKind::LaxViolated, "Lax condition M1 < M < M* fails (M = " + std::to_string(M) +
                                     ", M1 = " + std::to_string(s.M1) + ", M* = " + std::to_string(s.M_star) + ")");
  }
  s.beta = std::sqrt(beta2);
  s.M_tilde = std::sqrt(w);
  s.ell0 = p.F11() * p.F21() + p.F12() * p.F22();
  s.kappa = p.F.determinant();
  const double sigma2 = Ms2 * (1.0 + M2s) - sq(s.ell0);
  const double sigma2_alt = Ms2 + M2s + sq(s.kappa);
  if (std::abs(sigma2 - sigma2_alt) > tol.identity_abs * sigma2) {
    fail(ErrorKind::InternalInconsistency, "sigma^2 identities disagree");
  }
  s.sigma = std::sqrt(sigma2);
  s.d0 = (Ms2 + M * M) / (2.0 * M * M);
  s.a0 = -beta2 * R / (2.0 * M * M);
  s.d0_tilde = s.d0 / s.M_star;
  s.a2 = s.ell0 * s.beta / (s.M_star * M * s.sigma);
  s.a1 = beta2 * s.d0_tilde + s.a0 * (w + M2s / R) * Ms2 * s.M_star / sigma2 +
         sq(s.a2) * s.M_star * (beta2 + M * M / 2.0);
  s.K = R * w + M2s;
  s.K2 = 1.0 + M2s;
  s.K1 = M * M * s.K2 / Ms2;
  return s;
}

// ---------------------------------------------------------------------------
// Characteristic speeds and Lax conditions
// ---------------------------------------------------------------------------

/// Eigenvalues of the normal symbol at a front, in nondecreasing order.
inline std::array<double, 7> characteristic_speeds(double rho, double v_n, double F1n, double F2n, double c) {
  if (!detail::all_finite({rho, v_n, F1n, F2n, c}) || rho <= 0.0 || c <= 0.0) {
    fail(ErrorKind::InvalidParameters, "characteristic speeds need rho > 0, c > 0 and finite data");
  }
  const double elastic2 = F1n * F1n + F2n * F2n;
  if (elastic2 == 0.0) {
    fail(ErrorKind::DegenerateDeformation, "normal deformation vanishes (vortex-sheet degeneracy)");
  }
  const double slow = std::sqrt(elastic2);
  const double fast = std::sqrt(c * c + elastic2);
  return {v_n - fast, v_n - slow, v_n, v_n, v_n, v_n + slow, v_n + fast};
}

struct LaxCheck {
  bool admissible = false;
  double lower = 0.0;               // M - M1
  double upper = 0.0;               // M* - M
  std::optional<double> upstream;   // M_minus - M / sqrt(M^2 - M1^2)
};

inline LaxCheck check_lax(const ShockParameters& p) {
  using detail::sq;
  LaxCheck out;
  const double M1s = sq(p.F11()) + sq(p.F12());
  out.lower = p.M - std::sqrt(M1s);
  out.upper = std::sqrt(1.0 + M1s) - p.M;
  if (p.M_minus && out.lower > 0.0) {
    out.upstream = *p.M_minus - p.M / std::sqrt(p.M * p.M - M1s);
  }
  out.admissible = out.lower > 0.0 && out.upper > 0.0 && (!out.upstream || *out.upstream > 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Jump relations
// ---------------------------------------------------------------------------

/// Scales a shock-frame pair of states. The front is at rest; the tangential
/// velocity must be continuous and drops out after a Galilean shift.
inline ShockParameters nondimensionalize(const SideState& upstream, const SideState& downstream,
                                         const EquationOfState& eos, const Tolerances& tol = {}) {
  validate_state(upstream, {.allow_degenerate = true});
  validate_state(downstream, {.allow_degenerate = true});
  const double vscale = std::max({1.0, std::abs(upstream.v(1)), std::abs(downstream.v(1))});
  if (std::abs(downstream.v(1) - upstream.v(1)) > tol.frame * vscale) {
    fail(ErrorKind::FrameError, "tangential velocity jumps across the front");
  }
  if (!(downstream.v(0) > 0.0) || !(upstream.v(0) > 0.0)) {
    fail(ErrorKind::InvalidParameters, "normal velocities must be positive in the shock frame");
  }
  const double c_plus = std::sqrt(eos.eval(downstream.rho).c2);
  const double c_minus = std::sqrt(eos.eval(upstream.rho).c2);
  ShockParameters p;
  p.M = downstream.v(0) / c_plus;
  p.R = downstream.rho / upstream.rho;
  p.F = downstream.F / c_plus;
  p.M_minus = upstream.v(0) / c_minus;
  return p;
}

struct RankineHugoniotSolution {
  SideState upstream;     // shock frame: normal velocity replaced by the solved one
  SideState downstream;   // shock frame
  ShockParameters params;
  double front_speed = 0.0;  // front velocity in the frame of the given upstream state
  bool rarefaction = false;  // rho+ < rho- (admissible in principle, tagged)
  std::array<double, 4> residuals{};  // mass, normal momentum, [F2j], [rho F1j]
};

/// Solves the jump relations of a rectilinear front for the downstream state
/// with prescribed density rho_plus. The upstream normal velocity relative to
/// the front is an output: given rho-, rho+, F- and the EOS, the relations fix
/// the mass flux, hence the front speed.
inline RankineHugoniotSolution solve_rankine_hugoniot(const SideState& upstream, double rho_plus,
                                                      const EquationOfState& eos,
                                                      const AdmissionFlags& flags = {},
                                                      const Tolerances& tol = {}) {
  using detail::sq;
  validate_state(upstream, flags);
  if (!std::isfinite(rho_plus) || rho_plus <= 0.0) fail(ErrorKind::InvalidParameters, "rho_plus must be positive");
  const double rho_m = upstream.rho;
  if (rho_plus == rho_m) fail(ErrorKind::Degenerate, "zero density jump");

  const double p_m = eos.eval(rho_m).p;
  const double p_p = eos.eval(rho_plus).p;
  const double R = rho_plus / rho_m;
  const double jump_rho = rho_plus - rho_m;
  const double jump_p = p_p - p_m;

  SideState down;
  down.rho = rho_plus;
  down.F.row(0) = upstream.F.row(0) / R;  // [rho F1j] = 0
  down.F.row(1) = upstream.F.row(1);      // [F2j] = 0

  const double elastic2 = sq(down.F(0, 0)) + sq(down.F(0, 1));
  const double excess = jump_p / (R * jump_rho);  // (v1+)^2 - (F11+^2 + F12+^2)
  if (!(excess > 0.0) || !std::isfinite(excess)) {
    fail(ErrorKind::NoRealRoot, "jump data imply (v1+)^2 <= F11+^2 + F12+^2");
  }
  const double v1_plus = std::sqrt(excess + elastic2);
  const double v1_minus = R * v1_plus;
  down.v = Vec2(v1_plus, upstream.v(1));

  RankineHugoniotSolution sol;
  sol.upstream = upstream;
  sol.upstream.v(0) = v1_minus;
  sol.downstream = down;
  sol.front_speed = upstream.v(0) - v1_minus;
  sol.rarefaction = rho_plus < rho_m;

  const double fscale = std::max(1.0, upstream.F.cwiseAbs().maxCoeff());
  sol.residuals[0] = std::abs(rho_plus * v1_plus - rho_m * v1_minus) / (rho_m * v1_minus);
  sol.residuals[1] = std::abs(R * (sq(v1_plus) - elastic2) * jump_rho - jump_p) / std::abs(jump_p);
  sol.residuals[2] = (down.F.row(1) - upstream.F.row(1)).cwiseAbs().maxCoeff() / fscale;
  sol.residuals[3] = (rho_plus * down.F.row(0) - rho_m * upstream.F.row(0)).cwiseAbs().maxCoeff() / (rho_m * fscale);
  for (double r : sol.residuals) {
    if (!(r <= tol.residual_rel)) fail(ErrorKind::InternalInconsistency, "jump relation residual above tolerance");
  }
  sol.params = nondimensionalize(sol.upstream, sol.downstream, eos, tol);
  return sol;
}

}  // namespace elastoshock
