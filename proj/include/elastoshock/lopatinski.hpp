#pragma once

// Normal-mode analysis of the linearized shock problem: symbols of the
// interior system and of the boundary conditions, roots of the dispersion
// relation, the decaying root lambda+, the boundary kernel and the
// Lopatinski determinant, plus the closed-form verdict for the two special
// deformation patterns and a numerical hemisphere scan for general F.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "elastoshock/classification.hpp"
#include "elastoshock/core_states.hpp"

namespace elastoshock {

using cplx = std::complex<double>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Mat6x7 = Eigen::Matrix<double, 6, 7>;
using Mat7c = Eigen::Matrix<cplx, 7, 7>;
using Mat6x7c = Eigen::Matrix<cplx, 6, 7>;
using Vec7c = Eigen::Matrix<cplx, 7, 1>;

// Component order of U and of every 7-vector below.
enum Component : int { P = 0, V1 = 1, V2 = 2, F11c = 3, F21c = 4, F12c = 5, F22c = 6 };

/// s = eta + i xi is dual to t, i omega to x2.
struct Frequency {
  double eta = 0.0;
  double xi = 0.0;
  double omega = 0.0;

  cplx s() const { return {eta, xi}; }
  double norm() const { return std::sqrt(eta * eta + xi * xi + omega * omega); }
};

inline void validate_frequency(const Frequency& f) {
  if (!detail::all_finite({f.eta, f.xi, f.omega})) fail(ErrorKind::InvalidParameters, "non-finite frequency");
  if (f.eta < 0.0) fail(ErrorKind::InvalidParameters, "eta must be nonnegative");
  if (f.norm() == 0.0) fail(ErrorKind::InvalidParameters, "frequency must be nonzero");
}

struct Symbols {
  Mat7 A0, A1, A2;
  Mat6x7 Bnd0, Bnd2, BndC;
};

inline Symbols assemble_symbols(const DerivedScales& sc) {
  const ShockParameters& p = sc.params;
  const double M2 = p.M * p.M, R = p.R;
  Symbols y;
  y.A0 = Mat7::Identity();
  y.A0(V1, V1) = y.A0(V2, V2) = M2;

  y.A1 = Mat7::Identity();
  y.A1(P, V1) = y.A1(V1, P) = 1.0;
  y.A1(V1, V1) = y.A1(V2, V2) = M2;
  y.A2 = Mat7::Zero();
  y.A2(P, V2) = y.A2(V2, P) = 1.0;
  // Velocity couples to the columns of F: v1 to (F11, F12), v2 to (F21, F22)
  // with coefficient -F1j in A1 and -F2j in A2.
  const std::array<std::pair<int, int>, 2> vel_f1 = {{{V1, F11c}, {V2, F21c}}};
  const std::array<std::pair<int, int>, 2> vel_f2 = {{{V1, F12c}, {V2, F22c}}};
  for (const auto& [v, f] : vel_f1) {
    y.A1(v, f) = y.A1(f, v) = -p.F11();
    y.A2(v, f) = y.A2(f, v) = -p.F21();
  }
  for (const auto& [v, f] : vel_f2) {
    y.A1(v, f) = y.A1(f, v) = -p.F12();
    y.A2(v, f) = y.A2(f, v) = -p.F22();
  }

  y.Bnd0.setZero();
  y.Bnd2.setZero();
  y.BndC.setZero();
  y.BndC(0, V1) = 1.0;
  y.BndC(0, P) = sc.d0;
  y.BndC(0, V2) = -sc.ell0 / (M2 * R);

  y.Bnd0(1, V2) = 1.0;
  y.Bnd2(1, P) = -sc.a0;
  y.Bnd2(1, V2) = -sc.ell0 / M2;

  y.BndC(2, F11c) = 1.0;
  y.BndC(2, P) = p.F11();
  y.BndC(2, V2) = -p.F21() / R;
  y.BndC(3, F12c) = 1.0;
  y.BndC(3, P) = p.F12();
  y.BndC(3, V2) = -p.F22() / R;
  y.BndC(4, F21c) = 1.0;
  y.BndC(4, V2) = -p.F11();
  y.BndC(5, F22c) = 1.0;
  y.BndC(5, V2) = -p.F12();
  return y;
}

/// s A0 + lambda A1 + i omega A2.
inline Mat7c interior_symbol(const Symbols& y, cplx s, cplx lambda, double omega) {
  return s * y.A0.cast<cplx>() + lambda * y.A1.cast<cplx>() + cplx(0.0, omega) * y.A2.cast<cplx>();
}

/// s Bnd0 + i omega Bnd2 + BndC.
inline Mat6x7c boundary_symbol(const Symbols& y, cplx s, double omega) {
  return s * y.Bnd0.cast<cplx>() + cplx(0.0, omega) * y.Bnd2.cast<cplx>() + y.BndC.cast<cplx>();
}

namespace detail {

// Roots of a z^2 + b z + c avoiding cancellation.
inline std::array<cplx, 2> quadratic_roots(cplx a, cplx b, cplx c) {
  const cplx disc = std::sqrt(b * b - 4.0 * a * c);
  const cplx q1 = -0.5 * (b + disc), q2 = -0.5 * (b - disc);
  const cplx q = std::abs(q1) >= std::abs(q2) ? q1 : q2;
  if (q == cplx(0.0)) return {cplx(0.0), cplx(0.0)};
  return {q / a, c / q};
}

inline double freq_scale(cplx s, double omega) { return std::abs(s) + std::abs(omega); }

// Right singular vector of the smallest singular value.
template <typename Mat>
Vec7c smallest_right_singular(const Mat& m, double* ratio = nullptr) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (ratio) *ratio = sv(sv.size() - 1) / sv(0);
  return svd.matrixV().col(6);
}

// Unit norm, first non-negligible component real and positive.
inline Vec7c phase_fix(Vec7c v) {
  v /= v.norm();
  const double big = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < 7; ++i) {
    if (std::abs(v(i)) > 1e-12 * big) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  }
  return v;
}

}  // namespace detail

/// Roots of the factor of the dispersion relation carrying lambda+:
/// -beta^2 l^2 + 2 (M^2 s - i omega l0) l + M^2 s^2 + K2 omega^2 = 0.
inline std::array<cplx, 2> decaying_factor_roots(const DerivedScales& sc, cplx s, double omega) {
  const double M2 = sc.M() * sc.M();
  const cplx iw(0.0, omega);
  return detail::quadratic_roots(-sc.beta * sc.beta, 2.0 * (M2 * s - iw * sc.ell0),
                                 M2 * s * s + sc.K2 * omega * omega);
}

struct DispersionRoots {
  std::array<cplx, 7> roots;    // -s (three times), the two roots of each quadratic factor
  double max_residual = 0.0;    // max over roots of sigma_min / sigma_max of s A0 + lambda A1 + i omega A2
};

inline DispersionRoots dispersion_roots(const DerivedScales& sc, cplx s, double omega) {
  if (s == cplx(0.0) && omega == 0.0) fail(ErrorKind::InvalidParameters, "s and omega both vanish");
  const double M2 = sc.M() * sc.M();
  const cplx iw(0.0, omega);
  const auto q1 = detail::quadratic_roots(M2 - sc.M1 * sc.M1, 2.0 * (M2 * s - iw * sc.ell0),
                                          M2 * s * s + omega * omega * sc.M2 * sc.M2);
  const auto q2 = decaying_factor_roots(sc, s, omega);
  DispersionRoots out;
  out.roots = {-s, -s, -s, q1[0], q1[1], q2[0], q2[1]};
  const Symbols y = assemble_symbols(sc);
  for (const cplx& l : out.roots) {
    double ratio = 0.0;
    Eigen::JacobiSVD<Mat7c> svd(interior_symbol(y, s, l, omega));
    ratio = svd.singularValues()(6) / svd.singularValues()(0);
    out.max_residual = std::max(out.max_residual, ratio);
  }
  return out;
}

/// The root of the decaying factor with positive real part (eta > 0), or its
/// limit as eta -> +0 (eta = 0): a geometric eta schedule, Richardson
/// extrapolation, then the nearest exact root at eta = 0.
inline cplx lambda_plus(const DerivedScales& sc, cplx s, double omega) {
  const double eta = s.real();
  if (!std::isfinite(eta) || !std::isfinite(s.imag()) || !std::isfinite(omega)) {
    fail(ErrorKind::InvalidParameters, "non-finite frequency");
  }
  if (eta < 0.0) fail(ErrorKind::InvalidParameters, "lambda+ is defined for Re s >= 0 only");
  const double scale = detail::freq_scale(s, omega);
  if (scale == 0.0) fail(ErrorKind::InvalidParameters, "frequency must be nonzero");

  auto pick = [&](cplx ss) {
    const auto r = decaying_factor_roots(sc, ss, omega);
    if (std::max(std::abs(r[0].real()), std::abs(r[1].real())) <= 1e-13 * scale) {
      fail(ErrorKind::SelectionAmbiguous, "both roots lie on the imaginary axis at eta > 0");
    }
    return r[0].real() >= r[1].real() ? r[0] : r[1];
  };
  if (eta > 0.0) return pick(s);

  cplx prev{}, last{};
  for (int k = 0; k <= 20; ++k) {
    prev = last;
    last = pick(cplx(1e-2 * std::ldexp(1.0, -k) * scale, s.imag()));
  }
  const cplx extrapolated = 2.0 * last - prev;
  const auto exact = decaying_factor_roots(sc, s, omega);
  return std::abs(exact[0] - extrapolated) <= std::abs(exact[1] - extrapolated) ? exact[0] : exact[1];
}

struct BoundaryKernel {
  Vec7c U0;
  double residual = 0.0;    // ||row-normalised symbol * U0||
  double rank_ratio = 0.0;  // sigma6 / sigma1
};

/// Null vector of the boundary symbol, each row scaled to unit norm first.
inline BoundaryKernel boundary_kernel(const DerivedScales& sc, cplx s, double omega) {
  Mat6x7c b = boundary_symbol(assemble_symbols(sc), s, omega);
  for (int i = 0; i < 6; ++i) {
    const double n = b.row(i).norm();
    if (n > 0.0) b.row(i) /= n;
  }
  Eigen::JacobiSVD<Mat6x7c> svd(b, Eigen::ComputeFullV);
  BoundaryKernel out;
  out.rank_ratio = svd.singularValues()(5) / svd.singularValues()(0);
  if (!(out.rank_ratio > 1e-8)) fail(ErrorKind::RankDeficient, "boundary symbol has rank below 6");
  out.U0 = detail::phase_fix(svd.matrixV().col(6));
  out.residual = (b * out.U0).norm();
  return out;
}

/// Closed-form kernel of the boundary symbol, polynomial in (s, omega):
/// p = s - i omega l0 / M^2, v2 = i omega a0, the rest from the algebraic rows.
inline Vec7c analytic_kernel(const DerivedScales& sc, cplx s, double omega) {
  const ShockParameters& q = sc.params;
  const double M2 = q.M * q.M, R = q.R;
  const cplx iw(0.0, omega);
  const cplx p = s - iw * sc.ell0 / M2;
  const cplx v2 = iw * sc.a0;
  Vec7c u;
  u(P) = p;
  u(V2) = v2;
  u(V1) = -sc.d0 * p + (sc.ell0 / (M2 * R)) * v2;
  u(F11c) = -q.F11() * p + (q.F21() / R) * v2;
  u(F12c) = -q.F12() * p + (q.F22() / R) * v2;
  u(F21c) = q.F11() * v2;
  u(F22c) = q.F12() * v2;
  return u;
}

struct ModeSolution {
  Frequency freq;
  cplx lambda_plus;
  std::array<cplx, 7> roots_all;
  Vec7c kernel_U0;
  double kernel_residual = 0.0;
  cplx det_L;
  cplx det_L_alt;
  std::array<int, 6> rows_used{};
};

namespace detail {

// Six rows of L chosen by column-pivoted QR of L^T, in increasing order.
inline std::array<int, 6> independent_rows(const Mat7c& L) {
  Eigen::ColPivHouseholderQR<Mat7c> qr(L.transpose());
  std::array<int, 6> rows{};
  for (int k = 0; k < 6; ++k) rows[k] = qr.colsPermutation().indices()(k);
  std::sort(rows.begin(), rows.end());
  return rows;
}

inline cplx bordered_det(const Mat7c& L, const Vec7c& a, const std::array<int, 6>& rows) {
  Mat7c m;
  m.row(0) = a.transpose();
  for (int k = 0; k < 6; ++k) m.row(k + 1) = L.row(rows[k]);
  return m.determinant();
}

}  // namespace detail

/// lambda+, the boundary kernel and both forms of the Lopatinski function:
/// det_L borders six independent rows of L(lambda+) with (A1 U0)^T, det_L_alt
/// is the bilinear product (A1 U0)^T r with r the unit null vector of L(lambda+).
inline ModeSolution mode_solution(const DerivedScales& sc, const Frequency& f) {
  validate_frequency(f);
  const cplx s = f.s();
  const Symbols y = assemble_symbols(sc);
  ModeSolution out;
  out.freq = f;
  out.lambda_plus = lambda_plus(sc, s, f.omega);
  out.roots_all = dispersion_roots(sc, s, f.omega).roots;
  const BoundaryKernel k = boundary_kernel(sc, s, f.omega);
  out.kernel_U0 = k.U0;
  out.kernel_residual = k.residual;
  const Mat7c L = interior_symbol(y, s, out.lambda_plus, f.omega);
  const Vec7c a = y.A1.cast<cplx>() * out.kernel_U0;
  out.rows_used = detail::independent_rows(L);
  out.det_L = detail::bordered_det(L, a, out.rows_used);
  const Vec7c r = detail::phase_fix(detail::smallest_right_singular(L));
  out.det_L_alt = a.transpose() * r;
  return out;
}

inline std::pair<cplx, cplx> lopatinski_det(const DerivedScales& sc, const Frequency& f) {
  const ModeSolution m = mode_solution(sc, f);
  return {m.det_L, m.det_L_alt};
}

/// Scale-free Lopatinski measure in [0, 1]: |(A1 u)^T r| / |A1 u| with u the
/// normalised analytic kernel and r the unit null vector of L(lambda).
inline double lopatinski_measure(const DerivedScales& sc, const Symbols& y, cplx s, double omega, cplx lambda) {
  Vec7c u = analytic_kernel(sc, s, omega);
  u /= u.norm();
  const Vec7c a = y.A1.cast<cplx>() * u;
  const Vec7c r = detail::smallest_right_singular(interior_symbol(y, s, lambda, omega));
  return std::abs(cplx(a.transpose() * r)) / a.norm();
}

struct SpectralVerdict {
  StabilityClass cls = StabilityClass::Indeterminate;
  std::optional<Frequency> witness;   // unit-sphere point of the zero, or of the grid minimum
  std::optional<cplx> witness_lambda;
  double min_abs_det = 0.0;
  double median_abs_det = 0.0;
  bool transition = false;            // closed form: K at the uniform/neutral threshold
  int grid_points = 0;
  int excluded_points = 0;
  int candidates = 0;
};

struct StretchingWitness {
  double xi = 0.0;     // at eta = 0, omega = 1
  double delta = 0.0;
};

/// Neutral zero of the closed-form problem at omega = 1: delta = sqrt(K - K2) / beta
/// and xi + delta = M* sqrt(K - K1) / (M beta). Requires K >= K1 + K2.
inline StretchingWitness stretching_witness(const DerivedScales& sc) {
  StretchingWitness w;
  w.delta = std::sqrt(std::max(0.0, sc.K - sc.K2)) / sc.beta;
  w.xi = sc.M_star * std::sqrt(std::max(0.0, sc.K - sc.K1)) / (sc.M() * sc.beta) - w.delta;
  return w;
}

/// Closed-form verdict for F12 = F21 = 0 or F11 = F22 = 0: uniformly stable
/// for K < K1 + K2, neutrally stable otherwise. Never violent.
inline SpectralVerdict classify_stretching(const DerivedScales& sc, const Tolerances& tol = {}) {
  if (!detect_pattern(sc.params.F, tol.pattern)) {
    fail(ErrorKind::PatternMismatch, "deformation is neither stretching nor antidiagonal");
  }
  SpectralVerdict v;
  const double threshold = sc.K1 + sc.K2;
  v.transition = std::abs(sc.K - threshold) <= tol.zero_band * std::max(1.0, threshold);
  if (sc.K < threshold && !v.transition) {
    v.cls = StabilityClass::UniformlyStable;
    return v;
  }
  v.cls = StabilityClass::NeutrallyStable;
  const StretchingWitness w = stretching_witness(sc);
  const double n = std::sqrt(w.xi * w.xi + 1.0);
  v.witness = Frequency{0.0, w.xi / n, 1.0 / n};
  return v;
}

struct GridConfig {
  int n_elev = 256;
  int n_azim = 256;
  double zero_tol = 1e-10;   // zero when measure < zero_tol * median
  double band = 1e-6;        // inconclusive when zero_tol * median <= measure < band * median
  int max_candidates = 24;
  int boundary_factor = 8;   // eta = 0 circle sampled at boundary_factor * n_azim points
  int threads = 1;
};

namespace detail {

struct Polished {
  cplx s;
  cplx lambda;
  double omega = 0.0;
  bool converged = false;
};

// Newton iteration in s at fixed omega on the holomorphic bordered
// determinant, with lambda continued along the nearest root.
inline Polished newton_polish(const DerivedScales& sc, const Symbols& y, cplx s, double omega, cplx lambda) {
  const Mat7c L0 = interior_symbol(y, s, lambda, omega);
  const std::array<int, 6> rows = independent_rows(L0);
  const Mat7 A1 = y.A1;
  auto eval = [&](cplx ss, cplx lam_prev, cplx* lam_out) {
    const auto r = decaying_factor_roots(sc, ss, omega);
    const cplx lam = std::abs(r[0] - lam_prev) <= std::abs(r[1] - lam_prev) ? r[0] : r[1];
    if (lam_out) *lam_out = lam;
    const Vec7c a = A1.cast<cplx>() * analytic_kernel(sc, ss, omega);
    return bordered_det(interior_symbol(y, ss, lam, omega), a, rows);
  };
  Polished out{s, lambda, omega, false};
  cplx f = eval(s, lambda, &out.lambda);
  for (int it = 0; it < 80; ++it) {
    const double scale = freq_scale(out.s, omega);
    const double h = 1e-7 * scale;
    const cplx fp = eval(out.s + h, out.lambda, nullptr), fm = eval(out.s - h, out.lambda, nullptr);
    const cplx deriv = (fp - fm) / (2.0 * h);
    if (deriv == cplx(0.0) || !std::isfinite(std::abs(deriv))) break;
    cplx step = -f / deriv;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      cplx lam_new;
      const cplx f_new = eval(out.s + step, out.lambda, &lam_new);
      if (std::abs(f_new) < std::abs(f) || std::abs(f_new) == 0.0) {
        out.s += step;
        out.lambda = lam_new;
        f = f_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || std::abs(step) <= 1e-14 * scale || f == cplx(0.0)) {
      out.converged = accepted || std::abs(step) <= 1e-12 * scale;
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Scans the Lopatinski measure over the hemisphere eta = sin(phi),
/// (xi, omega) = cos(phi) (cos psi, sin psi), polishes local minima by Newton
/// in s and classifies: a zero with Re s > 0 is violent, zeros only at
/// Re s = 0 are neutral. Throws ScanInconclusive when the best polished
/// candidate lands between the zero tolerance and the band.
inline SpectralVerdict classify_spectral(const DerivedScales& sc, const GridConfig& cfg = {}) {
  if (cfg.n_elev < 2 || cfg.n_azim < 4 || cfg.boundary_factor < 1) {
    fail(ErrorKind::InvalidParameters, "spectral grid too coarse");
  }
  const Symbols y = assemble_symbols(sc);
  const int ne = cfg.n_elev, na = cfg.n_azim, n = ne * na;
  const double half_pi = std::acos(0.0);
  auto point = [&](int idx) {
    const int i = idx / na, j = idx % na;
    const double phi = (i + 0.5) * half_pi / ne, psi = 4.0 * half_pi * j / na;
    return Frequency{std::sin(phi), std::cos(phi) * std::cos(psi), std::cos(phi) * std::sin(psi)};
  };

  std::vector<double> measure(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<cplx> lam(n);
  auto work = [&](int begin, int end) {
    for (int idx = begin; idx < end; ++idx) {
      const Frequency f = point(idx);
      try {
        lam[idx] = lambda_plus(sc, f.s(), f.omega);
        measure[idx] = lopatinski_measure(sc, y, f.s(), f.omega, lam[idx]);
      } catch (const Error&) {
      }
    }
  };
  const int threads = std::max(1, std::min(cfg.threads, ne));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t * chunk, std::min(n, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }

  SpectralVerdict v;
  v.grid_points = n;
  std::vector<double> finite;
  finite.reserve(n);
  for (double m : measure) {
    if (std::isfinite(m)) finite.push_back(m);
  }
  v.excluded_points = n - static_cast<int>(finite.size());
  if (finite.empty()) fail(ErrorKind::ScanInconclusive, "no grid point could be evaluated");
  std::nth_element(finite.begin(), finite.begin() + finite.size() / 2, finite.end());
  v.median_abs_det = finite[finite.size() / 2];
  const double median = v.median_abs_det;

  // Local minima, ties broken by grid index.
  std::vector<int> cands;
  int best = -1;
  for (int idx = 0; idx < n; ++idx) {
    if (!std::isfinite(measure[idx])) continue;
    if (best < 0 || measure[idx] < measure[best]) best = idx;
    const int i = idx / na, j = idx % na;
    bool is_min = true;
    for (int di = -1; di <= 1 && is_min; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int ii = i + di;
        if (ii < 0 || ii >= ne) continue;
        const int nb = ii * na + (j + dj + na) % na;
        if (std::isfinite(measure[nb]) && measure[nb] < measure[idx]) {
          is_min = false;
          break;
        }
      }
    }
    if (is_min) cands.push_back(idx);
  }
  std::stable_sort(cands.begin(), cands.end(), [&](int a, int b) { return measure[a] < measure[b]; });
  if (static_cast<int>(cands.size()) > cfg.max_candidates) cands.resize(cfg.max_candidates);
  v.candidates = static_cast<int>(cands.size());
  v.min_abs_det = measure[best];
  v.witness = point(best);

  std::optional<std::pair<Frequency, cplx>> violent, neutral;
  double neutral_measure = 0.0, closest_miss = std::numeric_limits<double>::infinity();
  for (int idx : cands) {
    const Frequency f = point(idx);
    if (std::abs(f.omega) < 1e-6) continue;  // omega = 0 carries no zero besides s = 0
    const auto pol = detail::newton_polish(sc, y, f.s(), f.omega, lam[idx]);
    const double scale = detail::freq_scale(pol.s, f.omega);
    const double re = pol.s.real() / scale;
    if (!std::isfinite(re) || re < -1e-8) continue;
    if (re > 1e-8) {
      cplx lp;
      try {
        lp = lambda_plus(sc, pol.s, f.omega);
      } catch (const Error&) {
        continue;
      }
      if (std::abs(lp - pol.lambda) > 1e-6 * (std::abs(lp) + scale)) continue;
      const double m = lopatinski_measure(sc, y, pol.s, f.omega, lp);
      if (m < cfg.zero_tol * median) {
        if (!violent) violent = {Frequency{pol.s.real(), pol.s.imag(), f.omega}, lp};
      } else {
        closest_miss = std::min(closest_miss, m);
      }
      continue;
    }
    const cplx s0(0.0, pol.s.imag());
    cplx lp;
    try {
      lp = lambda_plus(sc, s0, f.omega);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(lp - pol.lambda) > 1e-6 * (std::abs(lp) + scale)) continue;
    const double m = lopatinski_measure(sc, y, s0, f.omega, lp);
    if (m < cfg.zero_tol * median) {
      if (!neutral || m < neutral_measure) {
        neutral = {Frequency{0.0, s0.imag(), f.omega}, lp};
        neutral_measure = m;
      }
    } else {
      closest_miss = std::min(closest_miss, m);
    }
  }

  // Boundary circle eta = 0: neutral zeros sit here, and the hemisphere grid
  // never touches it. Sample finely, then golden-section each local minimum.
  if (!violent) {
    const int nb = cfg.boundary_factor * na;
    const double two_pi = 4.0 * half_pi;
    auto bmeasure = [&](double psi, cplx* lp_out) {
      const double xi = std::cos(psi), om = std::sin(psi);
      if (std::abs(om) < 1e-6) return std::numeric_limits<double>::quiet_NaN();
      try {
        const cplx lp = lambda_plus(sc, cplx(0.0, xi), om);
        if (lp_out) *lp_out = lp;
        return lopatinski_measure(sc, y, cplx(0.0, xi), om, lp);
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    std::vector<double> mb(nb);
    for (int k = 0; k < nb; ++k) mb[k] = bmeasure(two_pi * k / nb, nullptr);
    std::vector<int> bc;
    for (int k = 0; k < nb; ++k) {
      const double a = mb[(k + nb - 1) % nb], c = mb[(k + 1) % nb];
      if (std::isfinite(mb[k]) && !(a < mb[k]) && !(c < mb[k])) bc.push_back(k);
    }
    std::stable_sort(bc.begin(), bc.end(), [&](int a, int b) { return mb[a] < mb[b]; });
    if (static_cast<int>(bc.size()) > cfg.max_candidates) bc.resize(cfg.max_candidates);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k : bc) {
      double lo = two_pi * (k - 1) / nb, hi = two_pi * (k + 1) / nb;
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = bmeasure(x1, nullptr), f2 = bmeasure(x2, nullptr);
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (!(f2 < f1)) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - g * (hi - lo);
          f1 = bmeasure(x1, nullptr);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + g * (hi - lo);
          f2 = bmeasure(x2, nullptr);
        }
      }
      const double psi = f1 < f2 ? x1 : x2;
      cplx lp;
      const double m = bmeasure(psi, &lp);
      if (!std::isfinite(m)) continue;
      if (m < cfg.zero_tol * median) {
        if (!neutral || m < neutral_measure) {
          neutral = {Frequency{0.0, std::cos(psi), std::sin(psi)}, lp};
          neutral_measure = m;
        }
      } else {
        closest_miss = std::min(closest_miss, m);
      }
    }
  }

  auto unit = [](Frequency f) {
    const double r = f.norm();
    return Frequency{f.eta / r, f.xi / r, f.omega / r};
  };
  if (violent) {
    v.cls = StabilityClass::ViolentlyUnstable;
    v.witness = unit(violent->first);
    v.witness_lambda = violent->second / violent->first.norm();
    v.min_abs_det = 0.0;
    return v;
  }
  if (neutral) {
    v.cls = StabilityClass::NeutrallyStable;
    v.witness = unit(neutral->first);
    v.witness_lambda = neutral->second / neutral->first.norm();
    v.min_abs_det = std::min(v.min_abs_det, neutral_measure);
    return v;
  }
  v.min_abs_det = std::min(v.min_abs_det, closest_miss);
  if (v.min_abs_det < cfg.band * median) {
    fail(ErrorKind::ScanInconclusive, "smallest Lopatinski measure " + std::to_string(v.min_abs_det) +
                                          " lies in the indeterminate band");
  }
  v.cls = StabilityClass::UniformlyStable;
  return v;
}

}  // namespace elastoshock
