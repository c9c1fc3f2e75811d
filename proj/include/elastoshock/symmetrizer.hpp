#pragma once

// Dissipative symmetrizer for the wave equation of the pressure perturbation.
//
// The second-order boundary condition, completed by the wave equation and a
// trivial commutation relation, reads  A W1 + B W2 + C W3 = 0  on x1 = 0.
// In the variables V = T W it becomes V_I = G V_II, and the boundary form
// (B1 W . W) equals (G0 V_II . V_II) once H solves G^T H + H G = -G0.

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "elastoshock/core_states.hpp"

namespace elastoshock {

using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat12x9 = Eigen::Matrix<double, 12, 9>;
using Vec6c = Eigen::Matrix<std::complex<double>, 6, 1>;

struct BoundaryMatrices {
  Mat3 A, B, C;
  Mat6 G;
  Vec6c eigenvalues;
  double max_real_eigenvalue = 0.0;
};

/// A, B, C of the completed boundary condition and G = [[G1, -G2], [I, 0]]
/// with G1 = 2 (A - C)^{-1} B and G2 = (A - C)^{-1} (A + C). alpha > 1 is
/// free and only moves the roots of lambda^2 + 2 alpha lambda + 1.
inline BoundaryMatrices build_G(const DerivedScales& s, double alpha = 2.0) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidParameters, "alpha must exceed 1");
  const double M = s.M(), b2 = s.beta * s.beta;
  BoundaryMatrices out;
  out.A << 1, alpha, 0,
           0, 0, 0,
           0, 1, M * s.a2;
  out.B << -alpha, -1, 0,
           0, 0, -1,
           0, -M * s.d0_tilde, -s.M_star * s.a2;
  out.C << 0, 0, -1,
           0, 1, 0,
           0, 0, -M * s.a1 / b2;
  const Mat3 AmC = out.A - out.C;
  const double scale = std::max(1.0, AmC.norm());
  if (std::abs(AmC.determinant()) <= 1e-13 * scale * scale * scale) {
    fail(ErrorKind::SingularBlock, "A - C is numerically singular");
  }
  const Eigen::PartialPivLU<Mat3> lu(AmC);
  const Mat3 G1 = 2.0 * lu.solve(out.B);
  const Mat3 G2 = lu.solve(out.A + out.C);
  out.G.setZero();
  out.G.topLeftCorner<3, 3>() = G1;
  out.G.topRightCorner<3, 3>() = -G2;
  out.G.bottomLeftCorner<3, 3>() = Mat3::Identity();
  Eigen::EigenSolver<Mat6> es(out.G, false);
  out.eigenvalues = es.eigenvalues();
  out.max_real_eigenvalue = out.eigenvalues.real().maxCoeff();
  return out;
}

struct LyapunovSolution {
  Mat6 H;                        // symmetrised solution
  double residual = 0.0;         // ||G^T H + H G + G0|| / ||G0||
  double symmetry_defect = 0.0;  // ||H - H^T|| / ||H|| of the raw solve
  double min_eigenvalue = 0.0;
  bool positive_definite = false;
};

/// Solves G^T H + H G = -G0 as a dense 36 x 36 linear system with two steps
/// of iterative refinement.
inline LyapunovSolution solve_lyapunov(const Mat6& G, const Mat6& G0, const Tolerances& tol = {}) {
  if (!G.allFinite() || !G0.allFinite()) fail(ErrorKind::InvalidParameters, "non-finite Lyapunov data");
  if ((G0 - G0.transpose()).norm() > tol.identity_abs * G0.norm()) {
    fail(ErrorKind::InvalidParameters, "G0 must be symmetric");
  }
  if (Eigen::SelfAdjointEigenSolver<Mat6>(G0, Eigen::EigenvaluesOnly).eigenvalues()(0) <= 0.0) {
    fail(ErrorKind::InvalidParameters, "G0 must be positive definite");
  }
  Eigen::EigenSolver<Mat6> es(G, false);
  if (es.eigenvalues().real().maxCoeff() >= 0.0) {
    fail(ErrorKind::SpectrumNotStable, "G has an eigenvalue with nonnegative real part");
  }

  using Mat36 = Eigen::Matrix<double, 36, 36>;
  using Vec36 = Eigen::Matrix<double, 36, 1>;
  // Column-major vec: vec(G^T H) = (I kron G^T) vec(H), vec(H G) = (G^T kron I) vec(H).
  Mat36 op = Mat36::Zero();
  const Mat6 Gt = G.transpose();
  for (int i = 0; i < 6; ++i) op.block<6, 6>(6 * i, 6 * i) = Gt;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) op.block<6, 6>(6 * i, 6 * j).diagonal().array() += Gt(i, j);
  const Eigen::PartialPivLU<Mat36> lu(op);
  const Vec36 rhs = -Eigen::Map<const Vec36>(G0.data());
  Vec36 h = lu.solve(rhs);
  for (int it = 0; it < 2; ++it) h += lu.solve(rhs - op * h);

  LyapunovSolution out;
  const Mat6 raw = Eigen::Map<const Mat6>(h.data());
  out.symmetry_defect = (raw - raw.transpose()).norm() / raw.norm();
  out.H = 0.5 * (raw + raw.transpose());
  out.residual = (G.transpose() * out.H + out.H * G + G0).norm() / G0.norm();
  if (!(out.residual <= tol.residual_rel)) {
    fail(ErrorKind::IllConditioned, "Lyapunov residual " + std::to_string(out.residual) + " above tolerance");
  }
  out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Mat6>(out.H, Eigen::EigenvaluesOnly).eigenvalues()(0);
  out.positive_definite = out.min_eigenvalue > tol.positivity;
  return out;
}

/// T = (1/sqrt 2) P kron I3 with P the fixed 4 x 3 pattern; V = T W.
inline Mat12x9 transfer_matrix() {
  Eigen::Matrix<double, 4, 3> P;
  P << 1, 0, -1,
       0, -1, 0,
       0, -1, 0,
       1, 0, 1;
  P /= std::sqrt(2.0);
  Mat12x9 T = Mat12x9::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) T.block<3, 3>(3 * i, 3 * j) = P(i, j) * Mat3::Identity();
  return T;
}

namespace detail {

inline Mat9 blocks3(const Mat3& a, const Mat3& b, const Mat3& c, const Mat3& d, const Mat3& e, const Mat3& f,
                    const Mat3& g, const Mat3& h, const Mat3& i) {
  Mat9 m;
  m << a, b, c, d, e, f, g, h, i;
  return m;
}

// T^T (S kron H) T for a 2 x 2 sign pattern S.
inline Mat9 factored(const Mat12x9& T, const Eigen::Matrix2d& S, const Mat6& H) {
  Eigen::Matrix<double, 12, 12> big;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) big.block<6, 6>(6 * i, 6 * j) = S(i, j) * H;
  return T.transpose() * big * T;
}

}  // namespace detail

struct SymmetrizerBlocks {
  Mat3 K, L, M, N;  // K, L, M symmetric; N skew-symmetric
  Mat9 B0, B1, B2, B0_tilde, B2_tilde;
  Mat12x9 T;
  double block_factor_mismatch = 0.0;  // max over B0, B1, B2 of block vs factored form
};

/// Splits a symmetric H = [[H1, H2], [H2^T, H3]] into K, L, M, N and builds
/// the coefficient matrices of the symmetric system for the second
/// derivatives of the pressure, both from their block layout and through the
/// T^T {S kron H} T factorisation.
inline SymmetrizerBlocks assemble_symmetrizer(const Mat6& H, const DerivedScales& s, const Tolerances& tol = {}) {
  if (!H.allFinite()) fail(ErrorKind::InvalidParameters, "non-finite H");
  const double hn = std::max(H.norm(), std::numeric_limits<double>::min());
  if ((H - H.transpose()).norm() > tol.residual_rel * hn) fail(ErrorKind::AsymmetricInput, "H is not symmetric");
  const Mat3 H1 = H.topLeftCorner<3, 3>(), H2 = H.topRightCorner<3, 3>(), H3 = H.bottomRightCorner<3, 3>();
  SymmetrizerBlocks out;
  out.K = 0.5 * (H1 + H3);
  out.M = 0.5 * (H3 - H1);
  out.L = -0.5 * (H2 + H2.transpose());
  out.N = 0.5 * (H2.transpose() - H2);
  const Mat3 &K = out.K, &L = out.L, &Mb = out.M, &N = out.N;
  out.B0 = detail::blocks3(K, L, Mb, L, K, N, Mb, -N, K);
  out.B1 = detail::blocks3(L, K, N, K, L, Mb, -N, Mb, -L);
  out.B2 = detail::blocks3(Mb, -N, K, N, -Mb, L, K, L, Mb);

  out.T = transfer_matrix();
  Eigen::Matrix2d S0 = Eigen::Matrix2d::Identity(), S1, S2;
  S1 << 0, -1, -1, 0;
  S2 << -1, 0, 0, 1;
  out.block_factor_mismatch = std::max({(detail::factored(out.T, S0, H) - out.B0).cwiseAbs().maxCoeff(),
                                        (detail::factored(out.T, S1, H) - out.B1).cwiseAbs().maxCoeff(),
                                        (detail::factored(out.T, S2, H) - out.B2).cwiseAbs().maxCoeff()}) /
                                hn;
  if (out.block_factor_mismatch > tol.identity_abs) {
    fail(ErrorKind::InternalInconsistency, "block and factored forms of B0, B1, B2 disagree");
  }

  const double M = s.M(), b2 = s.beta * s.beta, Ms = s.M_star;
  out.B0_tilde = (M / b2) * (Ms * out.B0 + M * out.B1);
  out.B2_tilde = (s.sigma / (s.beta * Ms)) * out.B2 + (M * s.ell0 / (b2 * Ms)) * out.B0 + (s.ell0 / b2) * out.B1;
  return out;
}

struct SymmetrizerOptions {
  double alpha = 2.0;
  Mat6 G0 = Mat6::Identity();
};

struct SymmetrizerBundle {
  double alpha = 2.0;
  Mat3 A_mat, B_mat, C_mat;
  Mat6 G, G0, H;
  Vec6c G_eigenvalues;
  Mat3 K_b, L_b, M_b, N_b;
  Mat9 B0, B1, B2, B0_tilde, B2_tilde;
  Mat12x9 T_mat;
  double lyapunov_residual = 0.0;
  double symmetry_defect = 0.0;
  double block_factor_mismatch = 0.0;
  double H_min_eigenvalue = 0.0;
  double B0_tilde_min_eigenvalue = 0.0;
  bool H_positive = false;
  bool B0_tilde_positive = false;
};

/// G, the Lyapunov solution H and every derived matrix, with positivity
/// certificates. Throws SpectrumNotStable when G is not Hurwitz.
inline SymmetrizerBundle build_symmetrizer(const DerivedScales& s, const SymmetrizerOptions& opt = {},
                                           const Tolerances& tol = {}) {
  const BoundaryMatrices bm = build_G(s, opt.alpha);
  const LyapunovSolution ly = solve_lyapunov(bm.G, opt.G0, tol);
  const SymmetrizerBlocks blk = assemble_symmetrizer(ly.H, s, tol);
  SymmetrizerBundle b;
  b.alpha = opt.alpha;
  b.A_mat = bm.A;
  b.B_mat = bm.B;
  b.C_mat = bm.C;
  b.G = bm.G;
  b.G_eigenvalues = bm.eigenvalues;
  b.G0 = opt.G0;
  b.H = ly.H;
  b.K_b = blk.K;
  b.L_b = blk.L;
  b.M_b = blk.M;
  b.N_b = blk.N;
  b.B0 = blk.B0;
  b.B1 = blk.B1;
  b.B2 = blk.B2;
  b.B0_tilde = blk.B0_tilde;
  b.B2_tilde = blk.B2_tilde;
  b.T_mat = blk.T;
  b.lyapunov_residual = ly.residual;
  b.symmetry_defect = ly.symmetry_defect;
  b.block_factor_mismatch = blk.block_factor_mismatch;
  b.H_min_eigenvalue = ly.min_eigenvalue;
  b.H_positive = ly.positive_definite;
  b.B0_tilde_min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<Mat9>(b.B0_tilde, Eigen::EigenvaluesOnly).eigenvalues()(0);
  b.B0_tilde_positive = b.B0_tilde_min_eigenvalue > tol.positivity;
  return b;
}

/// W = (W1, W2, W3) from V = (V1, V2, V3, V4) = T W; requires V2 = V3.
inline Vec9 w_from_v(const Eigen::Matrix<double, 12, 1>& V) {
  const double r2 = std::sqrt(2.0);
  Vec9 W;
  W.segment<3>(0) = (V.segment<3>(0) + V.segment<3>(9)) / r2;
  W.segment<3>(3) = -r2 * V.segment<3>(3);
  W.segment<3>(6) = (V.segment<3>(9) - V.segment<3>(0)) / r2;
  return W;
}

struct DissipativityProbe {
  double min_normalized = 0.0;       // min over samples of (B1 W . W) / |V_II|^2
  double max_identity_defect = 0.0;  // max relative |(B1 W . W) - (G0 V_II . V_II)|
  double max_boundary_residual = 0.0;  // max |A W1 + B W2 + C W3| / |W|
  int samples = 0;
};

/// Samples boundary traces V_II, maps them through V_I = G V_II and evaluates
/// the boundary quadratic form. Deterministic for a fixed seed.
inline DissipativityProbe dissipativity_probe(const SymmetrizerBundle& b, int samples, std::uint64_t seed = 1) {
  DissipativityProbe out;
  out.samples = samples;
  out.min_normalized = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    Vec6 v2;
    for (int i = 0; i < 6; ++i) v2(i) = normal(rng);
    const double n2 = v2.squaredNorm();
    if (n2 == 0.0) continue;
    Eigen::Matrix<double, 12, 1> V;
    V.head<6>() = b.G * v2;
    V.tail<6>() = v2;
    const Vec9 W = w_from_v(V);
    const double form = W.dot(b.B1 * W);
    const double expected = v2.dot(b.G0 * v2);
    out.min_normalized = std::min(out.min_normalized, form / n2);
    out.max_identity_defect = std::max(out.max_identity_defect, std::abs(form - expected) / std::abs(expected));
    const Eigen::Vector3d bc = b.A_mat * W.segment<3>(0) + b.B_mat * W.segment<3>(3) + b.C_mat * W.segment<3>(6);
    out.max_boundary_residual = std::max(out.max_boundary_residual, bc.norm() / W.norm());
  }
  return out;
}

}  // namespace elastoshock
