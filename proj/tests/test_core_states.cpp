#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "elastoshock/core_states.hpp"

using namespace elastoshock;

namespace {

ShockParameters stretching(double f11, double f22, double M, double R) {
  ShockParameters p;
  p.M = M;
  p.R = R;
  p.F << f11, 0.0, 0.0, f22;
  return p;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InternalInconsistency;
}

}  // namespace

TEST(EquationOfState, PolytropicValues) {
  const auto eos = EquationOfState::polytropic(1.0, 2.0);
  auto a = eos_eval(eos, 1.5);
  EXPECT_DOUBLE_EQ(a.p, 2.25);
  EXPECT_DOUBLE_EQ(a.c2, 3.0);
  EXPECT_TRUE(a.convex_ok);
  auto b = eos_eval(eos, 1.0);
  EXPECT_DOUBLE_EQ(b.p, 1.0);
  EXPECT_DOUBLE_EQ(b.c2, 2.0);
}

TEST(EquationOfState, TabulatedMatchesSquareLaw) {
  std::vector<double> rho, p;
  for (int k = 0; k <= 20; ++k) {
    rho.push_back(0.5 + 0.1 * k);
    p.push_back(rho.back() * rho.back());
  }
  const auto eos = EquationOfState::tabulated(rho, p);
  EXPECT_TRUE(eos.is_convex());
  const auto s = eos_eval(eos, 1.25);
  EXPECT_NEAR(s.p, 1.5625, 1e-4);
  EXPECT_NEAR(s.c2, 2.5, 1e-2);
  EXPECT_TRUE(s.convex_ok);
  EXPECT_EQ(kind_of([&] { eos.eval(3.0); }), ErrorKind::OutOfRange);
}

TEST(EquationOfState, NonConvexTableFlagged) {
  const auto eos = EquationOfState::tabulated({1.0, 2.0, 3.0, 4.0}, {1.0, 3.0, 4.0, 4.5});
  EXPECT_FALSE(eos.is_convex());
}

TEST(EquationOfState, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { EquationOfState::polytropic(1.0, 1.0); }), ErrorKind::InvalidParameters);
  EXPECT_EQ(kind_of([] { EquationOfState::tabulated({1.0, 2.0}, {2.0, 1.0}); }), ErrorKind::NonHyperbolic);
}

TEST(DerivedScales, ReferencePoint) {
  const auto s = derived_scales(stretching(0.5, 0.8, 0.9, 2.0));
  EXPECT_NEAR(s.M1, 0.5, 1e-15);
  EXPECT_NEAR(s.M2, 0.8, 1e-15);
  EXPECT_NEAR(s.M_star, 1.118033988749895, 1e-12);
  EXPECT_NEAR(s.beta, 0.6633249580710799, 1e-12);
  EXPECT_EQ(s.ell0, 0.0);
  EXPECT_NEAR(s.kappa, 0.4, 1e-15);
  EXPECT_NEAR(s.sigma, 1.4317821063276353, 1e-12);
  EXPECT_NEAR(s.M_tilde, 0.7483314773547883, 1e-12);
  EXPECT_NEAR(s.d0, 1.2716049382716049, 1e-12);
  EXPECT_NEAR(s.a0, -0.5432098765432098, 1e-12);
  EXPECT_NEAR(s.K, 1.76, 1e-12);
  EXPECT_NEAR(s.K2, 1.64, 1e-12);
  EXPECT_NEAR(s.K1, 1.06272, 1e-12);
  EXPECT_EQ(s.a2, 0.0);
}

TEST(DerivedScales, SigmaIdentitiesAtRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.2, 1.2), t(0.02, 0.98), r(1.05, 6.0);
  for (int k = 0; k < 2000; ++k) {
    ShockParameters p;
    p.F << u(rng), u(rng), u(rng), u(rng);
    const double m1 = std::hypot(p.F11(), p.F12()), ms = std::sqrt(1 + m1 * m1);
    p.M = m1 + t(rng) * (ms - m1);
    p.R = r(rng);
    const auto s = derived_scales(p);
    const double s2 = s.sigma * s.sigma;
    EXPECT_LT(std::abs(s2 - (s.M_star * s.M_star * (1 + s.M2 * s.M2) - s.ell0 * s.ell0)), 1e-12 * s2);
    EXPECT_LT(std::abs(s2 - (s.M_star * s.M_star + s.M2 * s.M2 + s.kappa * s.kappa)), 1e-12 * s2);
    EXPECT_LT(s.ell0 * s.ell0, p.M * p.M * s.M2 * s.M2 + 1e-14);
  }
}

TEST(DerivedScales, LaxViolation) {
  EXPECT_EQ(kind_of([] { derived_scales(stretching(0.5, 0.8, 1.2, 2.0)); }), ErrorKind::LaxViolated);
}

TEST(DerivedScales, InvariantGates) {
  EXPECT_EQ(kind_of([] { derived_scales(stretching(0.5, 0.8, 0.9, 1.0)); }), ErrorKind::InvalidParameters);
  EXPECT_EQ(kind_of([] { derived_scales(stretching(0.0, 0.0, 0.5, 1.5)); }), ErrorKind::InvalidParameters);
  EXPECT_NO_THROW(derived_scales(stretching(0.0, 0.0, 0.5, 1.5), {.allow_degenerate = true}));
}

TEST(CharacteristicSpeeds, Formula) {
  const auto l = characteristic_speeds(1.0, 0.9, 0.5, 0.0, 1.0);
  EXPECT_NEAR(l[0], 0.9 - std::sqrt(1.25), 1e-15);
  EXPECT_NEAR(l[1], 0.4, 1e-15);
  EXPECT_EQ(l[2], 0.9);
  EXPECT_EQ(l[3], 0.9);
  EXPECT_EQ(l[4], 0.9);
  EXPECT_NEAR(l[5], 1.4, 1e-15);
  EXPECT_NEAR(l[6], 0.9 + std::sqrt(1.25), 1e-15);
  EXPECT_TRUE(std::is_sorted(l.begin(), l.end()));
}

TEST(CharacteristicSpeeds, SymmetricAtRest) {
  const auto l = characteristic_speeds(1.0, 0.0, 0.3, 0.3, 1.0);
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(l[k], -l[6 - k], 1e-15);
}

TEST(CharacteristicSpeeds, Degenerate) {
  EXPECT_EQ(kind_of([] { characteristic_speeds(1.0, 0.5, 0.0, 0.0, 1.0); }), ErrorKind::DegenerateDeformation);
}

TEST(LaxCheck, Margins) {
  auto p = stretching(0.5, 0.8, 0.9, 2.0);
  p.M_minus = 1.3;
  const auto l = check_lax(p);
  EXPECT_NEAR(l.lower, 0.4, 1e-15);
  EXPECT_NEAR(l.upper, 0.2180339887498949, 1e-12);
  ASSERT_TRUE(l.upstream);
  EXPECT_NEAR(*l.upstream, 1.3 - 0.9 / std::sqrt(0.56), 1e-12);
  EXPECT_TRUE(l.admissible);
}

TEST(LaxCheck, BoundaryAndGasLimit) {
  EXPECT_FALSE(check_lax(stretching(0.5, 0.8, 0.5, 2.0)).admissible);
  auto gas = stretching(0.0, 0.0, 0.8, 2.0);
  gas.M_minus = 1.1;
  EXPECT_TRUE(check_lax(gas).admissible);
  gas.M = 1.0;
  EXPECT_FALSE(check_lax(gas).admissible);
  gas.M = 0.8;
  gas.M_minus = 1.0;
  EXPECT_FALSE(check_lax(gas).admissible);
}

TEST(RankineHugoniot, SquareLawExample) {
  const auto eos = EquationOfState::polytropic(1.0, 2.0);
  SideState up;
  up.rho = 1.0;
  up.F << 0.3, 0.0, 0.0, 0.6;
  const auto sol = solve_rankine_hugoniot(up, 1.5, eos);
  EXPECT_NEAR(sol.params.R, 1.5, 1e-15);
  EXPECT_NEAR(sol.params.F11(), 0.2 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(sol.params.F22(), 0.6 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(sol.params.M * sol.params.M - sol.params.F11() * sol.params.F11(), 5.0 / 9.0, 1e-12);
  EXPECT_NEAR(sol.params.M, 0.7542472332656507, 1e-12);
  ASSERT_TRUE(sol.params.M_minus);
  EXPECT_NEAR(*sol.params.M_minus, std::sqrt(1.92), 1e-12);
  for (double r : sol.residuals) EXPECT_LT(r, 1e-12);
  EXPECT_FALSE(sol.rarefaction);
  EXPECT_TRUE(check_lax(sol.params).admissible);
}

TEST(RankineHugoniot, ZeroJumpIsDegenerate) {
  const auto eos = EquationOfState::polytropic(1.0, 2.0);
  SideState up;
  up.F << 0.3, 0.0, 0.0, 0.6;
  EXPECT_EQ(kind_of([&] { solve_rankine_hugoniot(up, 1.0, eos); }), ErrorKind::Degenerate);
}

TEST(RankineHugoniot, GasDynamicsLimit) {
  const auto eos = EquationOfState::polytropic(1.0, 1.4);
  SideState up;
  up.F = Mat2::Zero();
  const auto sol = solve_rankine_hugoniot(up, 1.7, eos, {.allow_degenerate = true});
  const auto s = derived_scales(sol.params, {.allow_degenerate = true});
  EXPECT_NEAR(s.M_tilde, sol.params.M, 1e-15);
}

TEST(RankineHugoniot, RarefactionTagged) {
  const auto eos = EquationOfState::polytropic(1.0, 2.0);
  SideState up;
  up.rho = 1.5;
  up.F << 0.3, 0.0, 0.0, 0.6;
  EXPECT_TRUE(solve_rankine_hugoniot(up, 1.0, eos).rarefaction);
}

TEST(Nondimensionalize, RoundTripAndFrameShift) {
  const auto eos = EquationOfState::polytropic(2.0, 5.0 / 3.0);
  SideState up;
  up.rho = 0.8;
  up.v = Vec2(0.0, 0.0);
  up.F << 0.4, 0.1, -0.2, 0.7;
  const auto sol = solve_rankine_hugoniot(up, 1.3, eos);
  const auto p = nondimensionalize(sol.upstream, sol.downstream, eos);
  EXPECT_NEAR(p.M, sol.params.M, 1e-12);
  EXPECT_NEAR(p.R, sol.params.R, 1e-12);
  EXPECT_LT((p.F - sol.params.F).cwiseAbs().maxCoeff(), 1e-12);

  SideState a = sol.upstream, b = sol.downstream;
  a.v(1) = b.v(1) = 0.7;
  const auto q = nondimensionalize(a, b, eos);
  EXPECT_NEAR(q.M, p.M, 1e-15);
  EXPECT_NEAR(*q.M_minus, *p.M_minus, 1e-15);

  b.v(1) = 0.6;
  EXPECT_EQ(kind_of([&] { nondimensionalize(a, b, eos); }), ErrorKind::FrameError);
}

TEST(RankineHugoniot, ConvexCompressiveShocksAreLaxAdmissible) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> g(1.05, 3.0), f(-1.0, 1.0), jump(1.01, 4.0);
  for (int k = 0; k < 500; ++k) {
    const auto eos = EquationOfState::polytropic(1.0, g(rng));
    SideState up;
    up.F << f(rng), f(rng), f(rng), f(rng);
    if (std::abs(up.F.determinant()) < 1e-3) continue;
    const auto sol = solve_rankine_hugoniot(up, jump(rng), eos);
    const auto s = derived_scales(sol.params);
    EXPECT_TRUE(check_lax(sol.params).admissible);
    EXPECT_LE(s.R() * s.M_tilde * s.M_tilde, 1.0 + 1e-12);
  }
}
