#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "elastoshock/energy_criterion.hpp"

using namespace elastoshock;

namespace {

ShockParameters params(double f11, double f12, double f21, double f22, double M, double R) {
  ShockParameters p;
  p.M = M;
  p.R = R;
  p.F << f11, f12, f21, f22;
  return p;
}

DerivedScales random_scales(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.2, 1.2), t(0.02, 0.98), r(1.05, 6.0);
  ShockParameters p;
  p.F << u(rng), u(rng), u(rng), u(rng);
  const double m1 = std::hypot(p.F(0, 0), p.F(0, 1)), ms = std::sqrt(1 + m1 * m1);
  p.M = m1 + t(rng) * (ms - m1);
  p.R = r(rng);
  return derived_scales(p);
}

}  // namespace

TEST(UniformStability, ReferencePoints) {
  const auto s2 = derived_scales(params(0.5, 0, 0, 0.8, 0.9, 2.0));
  EXPECT_NEAR(uniform_stability_margin(s2), 1.473, 1e-12);
  EXPECT_NEAR(uniform_stability_margin(s2), s2.M_star * s2.M_star * 1.1784, 1e-12);
  const auto s4 = derived_scales(params(0.5, 0, 0, 0.8, 0.9, 4.0));
  EXPECT_LT(uniform_stability_margin(s4), 0.0);
  EXPECT_NEAR(s4.K, 2.88, 1e-12);
  EXPECT_NEAR(s4.K1 + s4.K2, 2.70272, 1e-12);
}

TEST(UniformStability, GasLimit) {
  const auto s = derived_scales(params(0, 0, 0, 0, 0.5, 1.5), {.allow_degenerate = true});
  const double m = uniform_stability_margin(s);
  EXPECT_GT(m, 0.0);
  EXPECT_NEAR(m, 0.875, 1e-12);  // M*^4 (1 - M^2 (R - 1)) with M* = 1
}

TEST(StretchingCondition, Values) {
  const auto s2 = derived_scales(params(0.5, 0, 0, 0.8, 0.9, 2.0));
  EXPECT_NEAR(stretching_condition(s2, DeformationPattern::Stretching), 1.1784, 1e-12);
  const auto s4 = derived_scales(params(0.5, 0, 0, 0.8, 0.9, 4.0));
  EXPECT_NEAR(stretching_condition(s4, DeformationPattern::Stretching), -0.2216, 1e-12);
  const auto anti = derived_scales(params(0, 0.5, 0.8, 0, 0.9, 2.0));
  EXPECT_NEAR(stretching_condition(anti, DeformationPattern::Antidiagonal), 1.1784, 1e-12);
  EXPECT_NEAR(uniform_stability_margin(anti), uniform_stability_margin(s2), 1e-12);
}

TEST(StretchingCondition, PatternMismatch) {
  const auto s = derived_scales(params(0.5, 0.1, 0, 0.8, 0.9, 2.0));
  try {
    stretching_condition(s, DeformationPattern::Stretching);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PatternMismatch);
  }
}

TEST(ElasticMach, Margins) {
  const auto s = derived_scales(params(0.5, 0, 0, 0.8, 0.9, 2.0));
  const auto m = elastic_mach_check(s, 2.0);
  EXPECT_NEAR(m.gas_prime, 0.44, 1e-12);
  ASSERT_TRUE(m.str_prime);
  EXPECT_NEAR(elastic_mach_check(s, 1.0).gas_prime, 1.0, 0.0);
  EXPECT_FALSE(elastic_mach_check(derived_scales(params(0.5, 0.2, 0, 0.8, 0.9, 2.0)), 2.0).str_prime);
}

TEST(ElasticMach, StretchingPrimeSignMatchesCondition) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> f(0.05, 1.2), t(0.02, 0.98), r(1.05, 6.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = f(rng), b = f(rng), ms = std::sqrt(1 + a * a);
    const auto s = derived_scales(params(a, 0, 0, b, a + t(rng) * (ms - a), r(rng)));
    const double m = stretching_condition(s, DeformationPattern::Stretching);
    if (std::abs(m) < 1e-9) continue;
    EXPECT_EQ(*elastic_mach_check(s, s.R()).str_prime > 0.0, m > 0.0);
  }
}

TEST(LienardChipart, NoShearReduction) {
  const auto s = derived_scales(params(0.5, 0, 0, 0.8, 0.9, 2.0));
  const auto lc = lienard_chipart(s);
  EXPECT_EQ(lc.b[0], lc.b[4]);
  EXPECT_EQ(lc.b[1], 2.0);
  EXPECT_EQ(lc.b[3], 2.0);
  EXPECT_TRUE(lc.pass);
  EXPECT_EQ(lc.pass, s.a1 > 0.0);
}

TEST(LienardChipart, AutomaticInequalities) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 2000; ++k) {
    const auto lc = lienard_chipart(random_scales(rng));
    EXPECT_GT(lc.b[1], 0.0);
    EXPECT_GT(lc.b[3], 0.0);
  }
}

TEST(QuarticOracle, KnownPolynomials) {
  const auto a = quartic_root_oracle({1, 4, 6, 4, 1});
  ASSERT_EQ(a.roots.size(), 4u);
  for (const auto& z : a.roots) EXPECT_NEAR(std::abs(z + 1.0), 0.0, 1e-3);
  EXPECT_TRUE(a.left_half_plane);
  const auto b = quartic_root_oracle({1, 0, 2, 0, 1});
  for (const auto& z : b.roots) EXPECT_NEAR(std::abs(z), 1.0, 1e-6);
  EXPECT_FALSE(b.left_half_plane);
}

TEST(QuarticOracle, DegenerateLeadingCoefficient) {
  const auto r = quartic_root_oracle({6, 11, 6, 1, 0});
  EXPECT_TRUE(r.degenerate_leading);
  EXPECT_EQ(r.roots.size(), 3u);
  EXPECT_TRUE(r.left_half_plane);
}

TEST(QuarticOracle, MatchesLienardChipart) {
  std::mt19937_64 rng(9);
  int compared = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto s = random_scales(rng);
    const auto lc = lienard_chipart(s);
    if (std::abs(uniform_stability_margin(s)) < 1e-9) continue;
    EXPECT_EQ(quartic_root_oracle(lc.b).left_half_plane, lc.pass);
    ++compared;
  }
  EXPECT_GT(compared, 900);
}

TEST(QuarticOracle, LienardChipartEqualsEnergySign) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    const auto s = random_scales(rng);
    const double m = uniform_stability_margin(s);
    if (std::abs(m) < 1e-9) continue;
    EXPECT_EQ(lienard_chipart(s).pass, m > 0.0);
  }
}

TEST(PositivityChain, ReferenceValue) {
  const auto s = derived_scales(params(0.5, 0, 0, 0.8, 0.9, 2.0));
  const auto b = positivity_chain(s);
  EXPECT_NEAR(b.D, 0.7855, 1e-12);
  EXPECT_NEAR(b.factors[0], 0.35319, 1e-5);
  EXPECT_NEAR(b.factors[1], 2.224018, 1e-6);
  EXPECT_NEAR(b.factors[0] * b.factors[1], b.D, 1e-14);
  EXPECT_GT(b.factors[1], 0.0);
}

TEST(PositivityChain, IdentitiesAndPositivity) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 5000; ++k) {
    const auto s = random_scales(rng);
    const auto b = positivity_chain(s);
    EXPECT_LT(b.sos_residual, 1e-12);
    EXPECT_LT(b.rr_residual, 1e-12);
    EXPECT_GT(b.D, 0.0);
    const double usc = uniform_stability_margin(s);
    if (std::abs(usc) > 1e-9) EXPECT_EQ(usc1_margin(s) > 0.0, usc > 0.0);
  }
}

TEST(LienardChipart, HurwitzInequalityAlwaysHolds) {
  // The last LC inequality rewritten with a1, a2, d0~ and its claimed
  // reduction to l0^2 < M^2 M2^2 + R M^2 (M^2 - M1^2).
  std::mt19937_64 rng(19);
  for (int k = 0; k < 2000; ++k) {
    const auto s = random_scales(rng);
    const double M = s.M(), b2 = s.beta * s.beta;
    const double rewritten = (b2 * s.d0_tilde - s.a1) / b2 - s.M_star * b2 * s.a2 * s.a2 / (2 * M * M);
    const auto lc = lienard_chipart(s);
    EXPECT_GT(rewritten, 0.0);
    EXPECT_GT(lc.b[2], 0.0);
    EXPECT_LT(s.ell0 * s.ell0, M * M * s.M2 * s.M2 + s.R() * M * M * s.M_tilde * s.M_tilde);
    if (lc.b[0] > 0.0 && lc.b[4] > 0.0) EXPECT_GT(lc.margins[5], 0.0);
  }
}

TEST(ConvexShock, SquareLawExample) {
  const auto eos = EquationOfState::polytropic(1.0, 2.0);
  SideState up;
  up.F << 0.3, 0.0, 0.0, 0.6;
  const auto v = convex_shock_verdict(up, 1.5, eos);
  EXPECT_EQ(v.verdict, StabilityClass::UniformlyStable);
  EXPECT_GT(v.usc_margin, 0.0);
  EXPECT_GT(v.d_value, 0.0);
  EXPECT_GT(v.gas_prime_margin, 0.0);
  EXPECT_LE(v.rw, 1.0);
  EXPECT_TRUE(v.lc_pass);
}

TEST(ConvexShock, PolytropicSweep) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> g(1.01, 3.0), f(-1.0, 1.0), jump(1.01, 5.0);
  for (int k = 0; k < 500; ++k) {
    const auto eos = EquationOfState::polytropic(1.0, g(rng));
    SideState up;
    up.F << f(rng), f(rng), f(rng), f(rng);
    if (std::abs(up.F.determinant()) < 1e-3) continue;
    EXPECT_EQ(convex_shock_verdict(up, jump(rng), eos).verdict, StabilityClass::UniformlyStable);
  }
}

TEST(ConvexShock, NonConvexRejected) {
  const auto eos = EquationOfState::tabulated({1.0, 2.0, 3.0, 4.0}, {1.0, 3.0, 4.0, 4.5});
  SideState up;
  up.rho = 1.5;
  up.F << 0.3, 0.0, 0.0, 0.6;
  try {
    convex_shock_verdict(up, 2.5, eos);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConvexityRequired);
  }
}
