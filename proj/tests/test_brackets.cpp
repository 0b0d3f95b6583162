#include <gtest/gtest.h>

#include <cmath>

#include "shadowkit/shadowkit.hpp"

using namespace shadowkit;

namespace {

const CatMap kCat;
const MetricSystem<Vec2> kSys = kCat.system();
const Sampler<Vec2> kSampler = torus::sampler(42);

// (3 - sqrt 5)/2, the smaller root of t^2 - 3t + 1 (trace 3, determinant 1)
const double kMuCat = (3.0 - std::sqrt(9.0 - 4.0)) / 2.0;

}  // namespace

TEST(Bracket, ReversedSwapsArguments) {
  const auto b = kCat.bracket();
  const auto r = b.reversed();
  const Vec2 p{0.3, 0.3}, q{0.31, 0.29};
  EXPECT_EQ(r(p, q), b(q, p));
}

TEST(CatBracket, CrossingPointCoordinates) {
  const auto b = kCat.bracket();
  const Vec2 p{0.5, 0.5};
  const double t = 0.05;
  // q on the stable line through p: [p, q] = p; on the unstable line: [p, q] = q
  const Vec2 qs{p[0] + t * kCat.v_s[0], p[1] + t * kCat.v_s[1]};
  const Vec2 qu{p[0] + t * kCat.v_u[0], p[1] + t * kCat.v_u[1]};
  EXPECT_LT(torus::dist(b(p, qs), p), 1e-15);
  EXPECT_LT(torus::dist(b(p, qu), qu), 1e-15);
  EXPECT_THROW(b(p, Vec2{0.9, 0.9}), DomainError);
}

TEST(IdentityAxiom, ProjectionPassesExactly) {
  const auto r = check_identity_axiom(torus_projection_bracket(), kSys, kSampler, 128);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.worst_slack, 0.0);
  EXPECT_TRUE(r.get("modulus_h=0.01").has_value());
}

TEST(IdentityAxiom, CatBracketPasses) {
  const auto r = check_identity_axiom(kCat.bracket(), kSys, kSampler, 256);
  EXPECT_TRUE(r.passed);
  EXPECT_GE(r.worst_slack, -1e-15);
  // a Lipschitz bracket: the modulus shrinks with the perturbation
  EXPECT_LT(*r.get("modulus_h=0.0001"), *r.get("modulus_h=0.01"));
}

TEST(IdentityAxiom, BrokenBracketFailsWithWitness) {
  Bracket<Vec2> bad;
  bad.id = "broken";
  bad.domain_radius = 0.2;
  bad.eval = [](const Vec2&, const Vec2& q) { return torus::wrap01(Vec2{q[0] + 0.1, q[1]}); };
  const auto r = check_identity_axiom(bad, kSys, kSampler, 32);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.worst_slack, -0.1, 1e-12);
  ASSERT_FALSE(r.witness.empty());
  EXPECT_EQ(r.witness[0].first, "p");
}

TEST(Associativity, CatBracketPasses) {
  const auto r = check_associativity(kCat.bracket(), kSys, kSampler, 256, 1e-12);
  EXPECT_TRUE(r.passed) << r.worst_slack;
}

TEST(Associativity, ShiftBracketExact) {
  const auto S = SequenceSystem::discrete(3);
  const auto r = check_associativity(S.bracket(), S.system(), S.sampler(3), 256, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.worst_slack, 0.0);
}

TEST(Associativity, NorthSouthFailsAcrossTransition) {
  const NorthSouth ns;
  const auto sys = ns.system();
  // p, q, r in the transition region where phi is strictly between 0 and 1
  Sampler<double> s;
  s.point = [&](std::uint64_t k) { return 0.21 + 0.08 * static_cast<double>(k % 64) / 64.0; };
  s.near = circle::sampler(5).near;
  const auto r = check_associativity(ns.bracket(), sys, s, 256, 1e-12);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.witness.size(), 3u);
}

TEST(Hyperbolic, CatWithDeclaredConstants) {
  const auto b = kCat.bracket();
  ASSERT_NEAR(*b.declared_mu, kMuCat, 1e-15);
  EXPECT_EQ(*b.declared_c, 1.0);
  const auto r = check_hyperbolic(b, kSys, kSampler, 10, 256);
  EXPECT_TRUE(r.passed) << r.worst_slack;
}

TEST(Hyperbolic, CatFitFindsContraction) {
  auto b = kCat.bracket();
  b.declared_c.reset();
  b.declared_mu.reset();
  const auto r = check_hyperbolic(b, kSys, kSampler, 10, 128);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(*r.get("c_mu_nmax"), 1.0);
  // the grid value at or above the true rate
  EXPECT_GE(*r.get("mu"), kMuCat * 0.9);
}

TEST(Hyperbolic, NorthSouthWithTransitionConstant) {
  const NorthSouth ns;
  const auto b = ns.bracket();
  EXPECT_NEAR(*b.declared_c, std::pow(ns.L / ns.mu, ns.u), 1e-9);
  const auto r = check_hyperbolic(b, ns.system(), circle::sampler(7), 20, 512);
  EXPECT_TRUE(r.passed) << r.worst_slack << " " << r.note;
}

TEST(Hyperbolic, RotationWithProjectionFails) {
  const auto r = check_hyperbolic(circle_projection_bracket(), circle_rotation(), circle::sampler(3), 20, 64);
  EXPECT_FALSE(r.passed);
}

TEST(FInvariance, CatPasses) {
  const auto r = check_f_invariance(kCat.bracket(), kSys, kSampler, 256, 1e-12);
  EXPECT_TRUE(r.passed) << r.worst_slack;
}

TEST(FInvariance, NorthSouthFails) {
  const NorthSouth ns;
  const auto r = check_f_invariance(ns.bracket(), ns.system(), circle::sampler(9), 512, 1e-12);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.witness.empty());
}

TEST(FInvariance, ShiftPasses) {
  const auto S = SequenceSystem::discrete(2);
  const auto r = check_f_invariance(S.bracket(), S.system(), S.sampler(4), 256, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(UniformContraction, MatchesPredictedBlock) {
  const auto b = kCat.bracket();
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto r = check_uniform_contraction(b, kSys, eps, kSampler, 12, 128);
    ASSERT_TRUE(r.passed) << eps;
    // c mu^m gamma < eps once m exceeds log(eps / (c gamma)) / log mu
    const int predicted = static_cast<int>(std::ceil(std::log(eps / b.domain_radius) / std::log(kMuCat)));
    EXPECT_LE(*r.get("m"), predicted + 1) << eps;
  }
}

TEST(UniformContraction, VacuousEpsGivesZero) {
  const auto r = check_uniform_contraction(kCat.bracket(), kSys, 1.0, kSampler, 5, 64);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(*r.get("m"), 0.0);
}

TEST(UniformContraction, RotationFails) {
  const auto r = check_uniform_contraction(circle_projection_bracket(), circle_rotation(), 1e-3, circle::sampler(1), 10, 64);
  EXPECT_FALSE(r.passed);
}

TEST(ShadowingBracket, DiagonalIsTrivial) {
  Sampler<Vec2> diag = kSampler;
  diag.near = [](const Vec2& p, double, std::uint64_t) { return p; };
  const auto r = check_shadowing_bracket(kCat.bracket(), kSys, 1e-12, 8, diag, 32);
  EXPECT_TRUE(r.passed);
}

TEST(ShadowingBracket, CatWithEpsCGamma) {
  const auto b = kCat.bracket();
  const auto r = check_shadowing_bracket(b, kSys, *b.declared_c * b.domain_radius, 10, kSampler, 128, true);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(*r.get("non_decaying_samples"), 0.0);
}

TEST(ShadowingBracket, NorthSouthNearSink) {
  const NorthSouth ns;
  const auto b = ns.bracket();
  // p near S: [p, q] = p, and the stable distance to q decays like mu^n d(p, q)
  const double p = 0.05, q = 0.07;
  EXPECT_EQ(b(p, q), p);
  const auto [fw, bw] = contraction_profile(b, ns.system(), p, q, 10);
  for (int n = 1; n <= 10; ++n) EXPECT_LE(fw[static_cast<std::size_t>(n)], std::pow(ns.mu, n) * 0.02 + 1e-15);
  EXPECT_EQ(bw[5], 0.0);
  // p near N: [p, q] = q
  EXPECT_EQ(b(0.45, 0.47), 0.47);
}

TEST(BracketImplications, HyperbolicImpliesShadowingBracket) {
  const NorthSouth ns;
  struct Case {
    Bracket<double> b;
    MetricSystem<double> s;
  };
  const auto cat_ok = check_hyperbolic(kCat.bracket(), kSys, kSampler, 10, 128);
  ASSERT_TRUE(cat_ok.passed);
  const auto b = kCat.bracket();
  EXPECT_TRUE(check_shadowing_bracket(b, kSys, *b.declared_c * b.domain_radius, 10, kSampler, 128).passed);
  const auto nb = ns.bracket();
  const auto sys = ns.system();
  ASSERT_TRUE(check_hyperbolic(nb, sys, circle::sampler(2), 20, 256).passed);
  EXPECT_TRUE(check_shadowing_bracket(nb, sys, *nb.declared_c * nb.domain_radius, 20, circle::sampler(2), 256).passed);
}

TEST(InducedBracket, DiagonalGivesPoint) {
  BowenShadower<Vec2> bw(kSys, kCat.bracket());
  const auto m = bw.method();
  const Vec2 p{0.2, 0.8};
  EXPECT_LT(torus::dist(induced_bracket(m, kSys, p, p, -16, 16), p), 1e-10);
}

TEST(InducedBracket, OracleGivesCatBracket) {
  const auto m = kCat.oracle_method();
  const auto b = kCat.bracket();
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto [p, q] = std::pair{kSampler.point(k), kSampler.near(kSampler.point(k), 0.01, k)};
    EXPECT_LT(torus::dist(induced_bracket(m, kSys, p, q, -24, 24), b(p, q)), 1e-12) << k;
  }
}

TEST(InducedBracket, ShiftCanonicalGivesShiftBracket) {
  const auto S = SequenceSystem::discrete(3);
  const auto sys = S.system();
  const auto m = shift_canonical_method(S);
  const auto smp = S.sampler(11);
  for (std::uint64_t k = 0; k < 64; ++k) {
    const SeqPoint x = smp.point(k), y = smp.point(k + 1000);
    EXPECT_EQ(induced_bracket(m, sys, x, y, -12, 12), SequenceSystem::bracket_eval(x, y)) << k;
  }
}

TEST(InducedBracket, RejectsFarPair) {
  const auto m = kCat.oracle_method();
  EXPECT_THROW(induced_bracket(m, kSys, Vec2{0.1, 0.1}, Vec2{0.5, 0.5}), DomainError);
}
