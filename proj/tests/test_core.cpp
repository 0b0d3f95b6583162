#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "shadowkit/shadowkit.hpp"

using namespace shadowkit;

namespace {

const CatMap kCat;
const MetricSystem<Vec2> kSys = kCat.system();

double dmod(const Vec2& a, const Vec2& b) { return torus::dist(a, b); }

PseudoOrbit<Vec2> random_cat_orbit(std::uint64_t seed, double delta, int lo = -16, int hi = 16) {
  Rng rng(seed);
  GenParams g;
  g.delta = delta;
  g.lo = lo;
  g.hi = hi;
  return generate(kSys, torus::perturber(), Vec2{rng.uniform(), rng.uniform()}, g, rng);
}

}  // namespace

TEST(ApplyIter, ZeroStepsIsIdentity) {
  const Vec2 p{0.123, 0.456};
  EXPECT_EQ(apply_iter(kSys, p, 0), p);
}

TEST(ApplyIter, OriginIsFixedByCat) {
  const Vec2 z{0.0, 0.0};
  EXPECT_EQ(apply_iter(kSys, z, 5), z);
  EXPECT_EQ(apply_iter(kSys, z, -5), z);
}

TEST(ApplyIter, OneStepMatchesMatrixProduct) {
  // A (0.1, 0.2) = (0.4, 0.3)
  const Vec2 r = apply_iter(kSys, Vec2{0.1, 0.2}, 1);
  EXPECT_NEAR(r[0], 0.4, 1e-15);
  EXPECT_NEAR(r[1], 0.3, 1e-15);
}

TEST(ApplyIter, NegativeStepsInvert) {
  const Vec2 p{0.31, 0.77};
  EXPECT_LT(dmod(apply_iter(kSys, apply_iter(kSys, p, 7), -7), p), 1e-12);
}

TEST(LipschitzGeomSum, Values) {
  EXPECT_DOUBLE_EQ(lipschitz_geom_sum(1.0, 5), 5.0);
  EXPECT_DOUBLE_EQ(lipschitz_geom_sum(2.0, 3), 7.0);
  for (double L : {1.0, 1.5, 2.618}) {
    for (int n = 1; n < 10; ++n) EXPECT_NEAR(L * lipschitz_geom_sum(L, n) + 1.0, lipschitz_geom_sum(L, n + 1), 1e-12);
  }
  EXPECT_THROW(lipschitz_geom_sum(2.0, 0), std::invalid_argument);
}

TEST(OrbitMap, EntriesAreIterates) {
  const Vec2 p{0.1, 0.2};
  const auto x = orbit_map(kSys, p, -1, 1);
  // A^{-1} = [[1,-1],[-1,2]]: (0.1 - 0.2, -0.1 + 0.4) = (-0.1, 0.3) -> (0.9, 0.3)
  EXPECT_NEAR(x[-1][0], 0.9, 1e-15);
  EXPECT_NEAR(x[-1][1], 0.3, 1e-15);
  EXPECT_EQ(x[0], p);
  EXPECT_NEAR(x[1][0], 0.4, 1e-15);
  EXPECT_NEAR(x[1][1], 0.3, 1e-15);
}

TEST(OrbitMap, HasZeroDiscrepancy) {
  // f(f^{-1} p) = p only up to rounding on the torus: zero means below sys.tol
  const auto x = orbit_map(kSys, Vec2{0.3, 0.9}, -20, 20);
  EXPECT_LE(discrepancy1(kSys, x), kSys.tol);
  EXPECT_LE(discrepancy2(kSys, x).value, kSys.tol);
}

TEST(OrbitMap, ExactZeroOnExactSystems) {
  const auto od = Odometer{8}.system();
  const auto x = orbit_map(od, std::uint64_t{77}, -30, 30);
  EXPECT_EQ(discrepancy1(od, x), 0.0);
  const auto d2 = discrepancy2(od, x);
  EXPECT_EQ(d2.value, 0.0);
  EXPECT_EQ(d2.tail_bound, 0.0);
}

TEST(OrbitMap, RejectsWindowWithoutZero) { EXPECT_THROW(orbit_map(kSys, Vec2{0, 0}, 1, 3), WindowError); }

TEST(PseudoOrbit, CappedExtensionContinuesByExactIterates) {
  const auto x = random_cat_orbit(5, 1e-4, -4, 4);
  EXPECT_LT(dmod(x.at(kSys, 7), apply_iter(kSys, x[4], 3)), 1e-15);
  EXPECT_LT(dmod(x.at(kSys, -6), apply_iter(kSys, x[-4], -2)), 1e-15);
  const auto m = x.materialize(kSys, -8, 8);
  for (int i = -8; i <= 8; ++i) EXPECT_LT(dmod(m[static_cast<std::size_t>(i + 8)], x.at(kSys, i)), 1e-12);
}

TEST(PseudoOrbit, PeriodicRepeatsWindow) {
  const PseudoOrbit<Vec2> x(-1, {Vec2{0.1, 0.1}, Vec2{0.2, 0.2}, Vec2{0.3, 0.3}}, Extension::Periodic);
  EXPECT_EQ(x.at(kSys, 2), x[-1]);
  EXPECT_EQ(x.at(kSys, -3), x[0]);
}

TEST(PseudoOrbit, ShiftAndReverseReindex) {
  const auto x = random_cat_orbit(6, 1e-4, -3, 5);
  const auto s = x.shifted(2);
  for (int i = -5; i <= 3; ++i) EXPECT_EQ(s[i], x[i + 2]);
  const auto r = x.reversed();
  EXPECT_EQ(r.lo(), -5);
  for (int i = -5; i <= 3; ++i) EXPECT_EQ(r[i], x[-i]);
}

TEST(PseudoOrbit, OutOfWindowIndexThrows) {
  const auto x = random_cat_orbit(7, 1e-4, -2, 2);
  EXPECT_THROW((void)x[3], WindowError);
  EXPECT_THROW(PseudoOrbit<Vec2>(0, {}), WindowError);
}

TEST(Connect, EqualPointsGiveOrbit) {
  const Vec2 p{0.4, 0.1};
  EXPECT_LE(discrepancy1(kSys, connect(kSys, p, p, -10, 10)), kSys.tol);
  const auto od = Odometer{8}.system();
  EXPECT_EQ(discrepancy1(od, connect(od, std::uint64_t{5}, std::uint64_t{5}, -10, 10)), 0.0);
}

TEST(Connect, SingleJumpAtZero) {
  const Vec2 p{0.4, 0.1}, q{0.41, 0.102};
  const auto x = connect(kSys, p, q, -10, 10);
  const auto J = jumps(kSys, x);
  for (int i = J.lo; i <= J.hi(); ++i) {
    if (i == 0)
      EXPECT_NEAR(J.at(i), dmod(kSys.fwd(x[-1]), q), 1e-15);
    else
      EXPECT_LT(J.at(i), 1e-12) << i;
  }
  // the jump is d(f f^{-1} p, q), which is d(p, q) up to rounding
  EXPECT_NEAR(discrepancy1(kSys, x), dmod(p, q), 1e-14);
}

TEST(OrbitCap, RestrictsJumps) {
  const auto x = random_cat_orbit(8, 1e-4, -10, 10);
  const auto y = orbit_cap(x, 4);
  EXPECT_EQ(y.lo(), -4);
  EXPECT_EQ(y.hi(), 4);
  const auto Jx = jumps(kSys, x), Jy = jumps(kSys, y);
  for (int i = -3; i <= 4; ++i) EXPECT_EQ(Jy.at(i), Jx.at(i));
  EXPECT_EQ(Jy.at(5), 0.0);
  EXPECT_THROW(orbit_cap(x, 11), WindowError);
  // whole window: unchanged
  const auto z = orbit_cap(x, 10);
  EXPECT_EQ(z.entries(), x.entries());
}

TEST(OrbitCap, ConvergesPointwise) {
  const auto x = random_cat_orbit(9, 1e-4, -30, 30);
  for (int n = 2; n < 30; ++n) {
    const auto y = orbit_cap(x, n);
    for (int i = -2; i <= 2; ++i) EXPECT_EQ(y.at(kSys, i), x[i]);
  }
  EXPECT_LT(dmod(orbit_cap(x, 29).at(kSys, 29), x[29]), 1e-15);
}

TEST(Jumps, PeriodicIncludesWrap) {
  const PseudoOrbit<Vec2> x(0, {Vec2{0.0, 0.0}, Vec2{0.01, 0.0}}, Extension::Periodic);
  const auto J = jumps(kSys, x);
  ASSERT_TRUE(J.periodic);
  // wrap jump d(f(x_1), x_0) = |A (0.01, 0)| = |(0.02, 0.01)|
  EXPECT_NEAR(J.at(0), std::hypot(0.02, 0.01), 1e-15);
  EXPECT_NEAR(J.at(1), 0.01, 1e-15);
  EXPECT_NEAR(J.at(2), J.at(0), 0.0);
}

TEST(BlockJumps, Formula) {
  IndexedSeries z;
  z.lo = 1;
  z.values = {0, 0, 0, 0};
  EXPECT_EQ(block_jumps(z, 2.0, 2, 1), 0.0);
  IndexedSeries c;
  c.lo = -10;
  c.values.assign(40, 0.003);
  // constant jumps: L^m m delta
  EXPECT_NEAR(block_jumps(c, 2.0, 3, 2), 8.0 * 3 * 0.003, 1e-15);
  // m = 1: L delta_i
  IndexedSeries s;
  s.lo = 1;
  s.values = {0.1, 0.2, 0.3};
  EXPECT_NEAR(block_jumps(s, 1.5, 1, 2), 1.5 * 0.2, 1e-15);
}

TEST(TildeDist, IdenticalOrbitsAreZeroWithZeroTail) {
  const auto x = random_cat_orbit(10, 1e-4);
  const auto d = tilde_dist_s(kSys, x, x);
  EXPECT_EQ(d.value, 0.0);
  EXPECT_EQ(d.tail_bound, 0.0);
}

TEST(TildeDist, MatchesExplicitSum) {
  const auto x = random_cat_orbit(11, 1e-3, -6, 6);
  const auto y = random_cat_orbit(12, 1e-3, -6, 6);
  const int n = 10;
  const auto d = tilde_dist_s(kSys, x, y, 0.5, n);
  const double ref = oracle::weighted_sum([&](int i) { return dmod(x.at(kSys, i), y.at(kSys, i)); }, 0.5, n);
  EXPECT_NEAR(d.value, ref, 1e-14);
  // diam 2 mu^{n+1}/(1-mu) split over both sides
  EXPECT_NEAR(d.tail_bound, std::sqrt(0.5) * 2.0 * std::pow(0.5, 11) / 0.5, 1e-15);
}

TEST(TildeDist, DifferenceAtOneIndex) {
  const auto x = orbit_map(kSys, Vec2{0.2, 0.6}, -5, 5);
  auto e = x.entries();
  e[5] = Vec2{0.2 + 1e-3, 0.6};
  const PseudoOrbit<Vec2> y(-5, e);
  const auto d = tilde_dist_s(kSys, x, y, 0.5, 5);
  EXPECT_NEAR(d.value, 1e-3, 1e-15);
}

TEST(TildeDist, TriangleInequalityWithinTails) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = random_cat_orbit(100 + s, 1e-2, -5, 5);
    const auto y = random_cat_orbit(200 + s, 1e-2, -5, 5);
    const auto z = random_cat_orbit(300 + s, 1e-2, -5, 5);
    const auto xy = tilde_dist_s(kSys, x, y), yz = tilde_dist_s(kSys, y, z), xz = tilde_dist_s(kSys, x, z);
    EXPECT_LE(xz.value, xy.upper() + yz.upper() + 1e-12);
  }
}

TEST(TildeDistMax, BoundedBySum) {
  const auto x = random_cat_orbit(13, 1e-3), y = random_cat_orbit(14, 1e-3);
  EXPECT_LE(tilde_dist_m(kSys, x, y).value, tilde_dist_s(kSys, x, y).value);
}

TEST(Discrepancy, ShiftInvariance) {
  const auto x = random_cat_orbit(15, 1e-3);
  EXPECT_EQ(discrepancy1(kSys, x), discrepancy1(kSys, x.shifted(3)));
  EXPECT_NEAR(discrepancy2(kSys, x).value, discrepancy2(kSys, x.shifted(-4)).value, 1e-15);
}

TEST(Discrepancy, FirstAtMostTwiceSecond) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto x = random_cat_orbit(400 + s, 1e-3);
    EXPECT_LE(discrepancy1(kSys, x), 2.0 * discrepancy2(kSys, x).upper());
  }
}

TEST(Discrepancy, SecondTracksExplicitDefinition) {
  // sup_i sum_j mu^|j| d(x_{i+j}, f^j x_i), evaluated independently
  const auto x = random_cat_orbit(16, 1e-4, -6, 6);
  const int n = 30;
  double ref = 0.0;
  for (int i = -6; i <= 6; ++i) {
    double s = 0.0;
    for (int j = -n; j <= n; ++j) s += std::pow(0.5, std::abs(j)) * dmod(x.at(kSys, i + j), apply_iter(kSys, x[i], j));
    ref = std::max(ref, s);
  }
  const auto d2 = discrepancy2(kSys, x, 0.5, n);
  EXPECT_NEAR(d2.value, ref, 1e-9);
}

TEST(Discrepancy, JumpGrowthBound) {
  // d(f^n x_0, x_n) <= sum_j delta_j L^{n-j} <= delta L_n
  const auto x = random_cat_orbit(17, 1e-6, 0, 12);
  const auto J = jumps(kSys, x);
  const double L = kSys.lip_fwd, delta = J.sup();
  for (int n = 1; n <= 12; ++n) {
    double s = 0.0;
    for (int j = 1; j <= n; ++j) s += J.at(j) * std::pow(L, n - j);
    const double d = dmod(apply_iter(kSys, x[0], n), x[n]);
    EXPECT_LE(d, s * (1 + 1e-9) + 1e-13);
    EXPECT_LE(s, delta * lipschitz_geom_sum(L, n) * (1 + 1e-12));
  }
}

TEST(ShadowError, ZeroForOrbit) {
  const Vec2 p{0.5, 0.25};
  EXPECT_EQ(shadow_error(kSys, p, orbit_map(kSys, p, -3, 3)), 0.0);
}
