#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "plap/geometry.hpp"

using namespace plap;

namespace {

const double pi = std::numbers::pi;

Domain random_convex_polygon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * pi), rad(0.5, 2.0);
  std::vector<double> a(7);
  for (auto& x : a) x = ang(rng);
  std::sort(a.begin(), a.end());
  // Points on an ellipse are in convex position.
  const double rx = rad(rng), ry = rad(rng);
  std::vector<Point> v;
  for (double t : a) v.push_back({rx * std::cos(t), ry * std::sin(t)});
  return Domain::polygon(v);
}

}  // namespace

TEST(DomainTest, RejectsNonconvexAndDegenerateInput) {
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 0}, {0.2, 0.2}, {0, 1}}), ConfigError);
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 0}, {2, 0}, {0, 1}}), ConfigError);
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), ConfigError);
  EXPECT_THROW(Domain::polygon({{0, 0}, {1, 0}}), ConfigError);
  EXPECT_THROW(Domain::disc({0, 0}, 0.0), ConfigError);
  EXPECT_THROW(Domain::interval(1.0, 1.0), ConfigError);
}

TEST(DomainTest, ClockwiseInputIsReoriented) {
  const Domain d = Domain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_NEAR(measure(d).area, 1.0, 1e-15);
  EXPECT_NEAR(distance_to_boundary(d, {0.5, 0.5}), 0.5, 1e-15);
}

TEST(InradiusTest, ClosedForms) {
  EXPECT_DOUBLE_EQ(inradius(Domain::disc({0, 0}, 1.0)), 1.0);
  EXPECT_NEAR(inradius(Domain::unit_square()), 0.5, 1e-15);
  const Domain tri = Domain::polygon({{0, 0}, {1, 0}, {0, 1}});
  const double s = (2.0 + std::sqrt(2.0)) / 2.0;
  EXPECT_NEAR(inradius(tri), 0.5 / s, 1e-14);
  EXPECT_NEAR(inradius(tri), 0.29289, 1e-5);
}

TEST(InradiusTest, MatchesBruteForceDistanceMaximum) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 5; ++t) {
    const Domain d = random_convex_polygon(rng);
    EXPECT_NEAR(inradius(d), oracle::brute_force_inradius(d, 600), 2e-2 * inradius(d));
    EXPECT_GE(inradius(d) * (1 + 1e-12), oracle::brute_force_inradius(d, 600));
  }
}

TEST(DiameterTest, ClosedForms) {
  EXPECT_NEAR(diameter(Domain::unit_square()), std::sqrt(2.0), 1e-15);
  const Domain big = Domain::rectangle({-1, -1}, {1, 1});
  EXPECT_NEAR(diameter(big), 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(2.0 / diameter(big), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(diameter(Domain::disc({1, 2}, 3.0)), 6.0);
}

TEST(InnerParallelSetTest, SquareShrinks) {
  const Domain sq = Domain::unit_square();
  const auto a = inner_parallel_set(sq, 0.25);
  ASSERT_TRUE(a);
  EXPECT_NEAR(measure(*a).area, 0.25, 1e-14);
  EXPECT_NEAR(measure(*a).perimeter, 2.0, 1e-14);
  const auto b = inner_parallel_set(sq, 0.1);
  ASSERT_TRUE(b);
  EXPECT_NEAR(measure(*b).area, 0.64, 1e-14);
  EXPECT_NEAR(measure(*b).area, oracle::shoelace({{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.9}, {0.1, 0.9}}), 1e-14);
  EXPECT_FALSE(inner_parallel_set(sq, 0.5));
  EXPECT_FALSE(inner_parallel_set(sq, 0.7));
  EXPECT_THROW(inner_parallel_set(sq, -0.1), ConfigError);
}

TEST(InnerParallelSetTest, DropsVanishingEdges) {
  // A pentagon with one short edge: the edge disappears for moderate offsets.
  const Domain d = Domain::polygon({{0, 0}, {2, 0}, {2, 1}, {1.9, 1.2}, {0, 1.2}});
  const auto s = inner_parallel_set(d, 0.3);
  ASSERT_TRUE(s);
  EXPECT_LE(s->vertices().size(), 5u);
  for (const Point& v : s->vertices()) EXPECT_NEAR(distance_to_boundary(d, v), 0.3, 1e-12);
}

TEST(MeasureTest, ClosedForms) {
  EXPECT_NEAR(measure(Domain::unit_square()).area, 1.0, 1e-15);
  EXPECT_NEAR(measure(Domain::unit_square()).perimeter, 4.0, 1e-15);
  EXPECT_NEAR(measure(Domain::disc({0, 0}, 1.0)).area, pi, 1e-15);
  EXPECT_NEAR(measure(Domain::disc({0, 0}, 1.0)).perimeter, 2 * pi, 1e-15);
}

TEST(CheegerTest, UnitSquare) {
  const CheegerResult c = cheeger_convex(Domain::unit_square());
  const double h = oracle::square_cheeger_quadratic();
  EXPECT_NEAR(h, 2.0 + std::sqrt(pi), 1e-14);
  EXPECT_NEAR(c.h, h, 1e-9);
  EXPECT_NEAR(c.h, 3.772453851, 1e-9);
  EXPECT_NEAR(c.h * c.r, 1.0, 1e-14);
  EXPECT_NEAR(c.verification_ratio, c.h, 1e-9);
}

TEST(CheegerTest, RasterizedRatioMatches) {
  const CheegerResult c = cheeger_convex(Domain::unit_square());
  ASSERT_TRUE(c.inner_set);
  const auto pa = oracle::raster_rounded_set(c.inner_set->vertices(), c.r, 2000);
  EXPECT_NEAR(pa.perimeter / pa.area, c.h, 5e-3 * c.h);
  EXPECT_NEAR(pa.area, c.area, 5e-3 * c.area);
}

TEST(CheegerTest, DiscIsItsOwnCheegerSet) {
  for (double R : {0.5, 1.0, 3.0}) {
    const CheegerResult c = cheeger_convex(Domain::disc({0.3, -0.2}, R));
    EXPECT_NEAR(c.h, 2.0 / R, 1e-12 / R);
    EXPECT_NEAR(c.area, pi * R * R, 1e-10 * R * R);
    EXPECT_NEAR(c.verification_ratio, c.h, 1e-9);
  }
}

TEST(CheegerTest, ScaledSquareFollowsScalingLaw) {
  const CheegerResult c = cheeger_convex(Domain::rectangle({-1, -1}, {1, 1}));
  EXPECT_NEAR(c.h, (2.0 + std::sqrt(pi)) / 2.0, 1e-9);
}

TEST(CheegerTest, RootFunctionIsStrictlyDecreasing) {
  std::mt19937_64 rng(11);
  std::vector<Domain> ds = {Domain::unit_square(), Domain::regular_polygon(6, 1.0),
                            Domain::rectangle({0, 0}, {2, 1}), random_convex_polygon(rng)};
  for (const Domain& d : ds) {
    const double R = inradius(d);
    double prev = detail::cheeger_root_function(d, 0.0);
    for (int i = 1; i < 200; ++i) {
      const double f = detail::cheeger_root_function(d, R * i / 200.0);
      EXPECT_LT(f, prev);
      prev = f;
    }
  }
}

TEST(DistanceTest, Examples) {
  const Domain sq = Domain::unit_square();
  EXPECT_NEAR(distance_to_boundary(sq, {0.5, 0.5}), 0.5, 1e-15);
  EXPECT_NEAR(distance_to_boundary(sq, {0.1, 0.7}), 0.1, 1e-15);
  EXPECT_NEAR(distance_to_boundary(sq, {1.0, 0.3}), 0.0, 1e-15);
  EXPECT_LT(distance_to_boundary(sq, {1.2, 0.3}), 0.0);
  EXPECT_NEAR(distance_to_boundary(Domain::disc({0, 0}, 1.0), {0.25, 0.0}), 0.75, 1e-15);
}

TEST(DistanceTest, IsOneLipschitzAlongSegments) {
  std::mt19937_64 rng(5);
  const Domain d = random_convex_polygon(rng);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int s = 0; s < 50; ++s) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    for (int i = 0; i < 20; ++i) {
      const Point x = a + (i / 20.0) * (b - a), y = a + ((i + 1) / 20.0) * (b - a);
      EXPECT_LE(std::abs(distance_to_boundary(d, x) - distance_to_boundary(d, y)), norm(x - y) * (1 + 1e-12));
    }
  }
}

TEST(ScalingTest, GeometryScalesLinearly) {
  std::mt19937_64 rng(7);
  std::vector<Domain> ds = {Domain::unit_square(), random_convex_polygon(rng), random_convex_polygon(rng)};
  for (const Domain& d : ds)
    for (double t : {0.5, 2.0, 3.7}) {
      const Domain s = d.scaled(t);
      EXPECT_NEAR(inradius(s), t * inradius(d), 1e-12 * t);
      EXPECT_NEAR(diameter(s), t * diameter(d), 1e-12 * t);
      EXPECT_NEAR(cheeger_convex(s).h, cheeger_convex(d).h / t, 1e-9 * cheeger_convex(d).h / t);
    }
}

TEST(LimitInequalityTest, TwoOverDiameterAtMostOneOverInradius) {
  std::vector<Domain> ds = {Domain::unit_square(), Domain::rectangle({0, 0}, {2, 1}), Domain::regular_polygon(6, 1.0),
                            Domain::polygon({{0, 0}, {1, 0}, {0, 1}})};
  for (const Domain& d : ds) EXPECT_LT(2.0 / diameter(d), 1.0 / inradius(d) - 1e-6);
  const Domain disc = Domain::disc({0, 0}, 1.3);
  EXPECT_NEAR(2.0 / diameter(disc), 1.0 / inradius(disc), 1e-15);
}
