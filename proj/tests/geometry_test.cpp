#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pullback/geometry.hpp"
#include "pullback/random.hpp"

using namespace pullback;

namespace {

ManifoldPtr real_line() {
  auto m = std::make_shared<Manifold>();
  m->name = "line";
  m->dim = 1;
  m->charts.push_back(Chart{0, 1, [](const Vec& c) { return 100.0 - std::abs(c[0]); }, false});
  m->transition = [](int, int, const Vec& c) { return c; };
  m->transition_jacobian = [](int, int, const Vec&) { return Mat::Identity(1, 1); };
  m->sample_dim = 1;
  m->from_unit_cube = [](std::span<const double> u) -> std::optional<Point> {
    return Point{0, Vec::Constant(1, 20.0 * u[0] - 10.0)};
  };
  m->chart_partition = {[](const Point&) { return 1.0; }};
  return m;
}

Point north(double x, double y) { return Point{kNorth, (Vec(2) << x, y).finished()}; }

}  // namespace

TEST(ChangeChart, SameChartIsIdentity) {
  const Point pole = north(0.0, 0.0);
  const Point q = change_chart(*sphere(), pole, kNorth);
  EXPECT_EQ(q.chart, kNorth);
  EXPECT_EQ(q.coords, pole.coords);
}

TEST(ChangeChart, UnitModulusPointIsFixedByInversion) {
  const Point w = change_chart(*sphere(), north(1.0, 0.0), kSouth);
  EXPECT_EQ(w.chart, kSouth);
  EXPECT_NEAR(w.coords[0], 1.0, 1e-15);
  EXPECT_NEAR(w.coords[1], 0.0, 1e-15);
}

TEST(ChangeChart, InvertsStereographicCoordinate) {
  const Point w = change_chart(*sphere(), north(2.0, 0.0), kSouth);
  EXPECT_NEAR(w.coords[0], 0.5, 1e-15);
  EXPECT_NEAR(w.coords[1], 0.0, 1e-15);
}

TEST(ChangeChart, SouthPoleHasNoNorthCoordinate) {
  const Point south_pole{kSouth, Vec::Zero(2)};
  try {
    change_chart(*sphere(), south_pole, kNorth);
    FAIL() << "expected OutOfOverlap";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfOverlap);
  }
  EXPECT_FALSE(try_change_chart(*sphere(), south_pole, kNorth).has_value());
}

TEST(ChangeChart, RoundTripsOnSampledOverlaps) {
  for (const ManifoldPtr& m : {sphere(), circle()}) {
    for (const Point& p : sample_points(*m, 500)) {
      for (int target = 0; target < static_cast<int>(m->charts.size()); ++target) {
        const auto q = try_change_chart(*m, p, target);
        if (!q) continue;
        EXPECT_TRUE(m->charts[static_cast<std::size_t>(target)].contains(q->coords));
        const Point back = change_chart(*m, *q, p.chart);
        EXPECT_LT((back.coords - p.coords).norm(), 1e-9) << m->name;
      }
    }
  }
}

TEST(ChangeChart, TangentTransportsWithTheJacobian) {
  SplitMix64 rng(5);
  for (int s = 0; s < 50; ++s) {
    const Point p = to_preferred_chart(*sphere(), sphere_point(random_unit_vector(rng)));
    const auto q = try_change_chart(*sphere(), p, 1 - p.chart);
    if (!q) continue;
    const Vec dir = (Vec(2) << rng.normal(), rng.normal()).finished();
    const Tangent v{p, dir};
    const Tangent w = change_chart(*sphere(), v, q->chart);
    const double h = 1e-6;
    const Vec fd = (change_chart(*sphere(), Point{p.chart, Vec(p.coords + h * dir)}, q->chart).coords -
                    change_chart(*sphere(), Point{p.chart, Vec(p.coords - h * dir)}, q->chart).coords) /
                   (2.0 * h);
    EXPECT_LT((w.components - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST(PreferredChart, PicksAChartWithRoom) {
  EXPECT_EQ(preferred_chart(*sphere(), north(0.5, 0.5)), kNorth);
  EXPECT_EQ(preferred_chart(*sphere(), north(2.95, 0.0)), kSouth);
  const Point q = to_preferred_chart(*sphere(), north(2.95, 0.0));
  EXPECT_EQ(q.chart, kSouth);
}

TEST(SamplePoints, AreDeterministicAndInsideTheManifold) {
  const auto a = sample_points(*sphere(), 200);
  const auto b = sample_points(*sphere(), 200);
  ASSERT_EQ(a.size(), 200u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].coords, b[k].coords);
    EXPECT_NEAR(sphere_embed(a[k]).norm(), 1.0, 1e-12);
  }
  for (const Point& p : sample_points(*disk(), 200)) EXPECT_LE(p.coords.norm(), 1.0);
}

TEST(Halton, MatchesTheRadicalInverse) {
  EXPECT_DOUBLE_EQ(radical_inverse(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(radical_inverse(3, 2), 0.75);
  EXPECT_DOUBLE_EQ(radical_inverse(1, 3), 1.0 / 3.0);
  const auto h = halton(2, 2);
  EXPECT_DOUBLE_EQ(h[0], 0.25);
  EXPECT_DOUBLE_EQ(h[1], 2.0 / 3.0);
}

TEST(Differential, IdentityMapFixesTangents) {
  const Tangent v{north(0.3, -0.2), (Vec(2) << 1.5, -0.5).finished()};
  const Tangent w = differential(identity_map(sphere()), v.base, v);
  EXPECT_LT(tangent_distance(*sphere(), v, w), 1e-9);
}

TEST(Differential, SquareMapByFiniteDifferences) {
  const ManifoldPtr line = real_line();
  const SmoothMap square{line, line, [](const Point& p) { return Point{0, Vec::Constant(1, p.coords[0] * p.coords[0])}; },
                         {}};
  const Point x{0, Vec::Constant(1, 3.0)};
  const Tangent w = differential(square, x, Tangent{x, Vec::Constant(1, 1.0)});
  EXPECT_NEAR(w.components[0], 6.0, 1e-6);
}

TEST(Differential, AngleDoublingOnTheCircle) {
  const Point x = circle_point(0.7);
  const Tangent w = differential(circle_power_map(2), x, Tangent{x, Vec::Constant(1, 1.0)});
  EXPECT_NEAR(w.components[0], 2.0, 1e-9);
}

TEST(Differential, IsLinearInTheTangent) {
  SplitMix64 rng(11);
  const SmoothMap f = sphere_rotation(Eigen::Vector3d(0.3, -1.0, 0.5), 1.1);
  SmoothMap numeric = f;
  numeric.jacobian = nullptr;
  for (int s = 0; s < 30; ++s) {
    const Point p = to_preferred_chart(*sphere(), sphere_point(random_unit_vector(rng)));
    const Vec a = (Vec(2) << rng.normal(), rng.normal()).finished();
    const Vec b = (Vec(2) << rng.normal(), rng.normal()).finished();
    for (const SmoothMap& g : {f, numeric}) {
      const Tangent da = differential(g, p, Tangent{p, a});
      const Tangent db = differential(g, p, Tangent{p, b});
      const Tangent dab = differential(g, p, Tangent{p, Vec(2.0 * a - 3.0 * b)});
      const Tangent combo{da.base, Vec(2.0 * da.components - 3.0 * change_chart(*sphere(), db, da.base.chart).components)};
      EXPECT_LT(tangent_distance(*sphere(), dab, combo), 1e-5);
    }
    const Tangent analytic = differential(f, p, Tangent{p, a});
    const Tangent fd = differential(numeric, p, Tangent{p, a});
    EXPECT_LT(tangent_distance(*sphere(), analytic, fd), 1e-6);
  }
}

TEST(SmoothMap, ImageIsIndependentOfTheSourceChart) {
  const SmoothMap f = degree_map(3);
  for (const Point& p : sample_points(*sphere(), 300)) {
    const auto q = try_change_chart(*sphere(), p, 1 - p.chart);
    if (!q) continue;
    EXPECT_LT(point_distance(*sphere(), f(p), f(*q)), 1e-9);
  }
}

TEST(DegreeMap, RestrictsToAPowerOnTheEquator) {
  for (int k : {-2, -1, 1, 2, 3}) {
    const SmoothMap f = degree_map(k);
    for (double phi : {0.0, 0.4, 2.0, -1.3}) {
      const Point image = f(Point{kNorth, as_coords(std::polar(1.0, phi))});
      const cplx z = as_complex(change_chart(*sphere(), image, kNorth).coords);
      EXPECT_LT(std::abs(z - std::polar(1.0, k * phi)), 1e-12) << k;
    }
  }
}

TEST(SphereRotation, MatchesTheEmbeddedRotation) {
  const Eigen::Vector3d axis = Eigen::Vector3d(1.0, 2.0, -0.5).normalized();
  const double angle = 0.8;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  for (const Point& p : sample_points(*sphere(), 100)) {
    const Eigen::Vector3d expected = r * sphere_embed(p);
    EXPECT_LT((sphere_embed(sphere_rotation(axis, angle)(p)) - expected).norm(), 1e-12);
  }
}

TEST(PathVelocity, ConstantPathHasZeroVelocity) {
  const Point x = north(0.2, 0.1);
  const PathT alpha = make_path(sphere(), [x](double) { return x; });
  for (double t : {0.0, 0.5, 1.0}) EXPECT_LT(path_velocity(alpha, t).components.norm(), 1e-9);
}

TEST(PathVelocity, StraightSegmentInTheDisk) {
  const PathT alpha = make_path(disk(), [](double t) { return Point{0, (Vec(2) << t, 0.0).finished()}; });
  for (double t : {0.0, 0.3, 1.0}) {
    const Tangent v = path_velocity(alpha, t);
    EXPECT_NEAR(v.components[0], 1.0, 1e-6);
    EXPECT_NEAR(v.components[1], 0.0, 1e-6);
  }
}

TEST(PathVelocity, UnitCircleArcHasSpeedTwoPi) {
  const PathT alpha = make_path(circle(), [](double t) { return circle_point(2.0 * std::numbers::pi * t); });
  for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) EXPECT_NEAR(path_velocity(alpha, t).components.norm(), 2.0 * std::numbers::pi, 1e-4);
}

TEST(MakePath, ScheduleSwitchesChartsAlongTheWay) {
  const PathT alpha = make_path(sphere(), [](double t) { return sphere_point_polar(0.1 + 2.9 * t, 0.3); });
  ASSERT_GE(alpha.charts.size(), 2u);
  EXPECT_EQ(alpha.charts.front(), kNorth);
  EXPECT_EQ(alpha.charts.back(), kSouth);
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    const Point x = alpha.at(t, alpha.piece(t));
    EXPECT_LT(point_distance(*sphere(), x, alpha(t)), 1e-12);
  }
}
