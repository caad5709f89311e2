#include <cmath>

#include <gtest/gtest.h>

#include "pullback/morphism.hpp"

using namespace pullback;

namespace {

const Eigen::Vector3d kAxis = Eigen::Vector3d(0.3, 1.0, -0.2).normalized();

Homotopy sphere_rotation_homotopy(double angle) {
  return steadify(rotation_homotopy(identity_map(sphere()), kAxis, angle));
}

}  // namespace

TEST(InducedMorphism, ConstantHomotopyActsAsTheIdentity) {
  const BundlePtr xi = hopf();
  const Connection c = connection_by_name("partition", xi);
  const BundleMorphism m = induced_morphism(constant_homotopy(degree_map(2)), xi, c, 200);
  SplitMix64 rng(1);
  for (int s = 0; s < 30; ++s) {
    const TotalPoint p = random_total_point(*m.source, rng);
    EXPECT_LT(total_distance(*m.target, apply_morphism(m, p), p), 1e-9);
  }
}

TEST(InducedMorphism, ZeroConnectionOnlyReindexes) {
  const BundlePtr xi = trivial_s2_u1();
  const BundleMorphism m = induced_morphism(sphere_rotation_homotopy(1.2), xi, flat_connection(xi), 200);
  SplitMix64 rng(2);
  for (int s = 0; s < 30; ++s) {
    const TotalPoint p = random_total_point(*m.source, rng);
    const TotalPoint q = apply_morphism(m, p);
    EXPECT_LT(distance(q.g, p.g), 1e-15);
    EXPECT_LT(point_distance(*sphere(), q.base, p.base), 1e-15);
  }
}

TEST(InducedMorphism, PreservesFibresAndCommutesWithTheAction) {
  for (const auto& name : {"hopf", "twisted-disk-su2"}) {
    const BundlePtr xi = bundle_by_name(name);
    const Connection c = connection_by_name("partition", xi);
    const Homotopy h = homotopy_chain(xi->base).front().homotopy;
    const BundleMorphism m = induced_morphism(h, xi, c);
    SplitMix64 rng(3);
    for (int s = 0; s < 100; ++s) {
      const TotalPoint p = random_total_point(*m.source, rng);
      const GroupElement g = random_group_element(xi->group, rng);
      const TotalPoint q = apply_morphism(m, p);
      EXPECT_EQ(point_distance(*xi->base, q.base, p.base), 0.0) << name;
      EXPECT_LT(total_distance(*m.target, apply_morphism(m, right_action(*m.source, p, g)), right_action(*m.target, q, g)),
                1e-6)
          << name;
    }
  }
}

TEST(InducedMorphism, RequiresASteadyHomotopy) {
  try {
    induced_morphism(rotation_homotopy(identity_map(sphere()), kAxis, 0.5), hopf(), connection_by_name("partition", hopf()));
    FAIL() << "expected NotSteady";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSteady);
  }
}

TEST(ApplyMorphism, RejectsAPointOutsideItsCoverSet) {
  const BundlePtr xi = hopf();
  const BundleMorphism m = induced_morphism(sphere_rotation_homotopy(0.4), xi, connection_by_name("partition", xi), 50);
  // Pair 0 is (north chart, north cap); the south pole is not in it.
  const TotalPoint p{0, Point{kSouth, Vec::Zero(2)}, identity_element(GroupTag::U1)};
  try {
    apply_morphism(m, p);
    FAIL() << "expected OutOfCover";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfCover);
  }
}

TEST(VerifyFunctoriality, ConstantTailIsHarmless) {
  const BundlePtr xi = hopf();
  const Connection c = connection_by_name("partition", xi);
  const Homotopy h = sphere_rotation_homotopy(0.8);
  const FunctorReport r = verify_functoriality(h, constant_homotopy(h.g_end), xi, c, 30, 1e-6);
  EXPECT_TRUE(r.pass) << r.max_deviation;
}

TEST(VerifyFunctoriality, ZeroConnectionIsExactUpToReindexing) {
  const BundlePtr xi = trivial_s2_u1();
  const Homotopy h = sphere_rotation_homotopy(0.8);
  const FunctorReport r = verify_functoriality(h, reverse(h), xi, flat_connection(xi), 30, 1e-12, 200);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_deviation, 1e-12);
}

TEST(VerifyFunctoriality, TwoRotationsOnHopf) {
  const BundlePtr xi = hopf();
  const Connection c = connection_by_name("partition", xi);
  const auto chain = homotopy_chain(sphere());
  const FunctorReport r = verify_functoriality(chain[0].homotopy, chain[1].homotopy, xi, c, 50, 1e-5);
  EXPECT_TRUE(r.pass) << r.max_deviation;
  EXPECT_EQ(r.samples, 50);
}

TEST(VerifyFunctoriality, DiskChainWithTheTwistedBundle) {
  const BundlePtr xi = twisted_disk_su2();
  const Connection c = connection_by_name("partition", xi);
  const auto chain = homotopy_chain(disk());
  const FunctorReport r = verify_functoriality(chain[1].homotopy, chain[2].homotopy, xi, c, 30, 1e-5);
  EXPECT_TRUE(r.pass) << r.max_deviation;
}

TEST(VerifyIsomorphism, ConstantHomotopyRoundTripsExactly) {
  const BundlePtr xi = hopf();
  const FunctorReport r =
      verify_isomorphism(constant_homotopy(identity_map(sphere())), xi, connection_by_name("partition", xi), 20, 1e-12, 100);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_deviation, 1e-12);
}

TEST(VerifyIsomorphism, ZeroConnectionRoundTrips) {
  const BundlePtr xi = trivial_s2_u1();
  const FunctorReport r = verify_isomorphism(sphere_rotation_homotopy(1.0), xi, flat_connection(xi), 20, 1e-12, 100);
  EXPECT_TRUE(r.pass) << r.max_deviation;
}

TEST(VerifyIsomorphism, RotationOnHopf) {
  const BundlePtr xi = hopf();
  const FunctorReport r = verify_isomorphism(sphere_rotation_homotopy(1.3), xi, connection_by_name("partition", xi), 50, 1e-5);
  EXPECT_TRUE(r.pass) << r.max_deviation;
}

TEST(InducedMorphism, DependsOnTheConnection) {
  const BundlePtr xi = hopf();
  const Homotopy h = sphere_rotation_homotopy(1.5);
  const BundleMorphism a = induced_morphism(h, xi, connection_by_name("partition", xi));
  const BundleMorphism b = induced_morphism(h, xi, monopole_connection());
  SplitMix64 rng(4);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const TotalPoint p = random_total_point(*a.source, rng);
    worst = std::max(worst, total_distance(*a.target, apply_morphism(a, p), apply_morphism(b, p)));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(InducedMorphism, IsLipschitzInTheBasePoint) {
  const BundlePtr xi = hopf();
  const BundleMorphism m = induced_morphism(sphere_rotation_homotopy(1.1), xi, connection_by_name("partition", xi));
  SplitMix64 rng(5);
  for (int s = 0; s < 20; ++s) {
    const TotalPoint p = random_total_point(*m.source, rng);
    const Vec delta = 1e-4 * (Vec(2) << rng.normal(), rng.normal()).finished().normalized();
    const TotalPoint q{p.cover, Point{p.base.chart, Vec(p.base.coords + delta)}, p.g};
    if (!m.source->contains(q.cover, q.base)) continue;
    const double moved = total_distance(*m.target, apply_morphism(m, p), apply_morphism(m, q));
    EXPECT_LT(moved, 1e-4 * 50.0);
  }
}
