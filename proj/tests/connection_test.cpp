#include <cmath>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include "pullback/connection.hpp"
#include "pullback/random.hpp"

using namespace pullback;

namespace {

// Two-set disk bundle with a constant, nontrivial transition.
BundlePtr constant_twist_disk() {
  auto b = std::make_shared<PrincipalBundle>(*twisted_disk_su2());
  b->name = "constant-twist";
  const GroupElement g = exp_alg(su2_algebra(0.4, -0.2, 0.9));
  b->transition = [g](int i, int j, const Point&) {
    if (i == j) return identity_element(GroupTag::SU2);
    return i == 0 ? g : inverse(g);
  };
  b->transition_derivative = [](int, int, const Tangent&) { return CMat(CMat::Zero(2, 2)); };
  return b;
}

Tangent random_tangent(const Manifold& m, SplitMix64& rng) {
  const Point x = to_preferred_chart(m, random_point(m, rng));
  return Tangent{x, (Vec(2) << rng.normal(), rng.normal()).finished()};
}

}  // namespace

TEST(ConnectionFromPartition, SingleSetCoverGivesZeroForm) {
  const Connection c = connection_from_partition(trivial_disk_su2(), partition_of(*trivial_disk_su2()));
  SplitMix64 rng(1);
  for (int s = 0; s < 50; ++s) {
    const Tangent v = random_tangent(*disk(), rng);
    EXPECT_EQ(norm(evaluate_form(c, 0, v.base, v)), 0.0);
  }
}

TEST(ConnectionFromPartition, TrivialSphereBundleGivesZeroForms) {
  const Connection c = connection_from_partition(trivial_s2_u1(), partition_of(*trivial_s2_u1()));
  SplitMix64 rng(2);
  for (int s = 0; s < 50; ++s) {
    const Tangent v = random_tangent(*sphere(), rng);
    for (int i : covering_sets(*c.bundle, v.base)) EXPECT_EQ(norm(evaluate_form(c, i, v.base, v)), 0.0);
  }
}

TEST(ConnectionFromPartition, CompatibleOnEveryCatalogueBundle) {
  for (const auto& name : bundle_names()) {
    const BundlePtr b = bundle_by_name(name);
    const CompatibilityReport r = validate_compatibility(connection_from_partition(b, partition_of(*b)), 1000, 1e-6);
    EXPECT_TRUE(r.pass) << name << " " << r.max_violation;
    EXPECT_EQ(r.samples, 1000);
  }
}

TEST(ConnectionFromPartition, CompatibleOnPullBacks) {
  const BundlePtr b = pull_back(hopf(), degree_map(2));
  const CompatibilityReport r = validate_compatibility(connection_from_partition(b, partition_of(*b)), 500, 1e-6);
  EXPECT_TRUE(r.pass) << r.max_violation;
}

TEST(ConnectionFromPartition, RejectsAWrongNumberOfBumps) {
  PartitionOfUnity rho = partition_of(*hopf());
  rho.bumps.pop_back();
  try {
    connection_from_partition(hopf(), rho);
    FAIL() << "expected PartitionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PartitionMismatch);
  }
}

TEST(ConnectionFromPartition, PartitionsSumToOne) {
  for (const auto& name : bundle_names()) {
    const BundlePtr b = bundle_by_name(name);
    for (const Point& x : sample_points(*b->base, 300)) {
      double sum = 0.0;
      for (int i = 0; i < b->size(); ++i) {
        const double r = b->partition[static_cast<std::size_t>(i)](x);
        EXPECT_GE(r, 0.0);
        if (r > 0.0) EXPECT_TRUE(b->contains(i, x)) << name;
        sum += r;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12) << name;
    }
  }
}

TEST(FlatConnection, TrivialBundleIsExactlyCompatible) {
  const CompatibilityReport r = validate_compatibility(flat_connection(trivial_s2_u1()), 500, 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_violation, 0.0);
}

TEST(FlatConnection, HopfHasVaryingTransitions) {
  try {
    flat_connection(hopf());
    FAIL() << "expected NonConstantTransitions";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConstantTransitions);
  }
}

TEST(FlatConnection, ConstantTransitionsPassTheValidator) {
  const CompatibilityReport r = validate_compatibility(flat_connection(constant_twist_disk()), 500, 1e-12);
  EXPECT_TRUE(r.pass) << r.max_violation;
}

TEST(EvaluateForm, ZeroConnectionVanishes) {
  const Connection c = flat_connection(trivial_disk_su2());
  const Tangent v{Point{0, Vec::Zero(2)}, (Vec(2) << 1.0, 2.0).finished()};
  EXPECT_EQ(norm(evaluate_form(c, 0, v.base, v)), 0.0);
}

TEST(EvaluateForm, IsLinearAndAntiHermitian) {
  SplitMix64 rng(3);
  for (const auto& name : {"hopf", "twisted-disk-su2"}) {
    const BundlePtr b = bundle_by_name(name);
    const Connection c = connection_by_name("partition", b);
    for (int s = 0; s < 100; ++s) {
      const Tangent v = random_tangent(*b->base, rng);
      const Tangent w{v.base, (Vec(2) << rng.normal(), rng.normal()).finished()};
      for (int i : covering_sets(*b, v.base)) {
        const AlgebraElement a = evaluate_form(c, i, v.base, v);
        const AlgebraElement a2 = evaluate_form(c, i, v.base, Tangent{v.base, Vec(2.0 * v.components)});
        const AlgebraElement aw = evaluate_form(c, i, v.base, w);
        const AlgebraElement sum = evaluate_form(c, i, v.base, Tangent{v.base, Vec(v.components + w.components)});
        EXPECT_LT(norm(a2 - 2.0 * a), 1e-9);
        EXPECT_LT(norm(sum - (a + aw)), 1e-9);
        EXPECT_LT(anti_hermitian_defect(a), 1e-12);
      }
    }
  }
}

TEST(EvaluateForm, OutsideTheCoverSetThrows) {
  const Connection c = connection_by_name("partition", hopf());
  const Point south_pole{kSouth, Vec::Zero(2)};
  try {
    evaluate_form(c, kNorth, south_pole, Tangent{south_pole, Vec::Ones(2)});
    FAIL() << "expected OutOfCover";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfCover);
  }
}

TEST(MonopoleConnection, HalfUnitOnTheEquator) {
  // d/dphi at z = e^{i phi} is i z in the north chart.
  const Connection c = monopole_connection();
  for (double phi : {0.0, 1.0, -2.5}) {
    const cplx z = std::polar(1.0, phi);
    const Point x{kNorth, as_coords(z)};
    const AlgebraElement a = evaluate_form(c, kNorth, x, Tangent{x, as_coords(cplx(0.0, 1.0) * z)});
    EXPECT_LT(std::abs(a.entries(0, 0) - cplx(0.0, -0.5)), 1e-9);
  }
}

TEST(MonopoleConnection, MatchesThePolarClosedForm) {
  // -(i/2)(1 - cos theta) dphi on the north cap.
  const Connection c = monopole_connection();
  for (double theta : {0.3, 1.0, 1.9, 2.6}) {
    const double phi = 0.7;
    const Point x = to_preferred_chart(*sphere(), sphere_point_polar(theta, phi));
    if (!c.bundle->contains(kNorth, x)) continue;
    const double h = 1e-6;
    const Point xp = change_chart(*sphere(), sphere_point_polar(theta, phi + h), x.chart);
    const Point xm = change_chart(*sphere(), sphere_point_polar(theta, phi - h), x.chart);
    const Tangent d_phi{x, Vec((xp.coords - xm.coords) / (2.0 * h))};
    const AlgebraElement a = evaluate_form(c, kNorth, x, d_phi);
    EXPECT_NEAR(a.entries(0, 0).imag(), -0.5 * (1.0 - std::cos(theta)), 1e-8) << theta;
  }
}

TEST(MonopoleConnection, IsCompatibleWithTheHopfCocycle) {
  const CompatibilityReport r = validate_compatibility(monopole_connection(), 1000, 1e-9);
  EXPECT_TRUE(r.pass) << r.max_violation;
}

TEST(ValidateCompatibility, DetectsACorruptedSouthForm) {
  Connection c = monopole_connection();
  const LocalForm south = c.forms[kSouth];
  c.forms[kSouth] = [south](const Tangent& v) { return 2.0 * south(v); };
  const CompatibilityReport r = validate_compatibility(c, 500, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_violation, 1e-2);
}

TEST(ConnectionByName, MonopoleLivesOnlyOnHopf) {
  EXPECT_NO_THROW(connection_by_name("monopole", hopf()));
  EXPECT_THROW(connection_by_name("monopole", trivial_s2_u1()), Error);
  EXPECT_THROW(connection_by_name("spin", hopf()), Error);
}
