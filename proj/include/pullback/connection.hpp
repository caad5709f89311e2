#pragma once

// Connections as local Lie-algebra-valued 1-forms A_i, one per cover set.
// With the bundle convention g_j = g_ji g_i and the lift equation
// g' = -A(velocity) g, the forms must satisfy on overlaps
//
//   A_j = g_ij^{-1} A_i g_ij + g_ij^{-1} dg_ij.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pullback/bundle.hpp"
#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/group.hpp"
#include "pullback/random.hpp"

namespace pullback {

using LocalForm = std::function<AlgebraElement(const Tangent&)>;

struct PartitionOfUnity {
  std::vector<std::function<double(const Point&)>> bumps;
};

struct Connection {
  std::string name;
  BundlePtr bundle;
  std::vector<LocalForm> forms;
};

struct CompatibilityReport {
  double max_violation = 0.0;
  int samples = 0;
  bool pass = true;
};

/// Projects onto the Lie algebra (anti-Hermitian part, traceless for SU(2)).
inline AlgebraElement project_to_algebra(GroupTag tag, const CMat& x) {
  CMat a = 0.5 * (x - x.adjoint());
  if (tag == GroupTag::SU2) a -= (a.trace() / 2.0) * CMat::Identity(2, 2);
  return {tag, a};
}

inline PartitionOfUnity partition_of(const PrincipalBundle& b) { return PartitionOfUnity{b.partition}; }

/// Glues the flat local connections of the trivializations:
/// A_i = sum_j rho_j g_ji^{-1} dg_ji.
inline Connection connection_from_partition(const BundlePtr& b, const PartitionOfUnity& rho) {
  if (static_cast<int>(rho.bumps.size()) != b->size())
    throw Error(ErrorKind::PartitionMismatch, b->name + ": " + std::to_string(rho.bumps.size()) +
                                                  " bumps for " + std::to_string(b->size()) + " cover sets");
  Connection c{"partition", b, {}};
  for (int i = 0; i < b->size(); ++i) {
    c.forms.push_back([b, bumps = rho.bumps, i](const Tangent& v) {
      CMat acc = CMat::Zero(group_dim(b->group), group_dim(b->group));
      for (int j = 0; j < b->size(); ++j) {
        if (j == i) continue;
        const double r = bumps[static_cast<std::size_t>(j)](v.base);
        if (!(r > 0.0)) continue;
        const GroupElement g = b->transition(j, i, v.base);
        acc += r * (g.entries.adjoint() * transition_differential(*b, j, i, v));
      }
      return project_to_algebra(b->group, acc);
    });
  }
  return c;
}

/// Zero forms; only legal when every transition is constant.
inline Connection flat_connection(const BundlePtr& b, std::size_t samples = 200) {
  const auto pts = sample_points(*b->base, samples);
  for (int i = 0; i < b->size(); ++i)
    for (int j = 0; j < b->size(); ++j) {
      if (i == j) continue;
      const GroupElement* first = nullptr;
      GroupElement reference;
      for (const auto& x : pts) {
        if (!b->contains(i, x) || !b->contains(j, x)) continue;
        GroupElement g = b->transition(i, j, x);
        if (!first) {
          reference = g;
          first = &reference;
        } else if ((g.entries - reference.entries).norm() >= 1e-12) {
          throw Error(ErrorKind::NonConstantTransitions, b->name + ": transitions vary, zero forms are incompatible");
        }
      }
    }
  Connection c{"flat", b, {}};
  for (int i = 0; i < b->size(); ++i)
    c.forms.push_back([tag = b->group](const Tangent&) { return zero_algebra(tag); });
  return c;
}

/// Charge-one monopole on the Hopf bundle. In either stereographic chart
/// with coordinate u = x + i y it reads A = -i (x dy - y dx) / (1 + |u|^2),
/// i.e. A_N = -(i/2)(1 - cos theta) dphi and A_S = (i/2)(1 + cos theta) dphi.
inline Connection monopole_connection() {
  const BundlePtr b = hopf();
  Connection c{"monopole", b, {}};
  for (int chart : {kNorth, kSouth}) {
    c.forms.push_back([chart](const Tangent& v) {
      const Tangent w = change_chart(*sphere(), v, chart);
      const double x = w.base.coords[0];
      const double y = w.base.coords[1];
      const double coeff = -(x * w.components[1] - y * w.components[0]) / (1.0 + x * x + y * y);
      return u1_algebra(coeff);
    });
  }
  return c;
}

inline const std::vector<std::string>& connection_names() {
  static const std::vector<std::string> names{"partition", "flat", "monopole"};
  return names;
}

inline Connection connection_by_name(const std::string& name, const BundlePtr& b) {
  if (name == "partition") return connection_from_partition(b, partition_of(*b));
  if (name == "flat") return flat_connection(b);
  if (name == "monopole") {
    if (b->name != "hopf") throw Error(ErrorKind::InvalidConfig, "the monopole connection lives on the hopf bundle");
    return monopole_connection();
  }
  throw Error(ErrorKind::InvalidConfig, "unknown connection '" + name + "'");
}

/// A_i(p)(v).
inline AlgebraElement evaluate_form(const Connection& c, int i, const Point& p, const Tangent& v) {
  if (!c.bundle->contains(i, p))
    throw Error(ErrorKind::OutOfCover, c.bundle->name + ": point outside cover set " + std::to_string(i));
  return c.forms[static_cast<std::size_t>(i)](change_chart(*c.bundle->base, v, p.chart));
}

/// Max over sampled overlap points and unit tangents of
/// ||A_j - (g_ij^{-1} A_i g_ij + g_ij^{-1} dg_ij)||.
inline CompatibilityReport validate_compatibility(const Connection& c, std::size_t samples, double tol) {
  const PrincipalBundle& b = *c.bundle;
  const std::size_t need = b.size() > 1 ? 2 : 1;
  const auto pts = sample_points(*b.base, samples,
                                 [&](const Point& x) { return covering_sets(b, x).size() >= need; });
  SplitMix64 rng(0);
  CompatibilityReport report;
  for (const auto& x : pts) {
    Vec dir(b.base->dim);
    for (int d = 0; d < b.base->dim; ++d) dir[d] = rng.normal();
    const Tangent v{x, dir.normalized()};
    const auto idx = covering_sets(b, x);
    for (int i : idx)
      for (int j : idx) {
        const GroupElement g = b.transition(i, j, x);
        const CMat predicted = g.entries.adjoint() * c.forms[static_cast<std::size_t>(i)](v).entries * g.entries +
                               g.entries.adjoint() * transition_differential(b, i, j, v);
        const double dev = (c.forms[static_cast<std::size_t>(j)](v).entries - predicted).norm();
        report.max_violation = std::max(report.max_violation, dev);
      }
  }
  report.samples = static_cast<int>(pts.size());
  report.pass = report.max_violation <= tol;
  return report;
}

}  // namespace pullback
