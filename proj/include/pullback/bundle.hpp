#pragma once

// Principal bundles stored as cocycle data over an open cover of the base,
// total-space points in a chosen trivialization, the right action and
// pull-backs along smooth maps.
//
// Convention: a total-space point (i, x, g) is the same point as
// (j, x, g_ji(x) g). The transitions therefore satisfy g_ij g_jk = g_ik.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/group.hpp"

namespace pullback {

struct CoverSet {
  std::string label;
  /// Positive exactly on the open set.
  std::function<double(const Point&)> margin;
};

struct PrincipalBundle;
using BundlePtr = std::shared_ptr<const PrincipalBundle>;

/// Bookkeeping kept by pull_back: index k of the pull-back is the pair
/// pairs[k] = (chart of the new base, cover index of the pulled bundle).
struct PullbackData {
  BundlePtr pulled;
  SmoothMap map;
  std::vector<std::pair<int, int>> pairs;
};

struct PrincipalBundle {
  std::string name;
  ManifoldPtr base;
  GroupTag group = GroupTag::U1;
  std::vector<CoverSet> cover;
  /// g_ij on U_i n U_j.
  std::function<GroupElement(int i, int j, const Point&)> transition;
  /// Optional analytic dg_ij(v); finite differences are used when empty.
  std::function<CMat(int i, int j, const Tangent&)> transition_derivative;
  /// Optional partition of unity subordinate to `cover`.
  std::vector<std::function<double(const Point&)>> partition;
  std::shared_ptr<const PullbackData> pullback;

  int size() const { return static_cast<int>(cover.size()); }
  double margin(int i, const Point& x) const { return cover[static_cast<std::size_t>(i)].margin(x); }
  bool contains(int i, const Point& x) const { return i >= 0 && i < size() && margin(i, x) > 0.0; }
};

struct TotalPoint {
  int cover = 0;
  Point base;
  GroupElement g;
};

struct CocycleReport {
  double max_violation = 0.0;
  int samples = 0;
  bool pass = true;
};

inline constexpr std::size_t kDefaultSamples = 1000;

/// Cover sets holding x, ascending.
inline std::vector<int> covering_sets(const PrincipalBundle& b, const Point& x) {
  std::vector<int> out;
  for (int i = 0; i < b.size(); ++i)
    if (b.contains(i, x)) out.push_back(i);
  return out;
}

/// Cover set with the greatest margin at x, ties to the lowest index; -1 if
/// none contains x.
inline int best_cover(const PrincipalBundle& b, const Point& x) {
  int best = -1;
  double best_margin = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    const double m = b.margin(i, x);
    if (m > best_margin) {
      best_margin = m;
      best = i;
    }
  }
  return best;
}

/// Samples `samples` points lying in at least two cover sets (any point when
/// the cover has a single set) and reports max ||g_ij g_jk - g_ik|| over all
/// index triples available at each point.
inline CocycleReport validate_cocycle(const PrincipalBundle& b, std::size_t samples, double tol) {
  const std::size_t need = b.size() > 1 ? 2 : 1;
  auto pts = sample_points(*b.base, samples,
                           [&](const Point& x) { return covering_sets(b, x).size() >= need; });
  CocycleReport report;
  for (const auto& x : pts) {
    const auto idx = covering_sets(b, x);
    for (int i : idx)
      for (int j : idx)
        for (int k : idx) {
          const CMat lhs = b.transition(i, j, x).entries * b.transition(j, k, x).entries;
          const double v = (lhs - b.transition(i, k, x).entries).norm();
          report.max_violation = std::max(report.max_violation, v);
        }
  }
  report.samples = static_cast<int>(pts.size());
  report.pass = report.max_violation <= tol;
  return report;
}

inline TotalPoint right_action(const PrincipalBundle& b, const TotalPoint& p, const GroupElement& g) {
  require_same_tag(b.group, g.tag);
  require_same_tag(p.g.tag, g.tag);
  return TotalPoint{p.cover, p.base, multiply(p.g, g)};
}

/// Re-expresses p in trivialization `target`: g' = g_ji(x) g.
inline TotalPoint change_trivialization(const PrincipalBundle& b, const TotalPoint& p, int target) {
  if (target == p.cover) return p;
  if (!b.contains(p.cover, p.base) || !b.contains(target, p.base))
    throw Error(ErrorKind::OutOfOverlap, b.name + ": base point not in the overlap of sets " +
                                             std::to_string(p.cover) + " and " + std::to_string(target));
  return TotalPoint{target, p.base, multiply(b.transition(target, p.cover, p.base), p.g)};
}

/// Distance between total-space points over the same base: both are
/// re-expressed in the lower cover index, then Frobenius distance of the
/// group entries plus coordinate distance of the base points.
inline double total_distance(const PrincipalBundle& b, const TotalPoint& p, const TotalPoint& q) {
  const int idx = std::min(p.cover, q.cover);
  const TotalPoint a = change_trivialization(b, p, idx);
  const TotalPoint c = change_trivialization(b, q, idx);
  return distance(a.g, c.g) + point_distance(*b.base, a.base, c.base);
}

/// dg_ij(v): analytic when available, else central differences with step
/// 1e-6 max(1, |coords|) along the unit direction of v.
inline CMat transition_differential(const PrincipalBundle& b, int i, int j, const Tangent& v) {
  if (b.transition_derivative) return b.transition_derivative(i, j, v);
  const int n = group_dim(b.group);
  const double speed = v.components.norm();
  if (speed == 0.0) return CMat::Zero(n, n);
  const Manifold& m = *b.base;
  return detail::with_stencil_chart(m, v.base, [&](const Point& q) {
    const Tangent vq = change_chart(m, v, q.chart);
    const double h = 1e-6 * std::max(1.0, q.coords.norm());
    const Vec dir = vq.components / speed;
    Point plus{q.chart, q.coords + h * dir};
    Point minus{q.chart, q.coords - h * dir};
    const Chart& chart = m.charts[static_cast<std::size_t>(q.chart)];
    if (!chart.contains(plus.coords) || !chart.contains(minus.coords) || !b.contains(i, plus) ||
        !b.contains(j, plus) || !b.contains(i, minus) || !b.contains(j, minus))
      throw Error(ErrorKind::DomainEscape, b.name + ": stencil leaves the overlap");
    CMat d = (b.transition(i, j, plus).entries - b.transition(i, j, minus).entries) / (2.0 * h);
    return CMat(speed * d);
  });
}

/// Pull-back of xi along f: M -> N. Cover sets are V = (chart a of M) n
/// f^{-1}(U_i), indexed by (a, i) in lexicographic order with empty sets
/// dropped (emptiness is decided on a dense Halton sample of M);
/// transitions are g_ij o f.
inline BundlePtr pull_back(const BundlePtr& xi, const SmoothMap& f) {
  if (f.target->name != xi->base->name)
    throw Error(ErrorKind::EmptyCover, "pull_back: map target " + f.target->name +
                                           " is not the bundle base " + xi->base->name);
  const Manifold& m = *f.source;
  auto data = std::make_shared<PullbackData>();
  data->pulled = xi;
  data->map = f;

  // Closed (boundary-carrying) charts hold the whole closed domain, so their
  // margin is shifted to stay positive on the boundary.
  auto in_set = [xi, f, mp = f.source](int a, int i, const Point& x) {
    const Chart& chart = mp->charts[static_cast<std::size_t>(a)];
    double cm = chart_margin(*mp, x, a);
    if (chart.closed) cm += 1.0;
    if (!(cm > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::min(cm, xi->margin(i, f(x)));
  };

  const auto probe = sample_points(m, 4096);
  for (const auto& chart : m.charts)
    for (int i = 0; i < xi->size(); ++i) {
      const bool nonempty = std::any_of(probe.begin(), probe.end(),
                                        [&](const Point& x) { return in_set(chart.id, i, x) > 0.0; });
      if (nonempty) data->pairs.emplace_back(chart.id, i);
    }
  if (data->pairs.empty()) throw Error(ErrorKind::EmptyCover, "pull_back: every preimage is empty");

  auto out = std::make_shared<PrincipalBundle>();
  out->name = "pullback(" + xi->name + ")";
  out->base = f.source;
  out->group = xi->group;
  const auto pairs = data->pairs;
  for (const auto& [a, i] : pairs) {
    out->cover.push_back(CoverSet{"chart" + std::to_string(a) + "/" + xi->cover[static_cast<std::size_t>(i)].label,
                                  [in_set, a, i](const Point& x) { return in_set(a, i, x); }});
  }
  out->transition = [xi, f, pairs](int k, int l, const Point& x) {
    return xi->transition(pairs[static_cast<std::size_t>(k)].second, pairs[static_cast<std::size_t>(l)].second, f(x));
  };
  if (xi->transition_derivative) {
    out->transition_derivative = [xi, f, pairs](int k, int l, const Tangent& v) {
      const Tangent w = differential(f, v.base, v);
      return xi->transition_derivative(pairs[static_cast<std::size_t>(k)].second,
                                       pairs[static_cast<std::size_t>(l)].second, w);
    };
  }
  if (!xi->partition.empty() && m.chart_partition.size() == m.charts.size()) {
    for (const auto& [a, i] : pairs) {
      auto rho_m = m.chart_partition[static_cast<std::size_t>(a)];
      auto rho_n = xi->partition[static_cast<std::size_t>(i)];
      out->partition.push_back([rho_m, rho_n, f](const Point& x) { return rho_m(x) * rho_n(f(x)); });
    }
  }
  out->pullback = data;
  return out;
}

// ---------------------------------------------------------------------------
// Catalogue bundles over the sphere (cover 0 = north cap, 1 = south cap) and
// the disk.

namespace detail {

inline double sphere_chart_set_margin(const Point& x, int chart) { return chart_margin(*sphere(), x, chart); }

inline std::vector<CoverSet> sphere_caps() {
  return {CoverSet{"north", [](const Point& x) { return sphere_chart_set_margin(x, kNorth); }},
          CoverSet{"south", [](const Point& x) { return sphere_chart_set_margin(x, kSouth); }}};
}

}  // namespace detail

inline BundlePtr trivial_s2_u1() {
  static const BundlePtr b = [] {
    auto out = std::make_shared<PrincipalBundle>();
    out->name = "trivial-s2-u1";
    out->base = sphere();
    out->group = GroupTag::U1;
    out->cover = detail::sphere_caps();
    out->transition = [](int, int, const Point&) { return identity_element(GroupTag::U1); };
    out->transition_derivative = [](int, int, const Tangent&) { return CMat(CMat::Zero(1, 1)); };
    out->partition = sphere()->chart_partition;
    return out;
  }();
  return b;
}

/// Hopf bundle: g_NS(z) = z / |z| in the north chart coordinate z.
inline BundlePtr hopf() {
  static const BundlePtr b = [] {
    auto out = std::make_shared<PrincipalBundle>();
    out->name = "hopf";
    out->base = sphere();
    out->group = GroupTag::U1;
    out->cover = detail::sphere_caps();
    out->transition = [](int i, int j, const Point& x) {
      if (i == j) return identity_element(GroupTag::U1);
      const cplx z = as_complex(change_chart(*sphere(), x, kNorth).coords);
      const cplx g = z / std::abs(z);
      return GroupElement{GroupTag::U1, CMat::Constant(1, 1, i == kNorth ? g : std::conj(g))};
    };
    // d(z/|z|) = i (z/|z|) dphi with dphi = (x dy - y dx) / r^2.
    out->transition_derivative = [](int i, int j, const Tangent& v) {
      if (i == j) return CMat(CMat::Zero(1, 1));
      const Tangent vn = change_chart(*sphere(), v, kNorth);
      const cplx z = as_complex(vn.base.coords);
      const double r2 = std::norm(z);
      const double dphi = (z.real() * vn.components[1] - z.imag() * vn.components[0]) / r2;
      const cplx g = z / std::sqrt(r2);
      const cplx d = i == kNorth ? cplx(0.0, dphi) * g : cplx(0.0, -dphi) * std::conj(g);
      return CMat(CMat::Constant(1, 1, d));
    };
    out->partition = sphere()->chart_partition;
    return out;
  }();
  return b;
}

inline BundlePtr trivial_disk_su2() {
  static const BundlePtr b = [] {
    auto out = std::make_shared<PrincipalBundle>();
    out->name = "trivial-disk-su2";
    out->base = disk();
    out->group = GroupTag::SU2;
    out->cover = {CoverSet{"disk", [](const Point&) { return 1.0; }}};
    out->transition = [](int, int, const Point&) { return identity_element(GroupTag::SU2); };
    out->transition_derivative = [](int, int, const Tangent&) { return CMat(CMat::Zero(2, 2)); };
    out->partition = {[](const Point&) { return 1.0; }};
    return out;
  }();
  return b;
}

inline constexpr double kTwistStrength = 1.5;

/// Disk SU(2) bundle on an inner disk (r < 0.8) and outer annulus (r > 0.2),
/// with g_01(x) = exp(i c x1 sigma_x) exp(i c x2 sigma_y).
inline BundlePtr twisted_disk_su2() {
  static const BundlePtr b = [] {
    auto out = std::make_shared<PrincipalBundle>();
    out->name = "twisted-disk-su2";
    out->base = disk();
    out->group = GroupTag::SU2;
    out->cover = {CoverSet{"inner", [](const Point& x) { return 0.8 - x.coords.norm(); }},
                  CoverSet{"outer", [](const Point& x) { return x.coords.norm() - 0.2; }}};
    auto factors = [](const Vec& c) {
      return std::pair{exp_alg(su2_algebra(kTwistStrength * c[0], 0.0, 0.0)),
                       exp_alg(su2_algebra(0.0, kTwistStrength * c[1], 0.0))};
    };
    out->transition = [factors](int i, int j, const Point& x) {
      if (i == j) return identity_element(GroupTag::SU2);
      const auto [gx, gy] = factors(x.coords);
      const GroupElement g01{GroupTag::SU2, gx.entries * gy.entries};
      return i == 0 ? g01 : inverse(g01);
    };
    out->transition_derivative = [factors](int i, int j, const Tangent& v) {
      if (i == j) return CMat(CMat::Zero(2, 2));
      const auto [gx, gy] = factors(v.base.coords);
      const CMat ax = su2_algebra(kTwistStrength * v.components[0], 0.0, 0.0).entries;
      const CMat ay = su2_algebra(0.0, kTwistStrength * v.components[1], 0.0).entries;
      const CMat d01 = ax * gx.entries * gy.entries + gx.entries * ay * gy.entries;
      if (i == 0) return d01;
      // d(g^-1) = -g^-1 dg g^-1.
      const CMat ginv = (gx.entries * gy.entries).adjoint();
      return CMat(-ginv * d01 * ginv);
    };
    auto inner = [](const Point& x) { return detail::smooth_step_down(x.coords.norm(), 0.25, 0.75); };
    out->partition = {inner, [inner](const Point& x) { return 1.0 - inner(x); }};
    return out;
  }();
  return b;
}

inline const std::vector<std::string>& bundle_names() {
  static const std::vector<std::string> names{"trivial-s2-u1", "hopf", "trivial-disk-su2", "twisted-disk-su2"};
  return names;
}

inline BundlePtr bundle_by_name(const std::string& name) {
  if (name == "trivial-s2-u1") return trivial_s2_u1();
  if (name == "hopf") return hopf();
  if (name == "trivial-disk-su2") return trivial_disk_su2();
  if (name == "twisted-disk-su2") return twisted_disk_su2();
  throw Error(ErrorKind::InvalidConfig, "unknown bundle '" + name + "'");
}

}  // namespace pullback
