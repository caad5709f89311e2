#pragma once

// Charts, atlases, points, tangents, smooth maps and paths for a fixed
// catalogue of low-dimensional manifolds: the unit interval, the circle, the
// closed disk and the two-sphere.
//
// Points and tangents are always expressed in one chart. Operations that need
// another chart go through change_chart, which fails with OutOfOverlap when
// the target chart does not contain the point.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pullback/error.hpp"

namespace pullback {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;

struct Point {
  int chart = 0;
  Vec coords;
};

struct Tangent {
  Point base;
  Vec components;
};

struct Chart {
  int id = 0;
  int dim = 0;
  /// Signed distance-like margin in chart coordinates; positive inside.
  std::function<double(const Vec&)> margin;
  /// Manifold-with-boundary charts also accept margin == 0.
  bool closed = false;

  bool contains(const Vec& coords) const {
    if (!coords.allFinite()) return false;
    const double m = margin(coords);
    return closed ? m >= 0.0 : m > 0.0;
  }
};

struct Manifold {
  std::string name;
  int dim = 0;
  std::vector<Chart> charts;
  /// Coordinate change from chart `from` to chart `to`. Only meaningful on
  /// the overlap; callers validate the result with the target chart.
  std::function<Vec(int from, int to, const Vec&)> transition;
  /// Jacobian of `transition` at a point given in chart `from`.
  std::function<Mat(int from, int to, const Vec&)> transition_jacobian;
  /// Maps the unit cube [0,1)^sample_dim onto the manifold; nullopt rejects.
  std::function<std::optional<Point>(std::span<const double>)> from_unit_cube;
  int sample_dim = 0;
  /// Partition of unity subordinate to the charts (one bump per chart).
  std::vector<std::function<double(const Point&)>> chart_partition;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

inline constexpr double kPreferredChartMargin = 0.1;

// ---------------------------------------------------------------------------
// Charts

inline Point change_chart(const Manifold& m, const Point& p, int target) {
  if (p.chart == target) return p;
  if (target < 0 || target >= static_cast<int>(m.charts.size()))
    throw Error(ErrorKind::OutOfOverlap, m.name + ": no chart " + std::to_string(target));
  if (!m.charts[p.chart].contains(p.coords))
    throw Error(ErrorKind::OutOfOverlap, m.name + ": point outside its own chart");
  Vec c = m.transition(p.chart, target, p.coords);
  if (!m.charts[target].contains(c))
    throw Error(ErrorKind::OutOfOverlap,
                m.name + ": chart " + std::to_string(target) + " rejects the point");
  return Point{target, std::move(c)};
}

inline std::optional<Point> try_change_chart(const Manifold& m, const Point& p, int target) {
  if (target < 0 || target >= static_cast<int>(m.charts.size())) return std::nullopt;
  if (!m.charts[p.chart].contains(p.coords)) return std::nullopt;
  if (p.chart == target) return p;
  Vec c = m.transition(p.chart, target, p.coords);
  if (!m.charts[target].contains(c)) return std::nullopt;
  return Point{target, std::move(c)};
}

inline Tangent change_chart(const Manifold& m, const Tangent& v, int target) {
  if (v.base.chart == target) return v;
  Point base = change_chart(m, v.base, target);
  Vec comps = m.transition_jacobian(v.base.chart, target, v.base.coords) * v.components;
  return Tangent{std::move(base), std::move(comps)};
}

/// Margin of `p` in chart `chart`, or -inf when the chart does not contain it.
inline double chart_margin(const Manifold& m, const Point& p, int chart) {
  auto q = try_change_chart(m, p, chart);
  if (!q) return -std::numeric_limits<double>::infinity();
  return m.charts[chart].margin(q->coords);
}

/// Lowest chart id holding the point with margin >= 0.1; otherwise the
/// containing chart with the greatest margin (ties to the lowest id).
inline int preferred_chart(const Manifold& m, const Point& p) {
  int best = -1;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (const auto& chart : m.charts) {
    auto q = try_change_chart(m, p, chart.id);
    if (!q) continue;
    const double margin = chart.margin(q->coords);
    if (margin >= kPreferredChartMargin) return chart.id;
    if (margin > best_margin) {
      best_margin = margin;
      best = chart.id;
    }
  }
  if (best < 0) throw Error(ErrorKind::ChartGap, m.name + ": point lies in no chart");
  return best;
}

inline Point to_preferred_chart(const Manifold& m, const Point& p) {
  return change_chart(m, p, preferred_chart(m, p));
}

/// Coordinate distance after expressing `q` in the chart of `p` (or the
/// other way round when that fails).
inline double point_distance(const Manifold& m, const Point& p, const Point& q) {
  if (auto q2 = try_change_chart(m, q, p.chart)) return (p.coords - q2->coords).norm();
  if (auto p2 = try_change_chart(m, p, q.chart)) return (p2->coords - q.coords).norm();
  return std::numeric_limits<double>::infinity();
}

inline double tangent_distance(const Manifold& m, const Tangent& a, const Tangent& b) {
  Tangent b2 = change_chart(m, b, a.base.chart);
  return (a.components - b2.components).norm() + (a.base.coords - b2.base.coords).norm();
}

// ---------------------------------------------------------------------------
// Low-discrepancy sampling

inline double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

/// Point `index` (starting at 1) of the Halton sequence in the given dimension.
inline std::vector<double> halton(std::size_t index, int dim) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  std::vector<double> u(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) u[static_cast<std::size_t>(d)] = radical_inverse(index, kPrimes[d]);
  return u;
}

/// Deterministic manifold sample: walks the Halton sequence, keeps points
/// accepted by `accept`, stops after `count` accepted or `count * 200` drawn.
inline std::vector<Point> sample_points(const Manifold& m, std::size_t count,
                                        const std::function<bool(const Point&)>& accept = {}) {
  std::vector<Point> out;
  out.reserve(count);
  const std::size_t limit = count * 200 + 1000;
  for (std::size_t i = 1; out.size() < count && i < limit; ++i) {
    auto u = halton(i, m.sample_dim);
    auto p = m.from_unit_cube(u);
    if (!p) continue;
    if (accept && !accept(*p)) continue;
    out.push_back(std::move(*p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smooth maps

struct SmoothMap {
  ManifoldPtr source;
  ManifoldPtr target;
  /// The result may be expressed in any target chart.
  std::function<Point(const Point&)> eval;
  /// Optional analytic Jacobian, from the chart of the argument to the chart
  /// of eval(argument).
  std::function<Mat(const Point&)> jacobian;

  Point operator()(const Point& p) const { return eval(p); }
};

namespace detail {

inline Vec finite_difference(const Manifold& src, const Point& p, const Vec& direction,
                             const std::function<Vec(const Point&)>& fn) {
  const double h = 1e-6 * std::max(1.0, p.coords.norm());
  const Chart& chart = src.charts[p.chart];
  Point plus{p.chart, p.coords + h * direction};
  Point minus{p.chart, p.coords - h * direction};
  if (!chart.contains(plus.coords) || !chart.contains(minus.coords))
    throw Error(ErrorKind::DomainEscape, src.name + ": difference stencil leaves the chart");
  return (fn(plus) - fn(minus)) / (2.0 * h);
}

// Runs fn in p's own chart first, then in every other chart holding p.
template <typename Fn>
auto with_stencil_chart(const Manifold& m, const Point& p, Fn&& fn) {
  std::vector<int> order{p.chart};
  for (const auto& c : m.charts)
    if (c.id != p.chart) order.push_back(c.id);
  for (int chart : order) {
    auto q = try_change_chart(m, p, chart);
    if (!q) continue;
    try {
      return fn(*q);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DomainEscape) throw;
    }
  }
  throw Error(ErrorKind::DomainEscape, m.name + ": difference stencil leaves every chart");
}

}  // namespace detail

/// Jacobian-vector product of f at p. Uses the analytic Jacobian when the
/// map has one, central differences otherwise.
inline Tangent differential(const SmoothMap& f, const Point& p, const Tangent& v) {
  const Manifold& src = *f.source;
  const Manifold& dst = *f.target;
  Tangent v0 = change_chart(src, v, p.chart);
  Point fp = f(p);
  if (f.jacobian) return Tangent{fp, f.jacobian(p) * v0.components};

  const double speed = v0.components.norm();
  if (speed == 0.0) return Tangent{fp, Vec::Zero(dst.dim)};
  return detail::with_stencil_chart(src, p, [&](const Point& q) {
    Tangent vq = change_chart(src, v0, q.chart);
    const Vec dir = vq.components / speed;
    Vec d = detail::finite_difference(src, q, dir, [&](const Point& x) {
      return change_chart(dst, f(x), fp.chart).coords;
    });
    return Tangent{fp, speed * d};
  });
}

// ---------------------------------------------------------------------------
// Paths

struct PathT {
  ManifoldPtr target;
  /// Raw evaluation; the returned point may use any chart.
  std::function<Point(double)> eval;
  /// 0 = breaks.front() < ... < breaks.back() = 1.
  std::vector<double> breaks;
  /// charts[k] is valid on [breaks[k], breaks[k+1]].
  std::vector<int> charts;

  std::size_t pieces() const { return charts.size(); }

  /// Piece holding t; breakpoints belong to the piece on their right, t = 1
  /// to the last piece.
  std::size_t piece(double t) const {
    auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    std::size_t k = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
    return std::min(k, charts.size() - 1);
  }

  Point at(double t, std::size_t k) const {
    Point raw = eval(t);
    if (auto q = try_change_chart(*target, raw, charts[k])) return *q;
    return to_preferred_chart(*target, raw);
  }

  Point operator()(double t) const { return at(t, piece(t)); }
};

inline constexpr int kScheduleSamples = 256;

/// Builds a path whose chart schedule follows the preferred-chart rule on
/// `samples` equally spaced parameters, with a breakpoint halfway between
/// samples where the preferred chart switches. Extra breakpoints in `joins`
/// (e.g. where two paths were glued) are always kept.
inline PathT make_path(ManifoldPtr target, std::function<Point(double)> eval,
                       std::vector<double> joins = {}, int samples = kScheduleSamples) {
  PathT path;
  path.target = std::move(target);
  path.eval = std::move(eval);
  const int n = std::max(samples, 2);
  std::vector<double> ts(static_cast<std::size_t>(n));
  std::vector<int> pref(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ts[static_cast<std::size_t>(k)] = static_cast<double>(k) / (n - 1);
    pref[static_cast<std::size_t>(k)] = preferred_chart(*path.target, path.eval(ts[static_cast<std::size_t>(k)]));
  }
  std::sort(joins.begin(), joins.end());
  std::size_t next_join = 0;
  path.breaks.push_back(0.0);
  path.charts.push_back(pref[0]);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    while (next_join < joins.size() && joins[next_join] <= ts[k]) {
      const double j = joins[next_join++];
      if (j > path.breaks.back() && j < 1.0) {
        path.breaks.push_back(j);
        path.charts.push_back(preferred_chart(*path.target, path.eval(j)));
      }
    }
    if (pref[k] != path.charts.back()) {
      const double mid = 0.5 * (ts[k - 1] + ts[k]);
      if (mid > path.breaks.back()) {
        path.breaks.push_back(mid);
        path.charts.push_back(pref[k]);
      } else {
        path.charts.back() = pref[k];
      }
    }
  }
  path.breaks.push_back(1.0);
  return path;
}

inline constexpr double kVelocityStep = 1e-6;

/// Velocity on piece k of the schedule, by differences that stay inside the
/// piece: central in the interior, second-order one-sided at its ends.
inline Tangent path_velocity_on_piece(const PathT& alpha, double t, std::size_t k) {
  const double a = alpha.breaks[k];
  const double b = alpha.breaks[k + 1];
  const double h = std::min(kVelocityStep, 0.25 * (b - a));
  Point p = alpha.at(t, k);
  auto coords = [&](double s) { return change_chart(*alpha.target, alpha.at(s, k), p.chart).coords; };
  Vec v;
  if (t - h >= a && t + h <= b) {
    v = (coords(t + h) - coords(t - h)) / (2.0 * h);
  } else if (t + 2.0 * h <= b) {
    v = (-3.0 * p.coords + 4.0 * coords(t + h) - coords(t + 2.0 * h)) / (2.0 * h);
  } else {
    v = (3.0 * p.coords - 4.0 * coords(t - h) + coords(t - 2.0 * h)) / (2.0 * h);
  }
  return Tangent{std::move(p), std::move(v)};
}

inline Tangent path_velocity(const PathT& alpha, double t) {
  t = std::clamp(t, 0.0, 1.0);
  return path_velocity_on_piece(alpha, t, alpha.piece(t));
}

// ---------------------------------------------------------------------------
// Catalogue: interval, circle, disk, sphere

namespace detail {

inline double mollifier(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

/// Smooth step: 1 for x <= lo, 0 for x >= hi, built from exp(-1/s).
inline double smooth_step_down(double x, double lo, double hi) {
  const double s = (x - lo) / (hi - lo);
  const double a = mollifier(1.0 - s);
  const double b = mollifier(s);
  return a / (a + b);
}

}  // namespace detail

inline ManifoldPtr interval() {
  static const ManifoldPtr m = [] {
    auto out = std::make_shared<Manifold>();
    out->name = "interval";
    out->dim = 1;
    out->charts.push_back(Chart{0, 1, [](const Vec& c) { return std::min(c[0], 1.0 - c[0]); }, true});
    out->transition = [](int, int, const Vec& c) { return c; };
    out->transition_jacobian = [](int, int, const Vec&) { return Mat::Identity(1, 1); };
    out->sample_dim = 1;
    out->from_unit_cube = [](std::span<const double> u) -> std::optional<Point> {
      return Point{0, Vec::Constant(1, u[0])};
    };
    out->chart_partition = {[](const Point&) { return 1.0; }};
    return out;
  }();
  return m;
}

// Circle: chart 0 is the angle in (-pi, pi), chart 1 the angle in (0, 2 pi).
inline ManifoldPtr circle() {
  static const ManifoldPtr m = [] {
    static constexpr double pi = std::numbers::pi;
    auto out = std::make_shared<Manifold>();
    out->name = "circle";
    out->dim = 1;
    out->charts.push_back(Chart{0, 1, [](const Vec& c) { return pi - std::abs(c[0]); }, false});
    out->charts.push_back(Chart{1, 1, [](const Vec& c) { return pi - std::abs(c[0] - pi); }, false});
    out->transition = [](int from, int to, const Vec& c) {
      if (from == to) return c;
      double th = c[0];
      if (from == 0 && to == 1 && th < 0.0) th += 2.0 * pi;
      if (from == 1 && to == 0 && th > pi) th -= 2.0 * pi;
      return Vec(Vec::Constant(1, th));
    };
    out->transition_jacobian = [](int, int, const Vec&) { return Mat::Identity(1, 1); };
    out->sample_dim = 1;
    out->from_unit_cube = [](std::span<const double> u) -> std::optional<Point> {
      const double th = 2.0 * pi * u[0] - pi;
      if (std::abs(th) >= pi) return Point{1, Vec::Constant(1, pi)};
      return Point{0, Vec::Constant(1, th)};
    };
    // Bumps in |angle| away from the excluded point of each chart.
    auto bump0 = [](const Point& p) {
      double th = p.coords[0];
      if (p.chart == 1 && th > pi) th -= 2.0 * pi;
      return detail::smooth_step_down(std::abs(th), 0.3, pi - 0.3);
    };
    out->chart_partition = {bump0, [bump0](const Point& p) { return 1.0 - bump0(p); }};
    return out;
  }();
  return m;
}

/// Closed unit disk with one chart.
inline ManifoldPtr disk() {
  static const ManifoldPtr m = [] {
    auto out = std::make_shared<Manifold>();
    out->name = "disk";
    out->dim = 2;
    out->charts.push_back(Chart{0, 2, [](const Vec& c) { return 1.0 - c.norm(); }, true});
    out->transition = [](int, int, const Vec& c) { return c; };
    out->transition_jacobian = [](int, int, const Vec&) { return Mat::Identity(2, 2); };
    out->sample_dim = 2;
    out->from_unit_cube = [](std::span<const double> u) -> std::optional<Point> {
      Vec c(2);
      c << 2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0;
      if (c.norm() > 1.0) return std::nullopt;
      return Point{0, c};
    };
    out->chart_partition = {[](const Point&) { return 1.0; }};
    return out;
  }();
  return m;
}

// Sphere: chart 0 is stereographic projection from the south pole (north
// chart, z = (x + i y) / (1 + z3)), chart 1 from the north pole (south chart,
// w = (x - i y) / (1 - z3)). On the overlap w = 1/z. Each chart is the disk
// |coordinate| < kSphereChartRadius.
inline constexpr double kSphereChartRadius = 3.0;
inline constexpr int kNorth = 0;
inline constexpr int kSouth = 1;

inline cplx as_complex(const Vec& c) { return {c[0], c[1]}; }
inline Vec as_coords(cplx z) {
  Vec c(2);
  c << z.real(), z.imag();
  return c;
}

/// Real 2x2 matrix of multiplication by c.
inline Mat complex_mult_matrix(cplx c) {
  Mat m(2, 2);
  m << c.real(), -c.imag(), c.imag(), c.real();
  return m;
}

inline Eigen::Vector3d sphere_embed(const Point& p) {
  const cplx u = as_complex(p.coords);
  const double r2 = std::norm(u);
  const double s = 1.0 + r2;
  if (p.chart == kNorth) return {2.0 * u.real() / s, 2.0 * u.imag() / s, (1.0 - r2) / s};
  return {2.0 * u.real() / s, -2.0 * u.imag() / s, (r2 - 1.0) / s};
}

inline ManifoldPtr sphere();

inline Point sphere_point(const Eigen::Vector3d& x) {
  const Eigen::Vector3d n = x.normalized();
  if (n.z() >= 0.0) {
    return to_preferred_chart(*sphere(), Point{kNorth, as_coords(cplx(n.x(), n.y()) / (1.0 + n.z()))});
  }
  return to_preferred_chart(*sphere(), Point{kSouth, as_coords(cplx(n.x(), -n.y()) / (1.0 - n.z()))});
}

/// Point with polar angle theta (from the north pole) and azimuth phi.
inline Point sphere_point_polar(double theta, double phi) {
  return sphere_point({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
}

inline ManifoldPtr sphere() {
  static const ManifoldPtr m = [] {
    auto out = std::make_shared<Manifold>();
    out->name = "sphere";
    out->dim = 2;
    for (int id : {kNorth, kSouth})
      out->charts.push_back(Chart{id, 2, [](const Vec& c) { return kSphereChartRadius - c.norm(); }, false});
    out->transition = [](int from, int to, const Vec& c) {
      if (from == to) return c;
      const cplx z = as_complex(c);
      if (z == cplx(0.0, 0.0)) return Vec(Vec::Constant(2, std::numeric_limits<double>::infinity()));
      return as_coords(1.0 / z);
    };
    out->transition_jacobian = [](int from, int to, const Vec& c) {
      if (from == to) return Mat(Mat::Identity(2, 2));
      const cplx z = as_complex(c);
      return complex_mult_matrix(-1.0 / (z * z));
    };
    out->sample_dim = 2;
    out->from_unit_cube = [](std::span<const double> u) -> std::optional<Point> {
      const double cos_t = 1.0 - 2.0 * u[0];
      const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
      const double phi = 2.0 * std::numbers::pi * u[1];
      return sphere_point({sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t});
    };
    // Polar caps glued across the equator band; the north bump vanishes for
    // polar angle >= 0.6 pi, the south bump for polar angle <= 0.4 pi.
    auto north_bump = [](const Point& p) {
      const double theta = std::acos(std::clamp(sphere_embed(p).z(), -1.0, 1.0));
      return detail::smooth_step_down(theta, 0.4 * std::numbers::pi, 0.6 * std::numbers::pi);
    };
    out->chart_partition = {north_bump, [north_bump](const Point& p) { return 1.0 - north_bump(p); }};
    return out;
  }();
  return m;
}

/// Polar angle of a sphere point, measured from the north pole.
inline double sphere_polar_angle(const Point& p) {
  return std::acos(std::clamp(sphere_embed(p).z(), -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Catalogue maps

inline SmoothMap identity_map(ManifoldPtr m) {
  const int dim = m->dim;
  return SmoothMap{m, m, [](const Point& p) { return p; },
                   [dim](const Point&) { return Mat(Mat::Identity(dim, dim)); }};
}

inline SmoothMap constant_map(ManifoldPtr source, ManifoldPtr target, Point value) {
  const int sd = source->dim;
  const int td = target->dim;
  return SmoothMap{source, target, [value](const Point&) { return value; },
                   [sd, td](const Point&) { return Mat(Mat::Zero(td, sd)); }};
}

/// Sphere map from a Moebius transformation in homogeneous coordinates:
/// [z1 : z2] with z = z1 / z2 in the north chart and w = z2 / z1 in the south.
/// Unitary matrices give rotations.
inline SmoothMap moebius_map(const Eigen::Matrix2cd& matrix) {
  // Chart-coordinate form of the map from source chart s to target chart t.
  auto chart_matrix = [matrix](int s, int t) {
    Eigen::Matrix2cd swap;
    swap << 0, 1, 1, 0;
    Eigen::Matrix2cd m = matrix;
    if (s == kSouth) m = m * swap;
    if (t == kSouth) m = swap * m;
    return m;
  };
  auto target_chart = [matrix](const Point& p) {
    const cplx u = as_complex(p.coords);
    Eigen::Vector2cd h = p.chart == kNorth ? Eigen::Vector2cd(u, 1.0) : Eigen::Vector2cd(1.0, u);
    Eigen::Vector2cd r = matrix * h;
    return std::abs(r[0]) <= std::abs(r[1]) ? kNorth : kSouth;
  };
  auto eval = [chart_matrix, target_chart](const Point& p) {
    const int t = target_chart(p);
    const Eigen::Matrix2cd m = chart_matrix(p.chart, t);
    const cplx u = as_complex(p.coords);
    return Point{t, as_coords((m(0, 0) * u + m(0, 1)) / (m(1, 0) * u + m(1, 1)))};
  };
  auto jac = [chart_matrix, target_chart](const Point& p) {
    const int t = target_chart(p);
    const Eigen::Matrix2cd m = chart_matrix(p.chart, t);
    const cplx u = as_complex(p.coords);
    const cplx den = m(1, 0) * u + m(1, 1);
    return complex_mult_matrix(m.determinant() / (den * den));
  };
  return SmoothMap{sphere(), sphere(), eval, jac};
}

/// Rotation of the sphere about a unit axis by `angle`, as the Moebius map of
/// exp(-i angle (axis . sigma) / 2).
inline Eigen::Matrix2cd rotation_su2(const Eigen::Vector3d& axis, double angle) {
  // The Moebius action on z = (x + i y) / (1 + z3) turns a matrix built on
  // (n1, n2, n3) about (n1, -n2, -n3); flip to rotate about n itself.
  const Eigen::Vector3d a = axis.normalized();
  const Eigen::Vector3d n(a.x(), -a.y(), -a.z());
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd u;
  u << c - i * s * n.z(), -i * s * n.x() - s * n.y(), -i * s * n.x() + s * n.y(), c + i * s * n.z();
  return u;
}

inline SmoothMap sphere_rotation(const Eigen::Vector3d& axis, double angle) {
  return moebius_map(rotation_su2(axis, angle));
}

/// Degree-k self-map of the sphere. For k >= 0 it is z -> z^k in the north
/// chart (w -> w^k in the south); for k < 0 it is z -> conj(z)^|k|. On the
/// equator both read z -> z^k, and every such map sends each hemisphere into
/// itself.
inline SmoothMap degree_map(int k) {
  if (k == 0) return constant_map(sphere(), sphere(), Point{kNorth, as_coords(1.0)});
  const int n = std::abs(k);
  const bool anti = k < 0;
  // Homogeneous image [z1^n : z2^n] (conjugated for k < 0); the same chart is
  // kept when |u| <= 1 in the source chart, since |u^n| <= 1 there.
  auto image_chart = [](const Point& p) {
    return std::abs(as_complex(p.coords)) <= 1.0 ? p.chart : 1 - p.chart;
  };
  auto eval = [n, anti, image_chart](const Point& p) {
    cplx u = as_complex(p.coords);
    if (anti) u = std::conj(u);
    const int t = image_chart(p);
    cplx v = std::pow(u, n);
    if (t != p.chart) v = 1.0 / v;
    return Point{t, as_coords(v)};
  };
  auto jac = [n, anti, image_chart](const Point& p) {
    cplx u = as_complex(p.coords);
    if (anti) u = std::conj(u);
    const int t = image_chart(p);
    const int e = t == p.chart ? n : -n;
    Mat j = complex_mult_matrix(static_cast<double>(e) * std::pow(u, e - 1));
    if (anti) {
      Mat conj_m = Mat::Identity(2, 2);
      conj_m(1, 1) = -1.0;
      j = j * conj_m;
    }
    return j;
  };
  return SmoothMap{sphere(), sphere(), eval, jac};
}

/// Linear self-map of the disk, x -> a x (the caller keeps ||a|| <= 1).
inline SmoothMap disk_linear_map(const Eigen::Matrix2d& a) {
  return SmoothMap{disk(), disk(),
                   [a](const Point& p) { return Point{0, Vec(a * p.coords)}; },
                   [a](const Point&) { return Mat(a); }};
}

/// Circle point at the given angle, in its preferred chart.
inline Point circle_point(double angle) {
  const double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (std::abs(a) >= std::numbers::pi) return Point{1, Vec::Constant(1, std::numbers::pi)};
  return to_preferred_chart(*circle(), Point{0, Vec::Constant(1, a)});
}

/// theta -> k theta on the circle.
inline SmoothMap circle_power_map(int k) {
  auto eval = [k](const Point& p) { return circle_point(static_cast<double>(k) * p.coords[0]); };
  auto jac = [k](const Point&) { return Mat(Mat::Constant(1, 1, static_cast<double>(k))); };
  return SmoothMap{circle(), circle(), eval, jac};
}

}  // namespace pullback
