#pragma once

// Horizontal lifting of base paths and parallel transport. In trivialization
// i the lift solves g'(t) = -A_i(alpha(t))(alpha'(t)) g(t); it is integrated
// with classical fourth-order Runge-Kutta on a fixed grid, projecting back
// onto the group after every step. The grid always contains the breakpoints
// of the path, so piecewise-smooth paths are integrated piece by piece.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pullback/bundle.hpp"
#include "pullback/connection.hpp"
#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/group.hpp"

namespace pullback {

inline constexpr int kDefaultSteps = 1000;
inline constexpr double kCoverSwitchMargin = 0.05;

struct LiftNode {
  double t = 0.0;
  TotalPoint point;
};

struct LiftedPath {
  const Connection* connection = nullptr;
  PathT base_path;
  TotalPoint start;
  std::vector<LiftNode> nodes;
  int steps = 0;
};

// ---------------------------------------------------------------------------
// Path constructions

/// (alpha * beta): beta on [0, 1/2] at double speed, then alpha.
inline PathT compose_paths(const PathT& alpha, const PathT& beta) {
  if (point_distance(*alpha.target, beta(1.0), alpha(0.0)) > 1e-9)
    throw Error(ErrorKind::EndpointMismatch, "compose_paths: beta(1) != alpha(0)");
  PathT out;
  out.target = alpha.target;
  auto ae = alpha.eval;
  auto be = beta.eval;
  out.eval = [ae, be](double t) { return t <= 0.5 ? be(2.0 * t) : ae(2.0 * t - 1.0); };
  for (std::size_t k = 0; k + 1 < beta.breaks.size(); ++k) out.breaks.push_back(0.5 * beta.breaks[k]);
  for (std::size_t k = 0; k + 1 < alpha.breaks.size(); ++k) out.breaks.push_back(0.5 + 0.5 * alpha.breaks[k]);
  out.breaks.push_back(1.0);
  out.charts = beta.charts;
  out.charts.insert(out.charts.end(), alpha.charts.begin(), alpha.charts.end());
  return out;
}

/// t -> alpha(1 - t).
inline PathT reverse_path(const PathT& alpha) {
  PathT out;
  out.target = alpha.target;
  auto ae = alpha.eval;
  out.eval = [ae](double t) { return ae(1.0 - t); };
  for (auto it = alpha.breaks.rbegin(); it != alpha.breaks.rend(); ++it) out.breaks.push_back(1.0 - *it);
  out.charts.assign(alpha.charts.rbegin(), alpha.charts.rend());
  return out;
}

/// t -> alpha(s(t)) for a monotone reparametrisation s of [0, 1].
inline PathT reparametrize(const PathT& alpha, std::function<double(double)> s) {
  auto ae = alpha.eval;
  return make_path(alpha.target, [ae, s](double t) { return ae(s(t)); });
}

inline PathT constant_path(ManifoldPtr m, const Point& x) {
  return make_path(std::move(m), [x](double) { return x; });
}

/// t -> R(t angle) x0, a circular arc about `axis` on the sphere.
inline PathT sphere_arc(const Point& x0, const Eigen::Vector3d& axis, double angle) {
  return make_path(sphere(), [x0, axis, angle](double t) { return sphere_rotation(axis, t * angle)(x0); });
}

/// Arc of the equator from azimuth phi0 through `sweep` radians.
inline PathT equator_arc(double phi0, double sweep) {
  return make_path(sphere(), [phi0, sweep](double t) {
    return Point{kNorth, as_coords(std::polar(1.0, phi0 + sweep * t))};
  });
}

inline PathT disk_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return make_path(disk(), [a, b](double t) { return Point{0, Vec(a + t * (b - a))}; });
}

// ---------------------------------------------------------------------------
// Lifting

namespace detail {

// Uniform grid of `steps` intervals merged with the interior breakpoints.
inline std::vector<double> lift_grid(const PathT& alpha, int steps) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + alpha.breaks.size());
  for (int k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) / steps);
  for (std::size_t k = 1; k + 1 < alpha.breaks.size(); ++k) grid.push_back(alpha.breaks[k]);
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (double t : grid)
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  out.back() = 1.0;
  return out;
}

}  // namespace detail

inline LiftedPath horizontal_lift(const Connection& c, const PathT& alpha, const TotalPoint& p,
                                  int steps = kDefaultSteps) {
  const PrincipalBundle& b = *c.bundle;
  if (steps < 1) throw Error(ErrorKind::InvalidConfig, "horizontal_lift: steps must be >= 1");
  if (point_distance(*b.base, p.base, alpha(0.0)) > 1e-9)
    throw Error(ErrorKind::EndpointMismatch, "horizontal_lift: start point is not over alpha(0)");
  if (!b.contains(p.cover, alpha(0.0)))
    throw Error(ErrorKind::OutOfCover, "horizontal_lift: start cover set does not contain alpha(0)");

  LiftedPath lift{&c, alpha, p, {}, steps};
  lift.nodes.push_back({0.0, p});

  int cover = p.cover;
  CMat g = p.g.entries;
  const auto grid = detail::lift_grid(alpha, steps);
  // The step end and its right-hand side are reused by the next step when it
  // runs on the same piece and cover set.
  std::size_t carried_piece = alpha.breaks.size();
  int carried_cover = -1;
  Point carried_x;
  CMat carried_f;
  for (std::size_t s = 0; s + 1 < grid.size(); ++s) {
    const double t0 = grid[s];
    const double t1 = grid[s + 1];
    const double h = t1 - t0;
    const std::size_t piece = alpha.piece(0.5 * (t0 + t1));
    const bool reuse = piece == carried_piece;

    const Point x0 = reuse ? carried_x : alpha.at(t0, piece);
    Point x1 = alpha.at(t1, piece);
    if (b.margin(cover, x0) < kCoverSwitchMargin || b.margin(cover, x1) < kCoverSwitchMargin) {
      const int target = best_cover(b, x0);
      if (target < 0) throw Error(ErrorKind::NoCoveringSet, b.name + ": path leaves every cover set");
      if (target != cover) {
        g = renormalize({b.group, b.transition(target, cover, x0).entries * g}).entries;
        cover = target;
        lift.nodes.push_back({t0, TotalPoint{cover, x0, {b.group, g}}});
      }
      if (!b.contains(cover, x1)) throw Error(ErrorKind::NoCoveringSet, b.name + ": path leaves every cover set");
    }

    auto rhs = [&](double t) {
      const Tangent v = path_velocity_on_piece(alpha, t, piece);
      return CMat(-evaluate_form(c, cover, v.base, v).entries);
    };
    const CMat f0 = reuse && cover == carried_cover ? carried_f : rhs(t0);
    const CMat fm = rhs(t0 + 0.5 * h);
    const CMat f1 = rhs(t1);
    const CMat k1 = f0 * g;
    const CMat k2 = fm * (g + 0.5 * h * k1);
    const CMat k3 = fm * (g + 0.5 * h * k2);
    const CMat k4 = f1 * (g + h * k3);
    g = renormalize({b.group, g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)}).entries;
    lift.nodes.push_back({t1, TotalPoint{cover, x1, {b.group, g}}});
    carried_piece = piece;
    carried_cover = cover;
    carried_x = std::move(x1);
    carried_f = f1;
  }
  return lift;
}

inline TotalPoint parallel_transport(const Connection& c, const PathT& alpha, const TotalPoint& p,
                                     int steps = kDefaultSteps) {
  return horizontal_lift(c, alpha, p, steps).nodes.back().point;
}

/// h with transport(p) = p h, read in the trivialization of p.
inline GroupElement holonomy(const Connection& c, const PathT& loop, const TotalPoint& p, int steps = kDefaultSteps) {
  const PrincipalBundle& b = *c.bundle;
  if (point_distance(*b.base, loop(0.0), loop(1.0)) > 1e-9)
    throw Error(ErrorKind::NotALoop, "holonomy: loop(0) != loop(1)");
  const TotalPoint end = parallel_transport(c, loop, p, steps);
  const TotalPoint back{end.cover, p.base, end.g};
  const TotalPoint same = change_trivialization(b, back, p.cover);
  return renormalize({b.group, p.g.entries.adjoint() * same.g.entries});
}

}  // namespace pullback
