#pragma once

// Smooth homotopies H: I x M -> N between smooth maps, with time reversal,
// composition of steady homotopies and the steadifying reparametrisation
// t -> phi(t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pullback/error.hpp"
#include "pullback/geometry.hpp"

namespace pullback {

struct Homotopy {
  ManifoldPtr source;
  ManifoldPtr target;
  std::function<Point(double, const Point&)> eval;
  SmoothMap f_end;
  SmoothMap g_end;
  /// H(t, x) = f(x) for t <= eps and g(x) for t >= 1 - eps; 0 if not steady.
  double steady_margin = 0.0;

  Point operator()(double t, const Point& x) const { return eval(t, x); }
};

inline constexpr double kEndpointTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Smoothing function

namespace detail {

inline constexpr double kThird = 1.0 / 3.0;
inline constexpr double kTwoThirds = 2.0 / 3.0;
inline constexpr int kPhiIntervals = 1 << 14;

inline double phi0(double s) {
  if (s <= kThird || s >= kTwoThirds) return 0.0;
  return std::exp(1.0 / ((s - kThird) * (s - kTwoThirds)));
}

// Cumulative composite-Simpson integrals of phi0 over [1/3, 1/3 + 2 m h].
struct PhiTable {
  double h = 0.0;
  std::vector<double> cumulative;
  double total = 0.0;
};

inline const PhiTable& phi_table() {
  static const PhiTable table = [] {
    PhiTable t;
    t.h = (kTwoThirds - kThird) / kPhiIntervals;
    t.cumulative.assign(kPhiIntervals / 2 + 1, 0.0);
    for (int m = 0; m < kPhiIntervals / 2; ++m) {
      const double s0 = kThird + 2.0 * m * t.h;
      const double pair = t.h / 3.0 * (phi0(s0) + 4.0 * phi0(s0 + t.h) + phi0(s0 + 2.0 * t.h));
      t.cumulative[static_cast<std::size_t>(m) + 1] = t.cumulative[static_cast<std::size_t>(m)] + pair;
    }
    t.total = t.cumulative.back();
    return t;
  }();
  return table;
}

}  // namespace detail

/// phi(t) = int_0^t phi0 / int_0^1 phi0, where
/// phi0(s) = exp(1 / ((s - 1/3)(s - 2/3))) on (1/3, 2/3) and 0 elsewhere.
/// Exactly 0 on [0, 1/3] and 1 on [2/3, 1].
inline double smoothing_phi(double t) {
  if (t <= detail::kThird) return 0.0;
  if (t >= detail::kTwoThirds) return 1.0;
  const auto& table = detail::phi_table();
  const double x = (t - detail::kThird) / (2.0 * table.h);
  const int last = detail::kPhiIntervals / 2 - 1;
  const int m = std::clamp(static_cast<int>(std::floor(x)), 0, last);
  const double s0 = detail::kThird + 2.0 * m * table.h;
  const double partial =
      (t - s0) / 6.0 * (detail::phi0(s0) + 4.0 * detail::phi0(0.5 * (s0 + t)) + detail::phi0(t));
  return std::clamp((table.cumulative[static_cast<std::size_t>(m)] + partial) / table.total, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Homotopies

/// g o f.
inline SmoothMap compose_maps(const SmoothMap& g, const SmoothMap& f) {
  SmoothMap out{f.source, g.target, [g, f](const Point& x) { return g(f(x)); }, {}};
  if (f.jacobian && g.jacobian) {
    out.jacobian = [g, f](const Point& x) { return Mat(g.jacobian(f(x)) * f.jacobian(x)); };
  }
  return out;
}

/// Largest point distance between two maps over a Halton sample of the source.
inline double map_distance(const SmoothMap& a, const SmoothMap& b, std::size_t samples = 64) {
  double worst = 0.0;
  for (const auto& x : sample_points(*a.source, samples))
    worst = std::max(worst, point_distance(*a.target, a(x), b(x)));
  return worst;
}

/// H_f(t, x) = f(x).
inline Homotopy constant_homotopy(const SmoothMap& f) {
  return Homotopy{f.source, f.target, [f](double, const Point& x) { return f(x); }, f, f, 0.5};
}

/// H^{-1}(t, x) = H(1 - t, x).
inline Homotopy reverse(const Homotopy& h) {
  auto eval = h.eval;
  return Homotopy{h.source, h.target, [eval](double t, const Point& x) { return eval(1.0 - t, x); },
                  h.g_end, h.f_end, h.steady_margin};
}

/// (K o H)(t, x) = H(2t, x) on [0, 1/2] and K(2t - 1, x) on [1/2, 1]. Both
/// homotopies must be steady so the glued map stays smooth at t = 1/2.
inline Homotopy compose(const Homotopy& k, const Homotopy& h) {
  if (!(h.steady_margin > 0.0) || !(k.steady_margin > 0.0))
    throw Error(ErrorKind::NotSteady, "compose: steadify both homotopies first");
  if (map_distance(h.g_end, k.f_end) > kEndpointTolerance)
    throw Error(ErrorKind::EndpointMismatch, "compose: H ends where K does not start");
  auto he = h.eval;
  auto ke = k.eval;
  auto eval = [he, ke](double t, const Point& x) { return t <= 0.5 ? he(2.0 * t, x) : ke(2.0 * t - 1.0, x); };
  return Homotopy{h.source, h.target, eval, h.f_end, k.g_end,
                  0.5 * std::min(h.steady_margin, k.steady_margin)};
}

/// H'(t, x) = H(phi(t), x); steady with margin 1/3.
inline Homotopy steadify(const Homotopy& h) {
  auto eval = h.eval;
  return Homotopy{h.source, h.target, [eval](double t, const Point& x) { return eval(smoothing_phi(t), x); },
                  h.f_end, h.g_end, detail::kThird};
}

/// alpha(t) = H(t, x), with a chart schedule from 256 samples.
inline PathT track(const Homotopy& h, const Point& x) {
  auto eval = h.eval;
  return make_path(h.target, [eval, x](double t) { return eval(t, x); });
}

// ---------------------------------------------------------------------------
// Catalogue homotopies

/// H(t, x) = R(t angle) f(x) for the sphere rotation R about `axis`.
inline Homotopy rotation_homotopy(const SmoothMap& f, const Eigen::Vector3d& axis, double angle) {
  auto eval = [f, axis, angle](double t, const Point& x) { return sphere_rotation(axis, t * angle)(f(x)); };
  return Homotopy{f.source, sphere(), eval, f, compose_maps(sphere_rotation(axis, angle), f), 0.0};
}

/// H(t, x) = A(t) f(x) on the disk, with A(0) = I and ||A(t)|| <= 1.
inline Homotopy disk_linear_homotopy(const SmoothMap& f, std::function<Eigen::Matrix2d(double)> a) {
  auto eval = [f, a](double t, const Point& x) { return Point{0, Vec(a(t) * f(x).coords)}; };
  return Homotopy{f.source, disk(), eval, f, compose_maps(disk_linear_map(a(1.0)), f), 0.0};
}

inline Eigen::Matrix2d planar_rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Straight-line contraction of the disk onto its centre: from the identity
/// to the constant map at the origin.
inline Homotopy disk_contraction() {
  Homotopy h = disk_linear_homotopy(identity_map(disk()),
                                    [](double t) { return Eigen::Matrix2d((1.0 - t) * Eigen::Matrix2d::Identity()); });
  h.g_end = constant_map(disk(), disk(), Point{0, Vec::Zero(2)});
  return h;
}

struct NamedHomotopy {
  std::string name;
  Homotopy homotopy;
};

/// A chain of steady homotopies on the base of a catalogue bundle, each
/// starting where the previous one ends.
inline std::vector<NamedHomotopy> homotopy_chain(const ManifoldPtr& base) {
  std::vector<NamedHomotopy> chain;
  auto last = [&chain] { return chain.back().homotopy.g_end; };
  if (base->name == "sphere") {
    chain.push_back({"rot-z", steadify(rotation_homotopy(identity_map(sphere()), Eigen::Vector3d::UnitZ(), 0.9))});
    chain.push_back({"rot-x", steadify(rotation_homotopy(last(), Eigen::Vector3d::UnitX(), 0.7))});
    chain.push_back({"rot-xyz", steadify(rotation_homotopy(last(), Eigen::Vector3d(1.0, 1.0, 1.0), -0.6))});
  } else if (base->name == "disk") {
    chain.push_back({"rotate", steadify(disk_linear_homotopy(identity_map(disk()),
                                                             [](double t) { return planar_rotation(0.8 * t); }))});
    chain.push_back({"shrink", steadify(disk_linear_homotopy(last(), [](double t) {
                       return Eigen::Matrix2d((1.0 - 0.4 * t) * Eigen::Matrix2d::Identity());
                     }))});
    chain.push_back({"collapse", steadify(disk_linear_homotopy(last(), [](double t) {
                       return Eigen::Matrix2d((1.0 - t) * planar_rotation(-0.5 * t));
                     }))});
  }
  return chain;
}

}  // namespace pullback
