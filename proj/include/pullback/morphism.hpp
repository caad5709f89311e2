#pragma once

// The bundle morphism lambda_H: f*xi -> g*xi induced by a steady homotopy H
// from f to g and a connection on xi. A point (x, p) of f*xi is sent to
// (x, transport of p along t -> H(t, x)). Morphisms are evaluated per point.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pullback/bundle.hpp"
#include "pullback/connection.hpp"
#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/group.hpp"
#include "pullback/homotopy.hpp"
#include "pullback/random.hpp"
#include "pullback/transport.hpp"

namespace pullback {

struct BundleMorphism {
  BundlePtr source;
  BundlePtr target;
  std::function<TotalPoint(const TotalPoint&)> apply;
  // Provenance.
  std::shared_ptr<const Homotopy> homotopy;
  std::shared_ptr<const Connection> connection;
  int steps = kDefaultSteps;
};

struct FunctorReport {
  double max_deviation = 0.0;
  int samples = 0;
  bool pass = true;
};

namespace detail {

// Target cover index for base x and a point of xi in trivialization i: the
// pair (chart of x, i) when it contains x, else the pair in x's chart with the
// greatest margin, else any set with the greatest margin.
inline int pullback_index_for(const PrincipalBundle& pb, const Point& x, int xi_index) {
  const auto& pairs = pb.pullback->pairs;
  int best_same_chart = -1;
  double best_same_margin = 0.0;
  for (int k = 0; k < pb.size(); ++k) {
    const auto [a, i] = pairs[static_cast<std::size_t>(k)];
    if (a != x.chart) continue;
    const double m = pb.margin(k, x);
    if (!(m > 0.0)) continue;
    if (i == xi_index) return k;
    if (m > best_same_margin) {
      best_same_margin = m;
      best_same_chart = k;
    }
  }
  if (best_same_chart >= 0) return best_same_chart;
  const int any = best_cover(pb, x);
  if (any < 0) throw Error(ErrorKind::OutOfCover, pb.name + ": base point lies in no cover set");
  return any;
}

}  // namespace detail

inline TotalPoint apply_morphism(const BundleMorphism& m, const TotalPoint& p) {
  if (!m.source->contains(p.cover, p.base))
    throw Error(ErrorKind::OutOfCover, "apply_morphism: point is not in the source bundle");
  return m.apply(p);
}

inline BundleMorphism induced_morphism(const Homotopy& h, const BundlePtr& xi, const Connection& c,
                                       int steps = kDefaultSteps) {
  if (!(h.steady_margin > 0.0)) throw Error(ErrorKind::NotSteady, "induced_morphism: homotopy is not steady");
  if (h.target->name != xi->base->name)
    throw Error(ErrorKind::InvalidConfig, "induced_morphism: homotopy target is not the bundle base");

  BundleMorphism m;
  m.source = pull_back(xi, h.f_end);
  m.target = pull_back(xi, h.g_end);
  m.homotopy = std::make_shared<const Homotopy>(h);
  m.connection = std::make_shared<const Connection>(c);
  m.steps = steps;

  m.apply = [src = m.source, dst = m.target, hom = m.homotopy, conn = m.connection, xi, steps](const TotalPoint& p) {
    const auto [chart, xi_index] = src->pullback->pairs[static_cast<std::size_t>(p.cover)];
    const PathT alpha = track(*hom, p.base);
    // pi(p) = f(x) = alpha(0): the pull-back point sits in xi over alpha(0).
    const TotalPoint start{xi_index, alpha(0.0), p.g};
    const TotalPoint end = parallel_transport(*conn, alpha, start, steps);
    const int k = detail::pullback_index_for(*dst, p.base, end.cover);
    const auto [target_chart, target_xi] = dst->pullback->pairs[static_cast<std::size_t>(k)];
    const TotalPoint moved = change_trivialization(*xi, end, target_xi);
    return TotalPoint{k, change_chart(*dst->base, p.base, target_chart), moved.g};
  };
  return m;
}

/// Random point of a pull-back bundle: seeded base point, a cover set holding
/// it and a random group entry.
inline TotalPoint random_total_point(const PrincipalBundle& b, SplitMix64& rng) {
  for (;;) {
    const Point x = random_point(*b.base, rng);
    const auto sets = covering_sets(b, x);
    const GroupElement g = random_group_element(b.group, rng);
    if (sets.empty()) continue;
    const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(sets.size()));
    const int k = sets[std::min(pick, sets.size() - 1)];
    return TotalPoint{k, change_chart(*b.base, x, b.pullback ? b.pullback->pairs[static_cast<std::size_t>(k)].first : x.chart), g};
  }
}

/// max ||lambda_{K o H}(p) - lambda_K(lambda_H(p))|| over sampled p.
inline FunctorReport verify_functoriality(const Homotopy& h, const Homotopy& k, const BundlePtr& xi,
                                          const Connection& c, int samples, double tol,
                                          int steps = kDefaultSteps, std::uint64_t seed = 0) {
  const Homotopy kh = compose(k, h);
  const BundleMorphism lh = induced_morphism(h, xi, c, steps);
  const BundleMorphism lk = induced_morphism(k, xi, c, steps);
  const BundleMorphism lkh = induced_morphism(kh, xi, c, steps);
  SplitMix64 rng(seed);
  FunctorReport report;
  for (int s = 0; s < samples; ++s) {
    const TotalPoint p = random_total_point(*lh.source, rng);
    const TotalPoint direct = apply_morphism(lkh, p);
    const TotalPoint chained = apply_morphism(lk, apply_morphism(lh, p));
    report.max_deviation = std::max(report.max_deviation, total_distance(*lkh.target, direct, chained));
  }
  report.samples = samples;
  report.pass = report.max_deviation <= tol;
  return report;
}

/// max ||lambda_{H^{-1}}(lambda_H(p)) - p|| over sampled p.
inline FunctorReport verify_isomorphism(const Homotopy& h, const BundlePtr& xi, const Connection& c, int samples,
                                        double tol, int steps = kDefaultSteps, std::uint64_t seed = 0) {
  const BundleMorphism forward = induced_morphism(h, xi, c, steps);
  const BundleMorphism backward = induced_morphism(reverse(h), xi, c, steps);
  SplitMix64 rng(seed);
  FunctorReport report;
  for (int s = 0; s < samples; ++s) {
    const TotalPoint p = random_total_point(*forward.source, rng);
    const TotalPoint round_trip = apply_morphism(backward, apply_morphism(forward, p));
    report.max_deviation = std::max(report.max_deviation, total_distance(*forward.source, p, round_trip));
  }
  report.samples = samples;
  report.pass = report.max_deviation <= tol;
  return report;
}

}  // namespace pullback
