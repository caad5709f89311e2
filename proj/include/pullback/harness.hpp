#pragma once

// Experiment harness: configuration, the experiment catalogue, the
// contractible-base trivialization, first Chern numbers of U(1) bundles over
// the sphere, and CSV / JSON result writers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pullback/bundle.hpp"
#include "pullback/connection.hpp"
#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/group.hpp"
#include "pullback/homotopy.hpp"
#include "pullback/morphism.hpp"
#include "pullback/random.hpp"
#include "pullback/transport.hpp"

namespace pullback {

struct ExperimentConfig {
  std::string experiment;
  /// Empty selects the experiment's default bundle.
  std::string bundle;
  std::string connection = "partition";
  int steps = kDefaultSteps;
  int samples = 100;
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
};

struct Metric {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct ExperimentResult {
  std::string experiment;
  bool pass = true;
  std::vector<Metric> metrics;
  std::vector<std::string> artifacts;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"phi-table",   "transport-props",
                                              "functoriality", "isomorphism",
                                              "contractible-trivialization", "chern-classification"};
  return names;
}

// Pinned thresholds for the transport and morphism properties.
inline constexpr double kExactTolerance = 1e-9;
inline constexpr double kTransportTolerance = 1e-6;
inline constexpr int kChernSamples = 10000;

// ---------------------------------------------------------------------------
// Result assembly

namespace detail {

/// |value| <= tolerance.
inline void add_bound(ExperimentResult& r, std::string name, double value, double tolerance) {
  r.metrics.push_back({std::move(name), value, tolerance, std::abs(value) <= tolerance});
}

/// |value - expected| <= tolerance, reporting the value itself.
inline void add_match(ExperimentResult& r, std::string name, double value, double expected, double tolerance) {
  r.metrics.push_back({std::move(name), value, tolerance, std::abs(value - expected) <= tolerance});
}

inline void finish(ExperimentResult& r) {
  r.pass = std::all_of(r.metrics.begin(), r.metrics.end(), [](const Metric& m) { return m.pass; });
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Chern number

namespace detail {

// Lowest cover index holding the whole closed hemisphere (north or south).
inline int cap_index(const PrincipalBundle& b, bool north) {
  std::vector<Point> probe;
  for (int ring = 0; ring <= 8; ++ring) {
    const double theta = 0.5 * std::numbers::pi * ring / 8.0;
    for (int k = 0; k < 24; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / 24.0;
      probe.push_back(sphere_point_polar(north ? theta : std::numbers::pi - theta, phi));
    }
  }
  for (int i = 0; i < b.size(); ++i)
    if (std::all_of(probe.begin(), probe.end(), [&](const Point& x) { return b.contains(i, x); })) return i;
  return -1;
}

}  // namespace detail

/// First Chern number of a U(1) bundle over the sphere: the winding of the
/// transition from the cover set holding the northern hemisphere to the one
/// holding the southern hemisphere, summed over `samples` equator points.
inline int chern_number(const PrincipalBundle& b, int samples = kChernSamples) {
  if (b.group != GroupTag::U1 || b.base->name != "sphere")
    throw Error(ErrorKind::InvalidConfig, "chern_number: needs a U(1) bundle over the sphere");
  const int north = detail::cap_index(b, true);
  const int south = detail::cap_index(b, false);
  if (north < 0 || south < 0)
    throw Error(ErrorKind::InvalidConfig, "chern_number: no pair of cover sets meeting on the equator");
  auto g = [&](int k) {
    const Point z{kNorth, as_coords(std::polar(1.0, 2.0 * std::numbers::pi * k / samples))};
    return b.transition(north, south, z).entries(0, 0);
  };
  double total = 0.0;
  cplx prev = g(0);
  for (int k = 1; k <= samples; ++k) {
    const cplx next = g(k);
    const double step = std::arg(next / prev);
    if (std::abs(step) >= 0.5 * std::numbers::pi)
      throw Error(ErrorKind::Aliasing, "chern_number: phase step too large, increase samples");
    total += step;
    prev = next;
  }
  const double winding = total / (2.0 * std::numbers::pi);
  const double nearest = std::round(winding);
  if (std::abs(winding - nearest) > 0.01)
    throw Error(ErrorKind::NonInteger, "chern_number: winding " + detail::format_number(winding));
  return static_cast<int>(nearest);
}

// ---------------------------------------------------------------------------
// Contractible base

/// Trivializes a bundle over the disk through lambda_H for a contraction H
/// from the identity to a constant map. With Lambda_i(x) the target entry of
/// lambda_H(i, x, e), the trivialized cocycle Lambda_i g_ij Lambda_j^{-1}
/// must be the identity.
inline ExperimentResult trivialize_contractible(const BundlePtr& xi, const Homotopy& contraction,
                                                const Connection& c, int steps, int samples, double tol) {
  if (xi->base->name != "disk" || contraction.source->name != "disk" || contraction.target->name != "disk")
    throw Error(ErrorKind::NotContractibleSetup, xi->name + ": the base is not the disk");
  if (map_distance(contraction.f_end, identity_map(disk())) > kEndpointTolerance)
    throw Error(ErrorKind::NotContractibleSetup, "contraction does not start at the identity");
  const auto probe = sample_points(*disk(), 64);
  const Point m0 = contraction.g_end(probe.front());
  for (const auto& x : probe)
    if (point_distance(*disk(), contraction.g_end(x), m0) > kEndpointTolerance)
      throw Error(ErrorKind::NotContractibleSetup, "contraction does not end at a constant map");

  const BundleMorphism lambda = induced_morphism(contraction, xi, c, steps);
  const PrincipalBundle& src = *lambda.source;
  const PrincipalBundle& dst = *lambda.target;

  ExperimentResult r{"contractible-trivialization", true, {}, {}};

  // g*xi has constant transitions, so its set 0 trivializes it globally.
  double target_variation = 0.0;
  const auto dst_points = sample_points(*disk(), static_cast<std::size_t>(samples));
  for (int i = 0; i < dst.size(); ++i)
    for (int j = 0; j < dst.size(); ++j) {
      const GroupElement ref = dst.transition(i, j, dst_points.front());
      for (const auto& x : dst_points)
        target_variation = std::max(target_variation, distance(dst.transition(i, j, x), ref));
    }

  auto lambda_entry = [&](int i, const Point& x) {
    const TotalPoint image = apply_morphism(lambda, TotalPoint{i, x, identity_element(xi->group)});
    return change_trivialization(dst, image, 0).g.entries;
  };
  const std::size_t need = src.size() > 1 ? 2 : 1;
  const auto pts = sample_points(*disk(), static_cast<std::size_t>(samples),
                                 [&](const Point& x) { return covering_sets(src, x).size() >= need; });
  double deviation = 0.0;
  const int n = group_dim(xi->group);
  for (const auto& x : pts) {
    const auto idx = covering_sets(src, x);
    std::vector<CMat> entries;
    for (int i : idx) entries.push_back(lambda_entry(i, x));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) {
        const CMat g = src.transition(idx[a], idx[b], x).entries;
        const CMat trivialized = entries[a] * g * entries[b].adjoint();
        deviation = std::max(deviation, (trivialized - CMat::Identity(n, n)).norm());
      }
  }
  detail::add_bound(r, "trivialized_cocycle_deviation", deviation, tol);
  detail::add_bound(r, "target_transition_variation", target_variation, kExactTolerance);
  r.metrics.push_back({"overlap_samples", static_cast<double>(pts.size()), 0.0, !pts.empty()});
  detail::finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Configuration

inline std::string default_bundle(const std::string& experiment) {
  return experiment == "contractible-trivialization" ? "twisted-disk-su2" : "hopf";
}

inline void validate(const ExperimentConfig& cfg) {
  const auto& ex = experiment_names();
  if (std::find(ex.begin(), ex.end(), cfg.experiment) == ex.end())
    throw Error(ErrorKind::UnknownExperiment, "'" + cfg.experiment + "'");
  const auto& bn = bundle_names();
  if (!cfg.bundle.empty() && std::find(bn.begin(), bn.end(), cfg.bundle) == bn.end())
    throw Error(ErrorKind::InvalidConfig, "unknown bundle '" + cfg.bundle + "'");
  const auto& cn = connection_names();
  if (std::find(cn.begin(), cn.end(), cfg.connection) == cn.end())
    throw Error(ErrorKind::InvalidConfig, "unknown connection '" + cfg.connection + "'");
  if (cfg.steps < 1) throw Error(ErrorKind::InvalidConfig, "steps must be >= 1");
  if (cfg.samples < 1) throw Error(ErrorKind::InvalidConfig, "samples must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw Error(ErrorKind::InvalidConfig, "tolerance must be > 0");
}

/// Reads a flat JSON object whose keys are ExperimentConfig field names.
/// Fields absent from the object keep the values already in `base`.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") base.experiment = value.get<std::string>();
      else if (key == "bundle") base.bundle = value.get<std::string>();
      else if (key == "connection") base.connection = value.get<std::string>();
      else if (key == "steps") base.steps = value.get<int>();
      else if (key == "samples") base.samples = value.get<int>();
      else if (key == "tolerance") base.tolerance = value.get<double>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else throw Error(ErrorKind::InvalidConfig, "unknown config field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  return base;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  return nlohmann::json{{"experiment", cfg.experiment}, {"bundle", cfg.bundle},   {"connection", cfg.connection},
                        {"steps", cfg.steps},           {"samples", cfg.samples}, {"tolerance", cfg.tolerance},
                        {"seed", cfg.seed}};
}

// ---------------------------------------------------------------------------
// Experiments

namespace detail {

inline ExperimentResult run_phi_table() {
  ExperimentResult r{"phi-table", true, {}, {}};
  for (int k = 0; k <= 30; ++k) {
    const double t = k / 30.0;
    const double v = smoothing_phi(t);
    const std::string name = "phi(" + std::to_string(k) + "/30)";
    if (t <= 1.0 / 3.0) {
      add_match(r, name, v, 0.0, 0.0);
    } else if (t >= 2.0 / 3.0) {
      add_match(r, name, v, 1.0, 0.0);
    } else {
      // Interior rows check the symmetry phi(t) + phi(1 - t) = 1.
      r.metrics.push_back({name, v, kExactTolerance, std::abs(v + smoothing_phi(1.0 - t) - 1.0) <= kExactTolerance});
    }
  }
  add_match(r, "phi(1/2)", smoothing_phi(0.5), 0.5, kExactTolerance);
  double drop = 0.0;
  double prev = smoothing_phi(0.0);
  for (int k = 1; k <= 10000; ++k) {
    const double v = smoothing_phi(k / 10000.0);
    drop = std::max(drop, prev - v);
    prev = v;
  }
  add_bound(r, "monotonicity_violation", drop, 0.0);
  return r;
}

struct TransportCase {
  PathT beta;   // traversed first
  PathT alpha;  // starts at beta(1)
  TotalPoint start;
  GroupElement shift;
};

inline TransportCase random_transport_case(const PrincipalBundle& b, SplitMix64& rng) {
  TransportCase tc;
  const Point x0 = random_point(*b.base, rng);
  if (b.base->name == "sphere") {
    tc.beta = sphere_arc(x0, random_unit_vector(rng), rng.uniform(-2.0, 2.0));
    tc.alpha = sphere_arc(tc.beta(1.0), random_unit_vector(rng), rng.uniform(-2.0, 2.0));
  } else {
    const Point x1 = random_point(*b.base, rng);
    const Point x2 = random_point(*b.base, rng);
    tc.beta = disk_segment(x0.coords, x1.coords);
    tc.alpha = disk_segment(x1.coords, x2.coords);
  }
  const Point s = tc.beta(0.0);
  tc.start = TotalPoint{best_cover(b, s), s, random_group_element(b.group, rng)};
  tc.shift = random_group_element(b.group, rng);
  return tc;
}

inline ExperimentResult run_transport_props(const Connection& c, const ExperimentConfig& cfg) {
  const PrincipalBundle& b = *c.bundle;
  SplitMix64 rng(cfg.seed);
  double projection = 0.0, start = 0.0, unitarity = 0.0, equivariance = 0.0;
  double reparam = 0.0, composition = 0.0, reversal = 0.0;
  for (int s = 0; s < cfg.samples; ++s) {
    const TransportCase tc = random_transport_case(b, rng);
    const LiftedPath lift = horizontal_lift(c, tc.beta, tc.start, cfg.steps);
    for (const auto& node : lift.nodes) {
      projection = std::max(projection, point_distance(*b.base, node.point.base, tc.beta(node.t)));
      unitarity = std::max(unitarity, unitarity_defect(node.point.g));
    }
    start = std::max(start, total_distance(b, lift.nodes.front().point, tc.start));

    const LiftedPath shifted = horizontal_lift(c, tc.beta, right_action(b, tc.start, tc.shift), cfg.steps);
    for (std::size_t k = 0; k < lift.nodes.size(); ++k)
      equivariance = std::max(equivariance, total_distance(b, shifted.nodes[k].point,
                                                           right_action(b, lift.nodes[k].point, tc.shift)));

    const TotalPoint end = lift.nodes.back().point;
    const TotalPoint end_phi = parallel_transport(c, reparametrize(tc.beta, smoothing_phi), tc.start, cfg.steps);
    reparam = std::max(reparam, total_distance(b, end, end_phi));

    const TotalPoint glued = parallel_transport(c, compose_paths(tc.alpha, tc.beta), tc.start, cfg.steps);
    const TotalPoint chained = parallel_transport(c, tc.alpha, end, cfg.steps);
    composition = std::max(composition, total_distance(b, glued, chained));

    const TotalPoint back = parallel_transport(c, reverse_path(tc.beta), end, cfg.steps);
    reversal = std::max(reversal, total_distance(b, back, tc.start));
  }
  ExperimentResult r{"transport-props", true, {}, {}};
  add_bound(r, "projection_violation", projection, kExactTolerance);
  add_bound(r, "start_violation", start, kExactTolerance);
  add_bound(r, "unitarity_violation", unitarity, kExactTolerance);
  add_bound(r, "equivariance_deviation", equivariance, kTransportTolerance);
  add_bound(r, "reparametrisation_deviation", reparam, kTransportTolerance);
  add_bound(r, "composition_deviation", composition, kTransportTolerance);
  add_bound(r, "reversal_deviation", reversal, kTransportTolerance);
  return r;
}

/// Equivariance and fibre preservation of lambda_H on sampled points.
inline std::pair<double, double> morphism_law_deviations(const BundleMorphism& m, int samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  double equivariance = 0.0;
  double fibre = 0.0;
  const PrincipalBundle& src = *m.source;
  const PrincipalBundle& dst = *m.target;
  for (int s = 0; s < samples; ++s) {
    const TotalPoint p = random_total_point(src, rng);
    const GroupElement g = random_group_element(src.group, rng);
    const TotalPoint image = apply_morphism(m, p);
    fibre = std::max(fibre, point_distance(*dst.base, image.base, p.base));
    const TotalPoint lhs = apply_morphism(m, right_action(src, p, g));
    equivariance = std::max(equivariance, total_distance(dst, lhs, right_action(dst, image, g)));
  }
  return {equivariance, fibre};
}

inline ExperimentResult run_functoriality(const BundlePtr& xi, const Connection& c, const ExperimentConfig& cfg) {
  ExperimentResult r{"functoriality", true, {}, {}};
  const auto chain = homotopy_chain(xi->base);
  std::vector<std::pair<NamedHomotopy, NamedHomotopy>> pairs;  // (H, K): K o H
  pairs.push_back({{"const", constant_homotopy(chain.front().homotopy.f_end)}, chain.front()});
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) pairs.push_back({chain[k], chain[k + 1]});
  pairs.push_back({chain.back(), {"const", constant_homotopy(chain.back().homotopy.g_end)}});
  for (const auto& [h, k] : pairs) {
    const FunctorReport rep =
        verify_functoriality(h.homotopy, k.homotopy, xi, c, cfg.samples, cfg.tolerance, cfg.steps, cfg.seed);
    add_bound(r, "functoriality:" + k.name + "*" + h.name, rep.max_deviation, cfg.tolerance);
  }
  for (const auto& h : chain) {
    const BundleMorphism m = induced_morphism(h.homotopy, xi, c, cfg.steps);
    const auto [equivariance, fibre] = morphism_law_deviations(m, cfg.samples, cfg.seed);
    add_bound(r, "equivariance:" + h.name, equivariance, kTransportTolerance);
    add_bound(r, "fibre_preservation:" + h.name, fibre, 0.0);
  }
  return r;
}

inline ExperimentResult run_isomorphism(const BundlePtr& xi, const Connection& c, const ExperimentConfig& cfg) {
  ExperimentResult r{"isomorphism", true, {}, {}};
  for (const auto& h : homotopy_chain(xi->base)) {
    const FunctorReport rep = verify_isomorphism(h.homotopy, xi, c, cfg.samples, cfg.tolerance, cfg.steps, cfg.seed);
    add_bound(r, "round_trip:" + h.name, rep.max_deviation, cfg.tolerance);
  }
  return r;
}

inline ExperimentResult run_chern_classification(const BundlePtr& xi) {
  if (xi->group != GroupTag::U1 || xi->base->name != "sphere")
    throw Error(ErrorKind::InvalidConfig, "chern-classification needs a U(1) bundle over the sphere");
  ExperimentResult r{"chern-classification", true, {}, {}};
  const int c1 = chern_number(*xi);
  const int expected = xi->name == "hopf" ? 1 : 0;
  add_match(r, "chern", c1, expected, 0.0);
  add_match(r, "chern(trivial-s2-u1)", chern_number(*trivial_s2_u1()), 0.0, 0.0);
  for (int k = -2; k <= 2; ++k) {
    const int ck = chern_number(*pull_back(xi, degree_map(k)));
    add_match(r, "chern(f" + std::to_string(k) + "*" + xi->name + ")", ck, k * c1, 0.0);
  }
  if (xi->name == "hopf") {
    const Connection mono = monopole_connection();
    const TotalPoint p{kNorth, Point{kNorth, as_coords(1.0)}, identity_element(GroupTag::U1)};
    const GroupElement h = holonomy(mono, equator_arc(0.0, 2.0 * std::numbers::pi), p);
    add_bound(r, "monopole_equator_holonomy_deviation", distance(h, u1(std::numbers::pi)), kTransportTolerance);
  }
  return r;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& input) {
  validate(input);
  ExperimentConfig cfg = input;
  if (cfg.bundle.empty()) cfg.bundle = default_bundle(cfg.experiment);

  ExperimentResult r;
  if (cfg.experiment == "phi-table") {
    r = detail::run_phi_table();
  } else {
    const BundlePtr xi = bundle_by_name(cfg.bundle);
    if (cfg.experiment == "chern-classification") {
      r = detail::run_chern_classification(xi);
    } else {
      const Connection c = connection_by_name(cfg.connection, xi);
      if (cfg.experiment == "transport-props") {
        r = detail::run_transport_props(c, cfg);
      } else if (cfg.experiment == "functoriality") {
        r = detail::run_functoriality(xi, c, cfg);
      } else if (cfg.experiment == "isomorphism") {
        r = detail::run_isomorphism(xi, c, cfg);
      } else {
        r = trivialize_contractible(xi, steadify(disk_contraction()), c, cfg.steps, cfg.samples, cfg.tolerance);
      }
    }
  }
  r.experiment = cfg.experiment;
  detail::finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Output

inline std::string to_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "metric,value,tolerance,pass\n";
  for (const auto& m : r.metrics)
    out << m.name << ',' << detail::format_number(m.value) << ',' << detail::format_number(m.tolerance) << ','
        << (m.pass ? "true" : "false") << '\n';
  return out.str();
}

inline nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : r.metrics)
    metrics.push_back({{"name", m.name}, {"value", m.value}, {"tolerance", m.tolerance}, {"pass", m.pass}});
  return nlohmann::json{{"experiment", r.experiment}, {"pass", r.pass}, {"metrics", metrics}, {"artifacts", r.artifacts}};
}

/// Writes the CSV to `csv_path` and the JSON summary next to it (same stem,
/// .json extension); records both paths as artifacts.
inline void write_outputs(ExperimentResult& r, const ExperimentConfig& cfg, const std::filesystem::path& csv_path) {
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  r.artifacts = {csv_path.string(), json_path.string()};
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw Error(ErrorKind::InvalidConfig, "cannot write " + csv_path.string());
    csv << to_csv(r);
  }
  nlohmann::json summary = to_json(r);
  summary["config"] = to_json(cfg);
  std::ofstream json(json_path, std::ios::binary);
  if (!json) throw Error(ErrorKind::InvalidConfig, "cannot write " + json_path.string());
  json << summary.dump(2) << '\n';
}

}  // namespace pullback
