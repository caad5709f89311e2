#pragma once

// Seeded counter-based generator. The stream is fixed by the seed alone so
// any implementation reproduces it: SplitMix64 outputs mapped to [0,1) by
// dividing by 2^64.

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

#include "pullback/geometry.hpp"
#include "pullback/group.hpp"

namespace pullback {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() {
    const double u = static_cast<double>(next()) * 0x1p-64;
    // The conversion to double rounds values within 2^10 of 2^64 up to 1.
    return u < 1.0 ? u : 0x1.fffffffffffffp-1;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

inline GroupElement random_group_element(GroupTag tag, SplitMix64& rng) {
  if (tag == GroupTag::U1) return u1(rng.uniform(-std::numbers::pi, std::numbers::pi));
  return su2_from_quaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal());
}

inline Eigen::Vector3d random_unit_vector(SplitMix64& rng) {
  Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

/// Random point of a catalogue manifold through its unit-cube sampler.
inline Point random_point(const Manifold& m, SplitMix64& rng) {
  for (;;) {
    std::vector<double> u(static_cast<std::size_t>(m.sample_dim));
    for (auto& x : u) x = rng.uniform();
    if (auto p = m.from_unit_cube(u)) return *p;
  }
}

}  // namespace pullback
