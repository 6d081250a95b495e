#pragma once
// Seeded generators shared by the property tests.

#include "kepinch/tensor.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace kepinch::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// MinDirection profile: a in [-10, 0], b in [a/2, 0], |B| in [0, A].
inline PinchingProfile random_min_profile(Rng &rng) {
  PinchingProfile p;
  p.a = uniform(rng, -10.0, 0.0);
  p.b = uniform(rng, 0.5 * p.a, 0.0);
  p.bmod = uniform(rng, 0.0, 1.0) * p.A();
  p.tag = ExtremumTag::MinDirection;
  return p;
}

/// Any profile with |B| >= 0; e1 need not be a minimum.
inline PinchingProfile random_free_profile(Rng &rng) {
  PinchingProfile p;
  p.a = uniform(rng, -10.0, 10.0);
  p.b = uniform(rng, -10.0, 10.0);
  p.bmod = uniform(rng, 0.0, 5.0);
  p.tag = ExtremumTag::Unconstrained;
  return p;
}

inline Direction random_direction(Rng &rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Direction::normalized({g(rng), g(rng)}, {g(rng), g(rng)});
}

inline double max_component_diff(const CurvatureTensor &x, const CurvatureTensor &y) {
  double m = 0.0;
  for (std::size_t k = 0; k < 16; ++k)
    m = std::max(m, std::abs(x.components[k] - y.components[k]));
  return m;
}

inline bool has_violation(const std::vector<Violation> &v, const std::string &name) {
  for (const auto &x : v)
    if (x.invariant == name)
      return true;
  return false;
}

} // namespace kepinch::testing
