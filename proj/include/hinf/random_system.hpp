#pragma once

#include <cstdint>
#include <string>

#include "hinf/system.hpp"

namespace hinf {

struct RandomSpec {
  int count = 1;
  int n = 20;
  int m = 4;
  int p = 4;
  /// Fraction of A entries kept (the rest are zero).
  double density = 1.0;
  std::uint64_t seed = 0;
  Domain domain = Domain::Continuous;
  /// Random invertible E instead of the identity marker.
  bool descriptor = false;
  /// D = d_scale * randn(p, m).
  double d_scale = 1.0;
};

/// Problem `index` of the spec: standard normal entries from mt19937_64 seeded
/// with (seed, index), then made stable. Continuous systems get
/// A <- A - (alpha_max + 0.5) E with alpha_max the largest real part of the
/// finite spectrum; discrete systems are scaled to spectral radius 0.9.
/// Reproducible for a fixed spec and index.
StateSpaceSystem random_stable_system(const RandomSpec& spec, int index);

/// Parses "5x(n=20,m=4,p=4)" or comma/space separated key=value pairs
/// (count, n, m, p, density, seed, domain, descriptor, d_scale). Throws
/// Error{ParseError}.
RandomSpec parse_random_spec(const std::string& text);

}  // namespace hinf
