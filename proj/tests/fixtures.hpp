#pragma once

#include <cmath>

#include "hinf/system.hpp"

namespace fixtures {

using hinf::Domain;
using hinf::Matrix;

inline Matrix scalar(std::complex<double> v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

/// 1 / (s + 1): gain 1 / sqrt(1 + w^2), peak 1 at w = 0.
inline hinf::StateSpaceSystem scalar_continuous() {
  return hinf::make_system(scalar(-1.0), scalar(1.0), scalar(1.0), scalar(0.0), std::nullopt,
                           Domain::Continuous);
}

/// 1 / (z - 0.5): gain 1 / |e^{it} - 0.5|, peak 2 at t = 0.
inline hinf::StateSpaceSystem scalar_discrete() {
  return hinf::make_system(scalar(0.5), scalar(1.0), scalar(1.0), scalar(0.0), std::nullopt,
                           Domain::Discrete);
}

/// 1 / (s^2 + 0.2 s + 1) + 2.4 / (s^2 + 0.2 s + 9): a tall peak near w = 1
/// (about 5) and a lower one near w = 3 (about 4), with a dip between them.
inline hinf::StateSpaceSystem two_peak() {
  Matrix a = Matrix::Zero(4, 4);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;
  a(1, 1) = -0.2;
  a(2, 3) = 1.0;
  a(3, 2) = -9.0;
  a(3, 3) = -0.2;
  Matrix b = Matrix::Zero(4, 1);
  b(1, 0) = 1.0;
  b(3, 0) = 1.0;
  Matrix c = Matrix::Zero(1, 4);
  c(0, 0) = 1.0;
  c(0, 2) = 2.4;
  return hinf::make_system(a, b, c, scalar(0.0), std::nullopt, Domain::Continuous);
}

}  // namespace fixtures
