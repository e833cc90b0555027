#include <doctest.h>

#include "fixtures.hpp"
#include "hinf/error.hpp"
#include "hinf/pencil.hpp"
#include "hinf/random_system.hpp"
#include "hinf/transfer.hpp"
#include "oracles.hpp"

using namespace hinf;
using fixtures::scalar;

namespace {

std::vector<double> frequencies(const std::vector<BoundaryCrossing>& xs) {
  std::vector<double> out;
  for (const auto& x : xs) out.push_back(x.frequency.value());
  return out;
}

StateSpaceSystem random_small(int idx, Domain domain, bool descriptor, double d_scale = 0.0) {
  RandomSpec spec;
  spec.n = 3 + idx % 8;
  spec.m = 1 + idx % 2;
  spec.p = 1 + (idx / 2) % 2;
  spec.seed = 314;
  spec.domain = domain;
  spec.descriptor = descriptor;
  spec.d_scale = d_scale;
  return random_stable_system(spec, idx);
}

}  // namespace

TEST_SUITE("pencil") {
  TEST_CASE("scalar continuous pencil at 1/sqrt(2)") {
    const auto sys = fixtures::scalar_continuous();
    const double g = 1.0 / std::sqrt(2.0);
    const auto pp = build_pencil(sys, g);
    CHECK(pp.right_is_identity);
    Matrix expect(2, 2);
    expect << -1.0, std::sqrt(2.0), -std::sqrt(2.0), 1.0;
    CHECK((pp.left - expect).norm() < 1e-14);
    CHECK((pp.right - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK(pp.r_min_sv == doctest::Approx(0.5));
    CHECK(pp.s_min_sv == doctest::Approx(0.5));

    const auto xs = boundary_eigenvalues(pp, kDefaultBandTol, false);
    const auto f = frequencies(xs);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gain_at(sys, f[1]) == doctest::Approx(g).epsilon(1e-13));
  }

  TEST_CASE("D = 0 simplifies the off-diagonal blocks") {
    RandomSpec spec;
    spec.n = 5;
    spec.m = 2;
    spec.p = 3;
    spec.d_scale = 0.0;
    const auto sys = random_stable_system(spec, 0);
    const double g = 1.7;
    const auto pp = build_pencil(sys, g);
    const int n = sys.n();
    const Matrix ur = sys.B() * sys.B().adjoint() / g;
    const Matrix ll = -sys.C().adjoint() * sys.C() / g;
    CHECK((pp.left.topRightCorner(n, n) - ur).norm() < 1e-13 * ur.norm());
    CHECK((pp.left.bottomLeftCorner(n, n) - ll).norm() < 1e-13 * ll.norm());
    CHECK((pp.left.topLeftCorner(n, n) - sys.A()).norm() == 0.0);
  }

  TEST_CASE("continuous right matrix is blkdiag(E, E^*)") {
    const auto sys = random_small(3, Domain::Continuous, true, 0.3);
    const auto pp = build_pencil(sys, 5.0);
    const int n = sys.n();
    CHECK_FALSE(pp.right_is_identity);
    CHECK((pp.right.topLeftCorner(n, n) - sys.E()).norm() == 0.0);
    CHECK((pp.right.bottomRightCorner(n, n) - sys.E().adjoint()).norm() == 0.0);
    CHECK(pp.right.topRightCorner(n, n).norm() == 0.0);
    CHECK(pp.right.bottomLeftCorner(n, n).norm() == 0.0);
  }

  TEST_CASE("discrete pencil blocks") {
    const auto sys = random_small(5, Domain::Discrete, true, 0.4);
    const double g = 3.0;
    const auto pp = build_pencil(sys, g);
    const int n = sys.n();
    const Matrix r = sys.D().adjoint() * sys.D() - g * g * Matrix::Identity(sys.m(), sys.m());
    const Matrix s = sys.D() * sys.D().adjoint() - g * g * Matrix::Identity(sys.p(), sys.p());
    const Matrix ur = -g * sys.B() * r.inverse() * sys.B().adjoint();
    const Matrix ll = -g * sys.C().adjoint() * s.inverse() * sys.C();
    CHECK((pp.left.topRightCorner(n, n) - ur).norm() < 1e-12 * ur.norm());
    CHECK((pp.right.bottomLeftCorner(n, n) - ll).norm() < 1e-12 * ll.norm());
    CHECK(pp.left.bottomLeftCorner(n, n).norm() == 0.0);
    CHECK((pp.left.bottomRightCorner(n, n) - sys.E().adjoint()).norm() == 0.0);
    CHECK((pp.right.topLeftCorner(n, n) - sys.E()).norm() == 0.0);
  }

  TEST_CASE("scalar discrete pencil at its peak level") {
    // The level touches the gain curve, so z = 1 is a double eigenvalue and
    // rounding splits it by O(sqrt(eps)) off the circle.
    const auto pp = build_pencil(fixtures::scalar_discrete(), 2.0);
    const auto xs = boundary_eigenvalues(pp, 1e-7, false);
    REQUIRE(xs.size() == 1);
    CHECK(std::min(xs[0].frequency.value(), kTwoPi - xs[0].frequency.value()) < 1e-12);
    CHECK(xs[0].distance_to_boundary <= 2.0 * std::sqrt(std::numeric_limits<double>::epsilon()));
    const auto strict = frequencies(boundary_eigenvalues(pp, kDefaultBandTol, false));
    CHECK(strict.size() <= 1);
  }

  TEST_CASE("scalar discrete pencil below the peak") {
    const auto sys = fixtures::scalar_discrete();
    const double g = 1.0;
    const auto f = frequencies(boundary_eigenvalues(build_pencil(sys, g), kDefaultBandTol, false));
    REQUIRE(f.size() == 2);
    // |e^{it} - 0.5| = 1  <=>  cos t = 1/4.
    CHECK(f[0] == doctest::Approx(std::acos(0.25)).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(kTwoPi - std::acos(0.25)).epsilon(1e-12));
  }

  TEST_CASE("level above the norm has no crossings") {
    CHECK(boundary_eigenvalues(build_pencil(fixtures::scalar_continuous(), 1.01), kDefaultBandTol, false)
              .empty());
    CHECK(boundary_eigenvalues(build_pencil(fixtures::scalar_discrete(), 2.01), kDefaultBandTol, false)
              .empty());
  }

  TEST_CASE("near-axis pair is kept inside the band") {
    PencilPair pp;
    pp.left = Matrix::Zero(2, 2);
    pp.left(0, 0) = cd(5e-9, 2.0);
    pp.left(1, 1) = cd(-5e-9, -2.0);
    pp.right = Matrix::Identity(2, 2);
    pp.right_is_identity = true;
    pp.gamma = 1.0;
    const auto xs = boundary_eigenvalues(pp, 1e-8, false);
    const auto f = frequencies(xs);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == doctest::Approx(-2.0));
    CHECK(f[1] == doctest::Approx(2.0));
    for (const auto& x : xs) CHECK(x.distance_to_boundary <= 1e-8);
    CHECK(boundary_eigenvalues(pp, 1e-9, false).empty());
  }

  TEST_CASE("near-duplicate eigenvalues merge") {
    PencilPair pp;
    pp.left = Matrix::Zero(3, 3);
    pp.left(0, 0) = cd(0.0, 1.0);
    pp.left(1, 1) = cd(0.0, 1.0 + 1e-12);
    pp.left(2, 2) = cd(0.0, 3.0);
    pp.right = Matrix::Identity(3, 3);
    pp.right_is_identity = true;
    pp.gamma = 1.0;
    const auto f = frequencies(boundary_eigenvalues(pp, 1e-8, false));
    REQUIRE(f.size() == 2);
    CHECK(f[0] == doctest::Approx(1.0 + 5e-13).epsilon(1e-14));
  }

  TEST_CASE("gamma guard") {
    const auto sys = make_system(scalar(-1.0), scalar(1.0), scalar(1.0), scalar(3.0), std::nullopt,
                                 Domain::Continuous);
    for (double g : {3.0, 0.0, -1.0}) {
      try {
        build_pencil(sys, g);
        FAIL("expected GammaNearSingularValueOfD");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GammaNearSingularValueOfD);
      }
    }
    CHECK_NOTHROW(build_pencil(sys, 3.0 * (1.0 + 1e-8)));
  }

  TEST_CASE("eigenvector derivative, scalar example") {
    const auto sys = fixtures::scalar_continuous();
    const auto xs = boundary_eigenvalues(build_pencil(sys, 1.0 / std::sqrt(2.0)), kDefaultBandTol, true);
    REQUIRE(xs.size() == 2);
    CHECK(derivative_from_eigenvector(xs[1], sys) == doctest::Approx(-0.3535533906).epsilon(1e-9));
    CHECK(derivative_from_eigenvector(xs[0], sys) == doctest::Approx(0.3535533906).epsilon(1e-9));
  }

  TEST_CASE("eigenvector derivative near a smooth maximum") {
    const auto sys = fixtures::scalar_continuous();
    const auto xs = boundary_eigenvalues(build_pencil(sys, 1.0 - 1e-10), kDefaultBandTol, true);
    REQUIRE(xs.size() == 2);
    for (const auto& x : xs) CHECK(std::abs(derivative_from_eigenvector(x, sys)) < 1e-4);
  }

  TEST_CASE("eigenvector derivative matches the transfer derivative") {
    int count = 0;
    for (int idx = 0; idx < 8; ++idx) {
      RandomSpec spec;
      spec.n = 6;
      spec.m = 1 + idx % 3;
      spec.p = 1 + (idx + 1) % 3;
      spec.seed = 66;
      spec.domain = idx % 2 ? Domain::Discrete : Domain::Continuous;
      spec.descriptor = idx >= 4;
      spec.d_scale = 0.1;
      const auto sys = random_stable_system(spec, idx);
      const auto peak = oracle::grid_polish_peak(sys, 2);
      const double g = 0.7 * peak.gain;
      if (g <= 1.1 * sys.norm_D()) continue;
      for (const auto& x : boundary_eigenvalues(build_pencil(sys, g), kDefaultBandTol, true)) {
        const auto s = eval_transfer(sys, x.frequency.value(), SvdMode::Full);
        if (std::abs(s.gain() - g) > 1e-8 * g) continue;  // a lower singular value crossed
        const double ref = gain_first_derivative(s, sys);
        CHECK(std::abs(derivative_from_eigenvector(x, sys) - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
        ++count;
      }
    }
    CHECK(count >= 8);
  }

  TEST_CASE("missing eigenvectors") {
    const auto sys = fixtures::scalar_continuous();
    const auto xs = boundary_eigenvalues(build_pencil(sys, 0.5), kDefaultBandTol, false);
    REQUIRE_FALSE(xs.empty());
    try {
      derivative_from_eigenvector(xs[0], sys);
      FAIL("expected MissingEigenvectors");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingEigenvectors);
    }
  }

  TEST_CASE("crossings agree with a swept sign-change set") {
    for (int idx = 0; idx < 6; ++idx) {
      const auto domain = idx % 2 ? Domain::Discrete : Domain::Continuous;
      const auto sys = random_small(idx, domain, idx >= 3);
      const auto peak = oracle::grid_polish_peak(sys, 2);
      const double g = 0.6 * peak.gain;
      const auto got = frequencies(boundary_eigenvalues(build_pencil(sys, g), kDefaultBandTol, false));
      const auto ref = oracle::level_crossings(sys, g, 1e-3);
      REQUIRE(got.size() == ref.size());
      for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-6);
    }
  }

  TEST_CASE("real continuous crossings come in +/- pairs") {
    const auto sys = random_small(4, Domain::Continuous, false);
    const double g = 0.5 * oracle::grid_polish_peak(sys, 2).gain;
    const auto f = frequencies(boundary_eigenvalues(build_pencil(sys, g), kDefaultBandTol, false));
    REQUIRE(f.size() % 2 == 0);
    for (std::size_t k = 0; k < f.size(); ++k) {
      CHECK(f[k] == doctest::Approx(-f[f.size() - 1 - k]).epsilon(1e-9));
    }
  }

  TEST_CASE("empty crossing sets stay empty at higher levels") {
    const auto sys = random_small(7, Domain::Continuous, false);
    const double peak = oracle::grid_polish_peak(sys, 4).gain;
    bool seen_empty = false;
    for (int k = 0; k <= 40; ++k) {
      const double g = peak * (0.8 + 0.01 * k);
      const bool empty = boundary_eigenvalues(build_pencil(sys, g), kDefaultBandTol, false).empty();
      if (seen_empty) CHECK(empty);
      seen_empty = seen_empty || empty;
    }
    CHECK(seen_empty);
  }
}
