#include <doctest.h>

#include "fixtures.hpp"
#include "hinf/error.hpp"
#include "hinf/optim1d.hpp"
#include "oracles.hpp"

using namespace hinf;

namespace {

OptimizerConfig with_method(OptMethod m) {
  OptimizerConfig cfg;
  cfg.method = m;
  return cfg;
}

void check_monotone(const LocalMaximum& r) {
  for (std::size_t k = 1; k < r.trace_gains.size(); ++k) {
    CHECK(r.trace_gains[k] >= r.trace_gains[k - 1]);
  }
}

}  // namespace

TEST_SUITE("optim1d") {
  TEST_CASE("boxed maximum of the scalar gain") {
    const auto sys = fixtures::scalar_continuous();
    for (auto m : {OptMethod::Newton, OptMethod::Secant}) {
      const auto r = maximize_boxed(sys, -1.0, 1.0, 0.5, with_method(m));
      CHECK(r.converged);
      CHECK_FALSE(r.at_box_edge);
      CHECK(std::abs(r.point) < 1e-7);
      CHECK(r.gain == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(r.gain == doctest::Approx(oracle::direct_gain(sys, r.point)).epsilon(1e-15));
      check_monotone(r);
      for (double x : r.trace_points) {
        CHECK(x >= -1.0);
        CHECK(x <= 1.0);
      }
    }
  }

  TEST_CASE("start at the maximizer") {
    const auto sys = fixtures::scalar_continuous();
    for (auto m : {OptMethod::Newton, OptMethod::Secant}) {
      const auto r = maximize_boxed(sys, -1.0, 1.0, 0.0, with_method(m));
      CHECK(r.iterations <= 1);
      CHECK(r.point == 0.0);
      CHECK(r.gain == 1.0);
    }
  }

  TEST_CASE("peak outside the box returns the ascending edge") {
    const auto sys = fixtures::scalar_continuous();
    for (auto m : {OptMethod::Newton, OptMethod::Secant}) {
      const auto r = maximize_boxed(sys, 1.0, 2.0, 1.6, with_method(m));
      CHECK(r.at_box_edge);
      CHECK(r.point == 1.0);
      CHECK(r.gain == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
      check_monotone(r);
    }
  }

  TEST_CASE("unconstrained, scalar continuous") {
    const auto sys = fixtures::scalar_continuous();
    for (auto m : {OptMethod::Newton, OptMethod::Secant}) {
      const auto r = maximize_unconstrained(sys, 2.0, with_method(m));
      CHECK(r.converged);
      CHECK(std::abs(r.point) < 1e-7);
      CHECK(r.gain == doctest::Approx(1.0).epsilon(1e-14));
      check_monotone(r);
    }
  }

  TEST_CASE("unconstrained, scalar discrete") {
    const auto sys = fixtures::scalar_discrete();
    for (auto m : {OptMethod::Newton, OptMethod::Secant}) {
      const auto r = maximize_unconstrained(sys, 0.3, with_method(m));
      CHECK(r.converged);
      CHECK(std::min(r.point, kTwoPi - r.point) < 1e-7);
      CHECK(r.gain == doctest::Approx(2.0).epsilon(1e-14));
    }
    const auto r = maximize_unconstrained(sys, 6.0, with_method(OptMethod::Newton));
    CHECK(r.point >= 0.0);
    CHECK(r.point < kTwoPi);
    CHECK(r.gain == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("local maximum of a two-peak example stays local") {
    const auto sys = fixtures::two_peak();
    const auto peak = oracle::grid_polish_peak(sys, 4);
    REQUIRE(peak.local_maxima >= 2);
    // The lower peak lies near w = 3; polish it independently.
    const auto g = [&](double w) { return oracle::direct_gain(sys, w); };
    const auto [w_low, g_low] = oracle::golden_max(g, 2.7, 3.3, 1e-12);
    REQUIRE(g_low < peak.gain - 0.5);
    for (auto m : {OptMethod::Newton, OptMethod::Secant}) {
      const auto r = maximize_unconstrained(sys, w_low, with_method(m));
      CHECK(r.point == doctest::Approx(w_low).epsilon(1e-6));
      CHECK(r.gain == doctest::Approx(g_low).epsilon(1e-12));
      const auto near = maximize_unconstrained(sys, w_low + 0.05, with_method(m));
      CHECK(near.point == doctest::Approx(w_low).epsilon(1e-6));
    }
  }

  TEST_CASE("Newton converges quadratically on the scalar example") {
    const auto r = maximize_unconstrained(fixtures::scalar_continuous(), 0.5, with_method(OptMethod::Newton));
    std::vector<double> err;
    for (double x : r.trace_points) err.push_back(std::abs(x));
    CHECK(oracle::convergence_order(err) >= 1.8);
  }

  TEST_CASE("secant converges superlinearly on the scalar example") {
    const auto r = maximize_unconstrained(fixtures::scalar_continuous(), 0.5, with_method(OptMethod::Secant));
    std::vector<double> err;
    for (double x : r.trace_points) err.push_back(std::abs(x));
    CHECK(oracle::convergence_order(err) >= 1.4);
  }

  TEST_CASE("deterministic iterates") {
    const auto sys = fixtures::two_peak();
    for (auto m : {OptMethod::Newton, OptMethod::Secant}) {
      const auto a = maximize_unconstrained(sys, 0.6, with_method(m));
      const auto b = maximize_unconstrained(sys, 0.6, with_method(m));
      CHECK(a.trace_points == b.trace_points);
      CHECK(a.gain == b.gain);
    }
  }

  TEST_CASE("convex start falls back to bracket steps") {
    // g is convex near w = 2 on the scalar example (g'' > 0 for |w| > 1/sqrt 2).
    const auto sys = fixtures::scalar_continuous();
    const auto r = maximize_boxed(sys, -3.0, 3.0, 2.0, with_method(OptMethod::Newton));
    CHECK(r.converged);
    CHECK(std::abs(r.point) < 1e-7);
    check_monotone(r);
  }

  TEST_CASE("iteration cap reports non-convergence") {
    auto cfg = with_method(OptMethod::Secant);
    cfg.max_iters = 2;
    const auto r = maximize_unconstrained(fixtures::two_peak(), 0.2, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
    CHECK_FALSE(r.warnings.empty());
  }

  TEST_CASE("generic objective and failing points") {
    // -(x - 1)^2 with a hole at x = 0.5 that raises a recoverable error.
    int failures = 0;
    const GainFunction f = [&](double x, bool want_second) {
      if (x == 0.5) {
        ++failures;
        throw Error(ErrorCode::NonSimpleSingularValue, "hole");
      }
      GainEval e{-(x - 1.0) * (x - 1.0), -2.0 * (x - 1.0), std::nullopt};
      if (want_second) e.second = -2.0;
      return e;
    };
    const auto r = maximize(f, SearchBox{0.0, 4.0}, 0.5, OptMethod::Newton, OptimizerConfig{});
    CHECK(failures == 1);
    CHECK(r.point == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(r.warnings.empty());
    CHECK_THROWS_AS(maximize(f, SearchBox{2.0, 1.0}, 1.5, OptMethod::Newton, OptimizerConfig{}), Error);
  }

  TEST_CASE("auto method choice") {
    OptimizerConfig cfg;
    CHECK(resolve_method(fixtures::scalar_continuous(), cfg) == OptMethod::Newton);
    cfg.dims_threshold = 0;
    CHECK(resolve_method(fixtures::scalar_continuous(), cfg) == OptMethod::Secant);
  }
}
