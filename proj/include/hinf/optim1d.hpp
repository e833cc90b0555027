#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hinf/system.hpp"

namespace hinf {

enum class OptMethod { Newton, Secant, Auto };

struct OptimizerConfig {
  OptMethod method = OptMethod::Auto;
  double opt_tol = 1e-14;
  int max_iters = 100;
  double secant_h0 = 1e-6;
  /// Auto picks Newton when min(m, p) <= dims_threshold, else Secant.
  int dims_threshold = 64;
};

/// Newton or Secant for this system under cfg.
OptMethod resolve_method(const StateSpaceSystem& sys, const OptimizerConfig& cfg);

struct LocalMaximum {
  Frequency frequency;
  /// Maximizer in the caller's coordinates (unwrapped for boxed discrete
  /// problems).
  double point = 0.0;
  double gain = 0.0;
  int iterations = 0;
  bool converged = false;
  bool at_box_edge = false;
  int gain_evals = 0;
  /// Accepted iterates in order, starting with x0.
  std::vector<double> trace_points;
  std::vector<double> trace_gains;
  std::vector<std::string> warnings;
};

/// Value and slope of the objective, plus curvature when requested and
/// available. Implementations throw hinf::Error when the point is unusable
/// (for example NonSimpleSingularValue).
struct GainEval {
  double value = 0.0;
  double first = 0.0;
  std::optional<double> second;
};
using GainFunction = std::function<GainEval(double x, bool want_second)>;

struct SearchBox {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool bounded() const { return std::isfinite(lo) || std::isfinite(hi); }
};

/// Safeguarded 1-D ascent. Accepted iterates never decrease f and never leave
/// the box. Terminates when |f'| <= opt_tol * max(1, f), after three
/// consecutive trials without a strict increase, when the bracket collapses,
/// or at a box edge whose ascent direction points outward.
/// `max_step` caps each step (unconstrained use); `domain` only labels the
/// returned Frequency.
LocalMaximum maximize(const GainFunction& f, const SearchBox& box, double x0, OptMethod method,
                      const OptimizerConfig& cfg, Domain domain = Domain::Continuous,
                      double max_step = std::numeric_limits<double>::infinity());

/// max of g over [lo, hi] from x0 in [lo, hi]. For discrete systems lo/hi may
/// be unwrapped (hi up to lo + 2*pi).
LocalMaximum maximize_boxed(const StateSpaceSystem& sys, double lo, double hi, double x0,
                            const OptimizerConfig& cfg);

/// Unconstrained local max of g from x0, each step capped at
/// 10 * (1 + |x0|) (and at pi for discrete systems). Discrete results are
/// reduced into [0, 2*pi).
LocalMaximum maximize_unconstrained(const StateSpaceSystem& sys, double x0,
                                    const OptimizerConfig& cfg);

/// GainFunction backed by module transfer. Curvature requests use the full
/// SVD regardless of size.
GainFunction system_gain_function(const StateSpaceSystem& sys);

}  // namespace hinf
