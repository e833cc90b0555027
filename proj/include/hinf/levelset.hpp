#pragma once

#include <string>
#include <vector>

#include "hinf/pencil.hpp"
#include "hinf/system.hpp"

namespace hinf {

enum class CandidateScheme { Midpoint, Cubic };

/// One interval between consecutive crossings. lo and hi are in unwrapped
/// coordinates: for the discrete wrap-around interval hi = theta_1 + 2*pi.
/// candidate is unwrapped too; candidate_frequency() reduces it.
struct LevelSetInterval {
  double lo = 0.0;
  double hi = 0.0;
  Domain domain = Domain::Continuous;
  bool wraps = false;
  int lo_index = -1;  // positions in the crossing list
  int hi_index = -1;
  double candidate = 0.0;
  double candidate_gain = 0.0;
  CandidateScheme scheme = CandidateScheme::Midpoint;
  bool below_curve = false;

  double width() const { return hi - lo; }
  Frequency lo_frequency() const { return Frequency::make(domain, lo); }
  Frequency hi_frequency() const { return Frequency::make(domain, hi); }
  Frequency candidate_frequency() const { return Frequency::make(domain, candidate); }
};

/// c(t) = c0 + c1 t + c2 t^2 + c3 t^3 with t = omega - lo.
struct CubicInterpolant {
  double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;
  double interval_width = 0.0;

  double value(double t) const { return ((c3 * t + c2) * t + c1) * t + c0; }
  double derivative(double t) const { return (3.0 * c3 * t + 2.0 * c2) * t + c1; }
  /// Both the quadratic and cubic coefficients are negligible.
  bool degenerate() const;
};

/// Hermite cubic matching values and slopes at t = 0 and t = width.
CubicInterpolant fit_cubic(double width, double g_lo, double g_hi, double gp_lo, double gp_hi);

/// Maximizer of c over [0, width], in t. Ties go to the interior point, then
/// toward lo. Degenerate interpolants give width / 2.
double cubic_argmax(const CubicInterpolant& c);

inline constexpr double kIntervalMergeTol = 1e-12;

/// Consecutive intervals from sorted crossing frequencies. Crossings closer
/// than merge_tol * max(1, span) collapse onto the first of the run. The
/// discrete case adds the wrap-around interval. Fewer than two distinct
/// crossings give an empty list.
std::vector<LevelSetInterval> build_intervals(const std::vector<double>& crossings, Domain domain,
                                              double merge_tol = kIntervalMergeTol);
std::vector<LevelSetInterval> build_intervals(const std::vector<BoundaryCrossing>& crossings,
                                              Domain domain,
                                              double merge_tol = kIntervalMergeTol);

/// Midpoint in unwrapped coordinates, reduced mod 2*pi for discrete.
Frequency midpoint_candidate(const LevelSetInterval& interval);

/// Maximizer of the Hermite cubic through the endpoint data, in frequency
/// coordinates (reduced for discrete). May be an endpoint.
Frequency cubic_candidate(const LevelSetInterval& interval, double g_lo, double g_hi,
                          double gp_lo, double gp_hi);
/// Same, unwrapped.
double cubic_candidate_point(const LevelSetInterval& interval, double g_lo, double g_hi,
                             double gp_lo, double gp_hi);

struct ClassifyOptions {
  int threads = 1;
  /// Take endpoint slopes from the pencil eigenvectors (with endpoint values
  /// equal to gamma) instead of recomputing them. Needs crossings with
  /// eigenvectors.
  const std::vector<BoundaryCrossing>* crossings = nullptr;
  bool endpoint_slopes_from_eigvecs = false;
};

struct RankedIntervals {
  std::vector<LevelSetInterval> intervals;  // survivors, candidate_gain descending
  int gain_evals = 0;
  std::vector<std::string> warnings;
};

/// Computes one candidate per interval (midpoint or cubic), evaluates its gain,
/// drops intervals whose candidate gain is below gamma and sorts the rest by
/// candidate gain. Cubic candidates landing on an endpoint are replaced by the
/// midpoint. Intervals whose evaluation fails are dropped with a warning.
RankedIntervals classify_and_rank(const StateSpaceSystem& sys,
                                  std::vector<LevelSetInterval> intervals, double gamma,
                                  CandidateScheme scheme, const ClassifyOptions& opts = {});

}  // namespace hinf
