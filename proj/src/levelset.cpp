#include "hinf/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hinf/error.hpp"
#include "hinf/parallel.hpp"
#include "hinf/transfer.hpp"

namespace hinf {

bool CubicInterpolant::degenerate() const {
  const double ref = 1e-14 * std::max({std::abs(c1), std::abs(c0), 1.0});
  return std::abs(c3) < ref && std::abs(c2) < ref;
}

CubicInterpolant fit_cubic(double width, double g_lo, double g_hi, double gp_lo, double gp_hi) {
  CubicInterpolant c;
  const double h = width;
  const double slope = (g_hi - g_lo) / h;
  c.interval_width = h;
  c.c0 = g_lo;
  c.c1 = gp_lo;
  c.c2 = (3.0 * slope - 2.0 * gp_lo - gp_hi) / h;
  c.c3 = (gp_lo + gp_hi - 2.0 * slope) / (h * h);
  return c;
}

double cubic_argmax(const CubicInterpolant& c) {
  const double w = c.interval_width;
  if (c.degenerate()) return 0.5 * w;

  // Stationary points: 3 c3 t^2 + 2 c2 t + c1 = 0.
  std::vector<double> interior;
  const double qa = 3.0 * c.c3;
  const double qb = 2.0 * c.c2;
  const double qc = c.c1;
  if (std::abs(qa) * w <= 1e-14 * std::abs(qb)) {
    if (qb != 0.0) interior.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
      if (q != 0.0) {
        interior.push_back(q / qa);
        interior.push_back(qc / q);
      } else {
        interior.push_back(0.0);
      }
    }
  }
  std::sort(interior.begin(), interior.end());

  std::vector<double> cands;
  for (double t : interior) {
    if (t > 0.0 && t < w) cands.push_back(t);
  }
  cands.push_back(0.0);
  cands.push_back(w);
  double best_t = cands.front();
  double best_v = c.value(best_t);
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const double v = c.value(cands[i]);
    if (v > best_v) {
      best_v = v;
      best_t = cands[i];
    }
  }
  return best_t;
}

namespace {

LevelSetInterval make_interval(double lo, double hi, Domain domain, bool wraps, int li, int hi_i) {
  LevelSetInterval iv;
  iv.lo = lo;
  iv.hi = hi;
  iv.domain = domain;
  iv.wraps = wraps;
  iv.lo_index = li;
  iv.hi_index = hi_i;
  iv.candidate = 0.5 * (lo + hi);
  return iv;
}

}  // namespace

std::vector<LevelSetInterval> build_intervals(const std::vector<double>& crossings, Domain domain,
                                              double merge_tol) {
  std::vector<LevelSetInterval> out;
  if (crossings.size() < 2) return out;
  const double span = crossings.back() - crossings.front();
  const double tol = merge_tol * std::max(1.0, span);

  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(crossings.size()); ++i) {
    if (!keep.empty() && crossings[i] - crossings[keep.back()] <= tol) continue;
    keep.push_back(i);
  }
  if (domain == Domain::Discrete && keep.size() >= 2 &&
      crossings[keep.front()] + kTwoPi - crossings[keep.back()] <= tol) {
    keep.pop_back();
  }
  if (keep.size() < 2) return out;

  for (std::size_t k = 0; k + 1 < keep.size(); ++k) {
    out.push_back(make_interval(crossings[keep[k]], crossings[keep[k + 1]], domain, false, keep[k],
                                keep[k + 1]));
  }
  if (domain == Domain::Discrete) {
    out.push_back(make_interval(crossings[keep.back()], crossings[keep.front()] + kTwoPi, domain,
                                true, keep.back(), keep.front()));
  }
  return out;
}

std::vector<LevelSetInterval> build_intervals(const std::vector<BoundaryCrossing>& crossings,
                                              Domain domain, double merge_tol) {
  std::vector<double> freqs;
  freqs.reserve(crossings.size());
  for (const auto& c : crossings) freqs.push_back(c.frequency.value());
  return build_intervals(freqs, domain, merge_tol);
}

Frequency midpoint_candidate(const LevelSetInterval& interval) {
  return Frequency::make(interval.domain, 0.5 * (interval.lo + interval.hi));
}

double cubic_candidate_point(const LevelSetInterval& interval, double g_lo, double g_hi,
                             double gp_lo, double gp_hi) {
  const CubicInterpolant c = fit_cubic(interval.width(), g_lo, g_hi, gp_lo, gp_hi);
  return interval.lo + cubic_argmax(c);
}

Frequency cubic_candidate(const LevelSetInterval& interval, double g_lo, double g_hi, double gp_lo,
                          double gp_hi) {
  return Frequency::make(interval.domain,
                         cubic_candidate_point(interval, g_lo, g_hi, gp_lo, gp_hi));
}

namespace {

struct EndpointData {
  double value = 0.0;
  std::optional<double> slope;
  bool evaluated = false;
  bool counted = false;
  std::string warning;
};

}  // namespace

RankedIntervals classify_and_rank(const StateSpaceSystem& sys,
                                  std::vector<LevelSetInterval> intervals, double gamma,
                                  CandidateScheme scheme, const ClassifyOptions& opts) {
  RankedIntervals out;
  if (intervals.empty()) return out;
  const SvdMode mode = auto_svd_mode(sys);

  // Endpoint data, once per crossing index.
  std::vector<EndpointData> ends;
  std::vector<double> end_points;
  if (scheme == CandidateScheme::Cubic) {
    int max_index = 0;
    for (const auto& iv : intervals) max_index = std::max({max_index, iv.lo_index, iv.hi_index});
    ends.resize(max_index + 1);
    end_points.assign(max_index + 1, 0.0);
    std::vector<char> used(max_index + 1, 0);
    for (const auto& iv : intervals) {
      used[iv.lo_index] = 1;
      used[iv.hi_index] = 1;
      end_points[iv.lo_index] = iv.lo;
      if (!iv.wraps) end_points[iv.hi_index] = iv.hi;
    }
    const bool from_eig = opts.endpoint_slopes_from_eigvecs && opts.crossings != nullptr;
    parallel_for(ends.size(), opts.threads, [&](std::size_t i) {
      if (!used[i]) return;
      EndpointData& e = ends[i];
      try {
        if (from_eig) {
          e.value = gamma;
          e.slope = derivative_from_eigenvector((*opts.crossings)[i], sys);
        } else {
          const TransferSample s = eval_transfer(sys, end_points[i], mode);
          e.counted = true;
          e.value = s.gain();
          e.slope = gain_first_derivative(s, sys);
        }
      } catch (const Error& err) {
        e.warning = std::string("endpoint data unavailable, using midpoint: ") + err.what();
        e.slope.reset();
      }
      e.evaluated = true;
    });
    for (const auto& e : ends) {
      if (e.counted) ++out.gain_evals;
      if (!e.warning.empty()) out.warnings.push_back(e.warning);
    }
  }

  for (auto& iv : intervals) {
    iv.scheme = CandidateScheme::Midpoint;
    iv.candidate = 0.5 * (iv.lo + iv.hi);
    if (scheme != CandidateScheme::Cubic) continue;
    const EndpointData& a = ends[iv.lo_index];
    const EndpointData& b = ends[iv.hi_index];
    if (!a.slope || !b.slope) continue;
    const CubicInterpolant c = fit_cubic(iv.width(), a.value, b.value, *a.slope, *b.slope);
    if (c.degenerate()) continue;
    const double t = cubic_argmax(c);
    if (t > 0.0 && t < iv.width()) {
      iv.candidate = iv.lo + t;
      iv.scheme = CandidateScheme::Cubic;
    }
  }

  std::vector<std::optional<double>> gains(intervals.size());
  std::vector<std::string> errors(intervals.size());
  parallel_for(intervals.size(), opts.threads, [&](std::size_t i) {
    try {
      gains[i] = eval_transfer(sys, intervals[i].candidate, mode).gain();
    } catch (const Error& err) {
      errors[i] = err.what();
    }
  });

  for (std::size_t i = 0; i < intervals.size(); ++i) {
    ++out.gain_evals;
    if (!gains[i]) {
      out.warnings.push_back("interval dropped, candidate evaluation failed: " + errors[i]);
      continue;
    }
    intervals[i].candidate_gain = *gains[i];
    intervals[i].below_curve = *gains[i] >= gamma;
    if (intervals[i].below_curve) out.intervals.push_back(intervals[i]);
  }
  std::stable_sort(out.intervals.begin(), out.intervals.end(),
                   [](const LevelSetInterval& a, const LevelSetInterval& b) {
                     return a.candidate_gain > b.candidate_gain;
                   });
  return out;
}

}  // namespace hinf
