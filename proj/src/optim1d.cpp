#include "hinf/optim1d.hpp"

#include <algorithm>
#include <cmath>

#include "hinf/error.hpp"
#include "hinf/transfer.hpp"

namespace hinf {

OptMethod resolve_method(const StateSpaceSystem& sys, const OptimizerConfig& cfg) {
  if (cfg.method != OptMethod::Auto) return cfg.method;
  return std::min(sys.m(), sys.p()) <= cfg.dims_threshold ? OptMethod::Newton : OptMethod::Secant;
}

GainFunction system_gain_function(const StateSpaceSystem& sys) {
  return [&sys](double x, bool want_second) {
    const SvdMode mode = want_second ? SvdMode::Full : auto_svd_mode(sys);
    const TransferSample s = eval_transfer(sys, x, mode);
    const GainDerivatives d = gain_derivatives(s, sys, want_second);
    return GainEval{d.value, d.first, d.second};
  };
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool recoverable(ErrorCode code) {
  return code == ErrorCode::NonSimpleSingularValue || code == ErrorCode::DegenerateSpectrum ||
         code == ErrorCode::SingularShift;
}

struct Probe {
  double x = 0.0;
  GainEval eval;
};

class Ascent {
 public:
  Ascent(const GainFunction& f, const SearchBox& box, OptMethod method, LocalMaximum& out)
      : f_(f), box_(box), want_second_(method == OptMethod::Newton), out_(out) {}

  /// Evaluates at x; on a recoverable failure retries once at x nudged by
  /// 1e-10 * max(1, |x|) in direction dir.
  std::optional<Probe> evaluate(double x, double dir) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        ++out_.gain_evals;
        return Probe{x, f_(x, want_second_)};
      } catch (const Error& e) {
        if (!recoverable(e.code())) throw;
        out_.warnings.push_back(std::string("perturbing iterate: ") + e.what());
        const double nudged = x + dir * 1e-10 * std::max(1.0, std::abs(x));
        x = std::clamp(nudged, box_.lo, box_.hi);
      }
    }
    return std::nullopt;
  }

 private:
  const GainFunction& f_;
  SearchBox box_;
  bool want_second_;
  LocalMaximum& out_;
};

}  // namespace

LocalMaximum maximize(const GainFunction& f, const SearchBox& box, double x0, OptMethod method,
                      const OptimizerConfig& cfg, Domain domain, double max_step) {
  if (!(box.lo <= box.hi) || !std::isfinite(x0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid search box or start point");
  }
  if (method == OptMethod::Auto) method = OptMethod::Newton;
  LocalMaximum out;
  Ascent ascent(f, box, method, out);

  x0 = std::clamp(x0, box.lo, box.hi);
  auto start = ascent.evaluate(x0, x0 >= box.hi ? -1.0 : 1.0);
  if (!start) {
    throw Error(ErrorCode::NonSimpleSingularValue,
                "start point " + std::to_string(x0) + " is unusable");
  }
  Probe cur = *start;
  std::optional<Probe> prev;
  out.trace_points.push_back(cur.x);
  out.trace_gains.push_back(cur.eval.value);

  // Bracket [a, b] known to contain a local maximizer; it always holds cur.x.
  double a = box.lo;
  double b = box.hi;
  bool probed_lo = false;
  bool probed_hi = false;
  double last_step = 0.0;
  // Consecutive trials without a strict gain increase: the gain has reached
  // its rounding floor.
  int stalled = 0;
  constexpr int kMaxStall = 3;

  bool done = false;
  while (out.iterations < cfg.max_iters) {
    const double x = cur.x;
    const double g = cur.eval.value;
    const double d = cur.eval.first;
    if (std::abs(d) <= cfg.opt_tol * std::max(1.0, g)) {
      done = true;
      break;
    }
    const double dir = d > 0.0 ? 1.0 : -1.0;
    if (dir > 0.0) {
      a = std::max(a, x);
    } else {
      b = std::min(b, x);
    }
    if ((dir > 0.0 && x >= box.hi) || (dir < 0.0 && x <= box.lo)) {
      out.at_box_edge = true;
      done = true;
      break;
    }
    const double far = dir > 0.0 ? b : a;
    const double resolution = 4.0 * kEps * std::max(1.0, std::abs(x));
    if (std::abs(far - x) <= resolution) {
      done = true;
      break;
    }

    std::optional<double> curv;
    if (method == OptMethod::Newton && cur.eval.second) {
      if (*cur.eval.second < 0.0) curv = *cur.eval.second;
    } else if (prev && prev->x != x) {
      const double c = (d - prev->eval.first) / (x - prev->x);
      if (std::isfinite(c) && c < 0.0) curv = c;
    }

    double y = std::numeric_limits<double>::quiet_NaN();
    if (stalled >= kMaxStall) {
      done = true;
      break;
    }
    if (curv) {
      double s = -d / *curv;
      if (std::abs(s) > max_step) s = std::copysign(max_step, s);
      y = x + s;
    } else if (method == OptMethod::Secant && !prev) {
      y = x + dir * std::min(max_step, cfg.secant_h0 * std::max(1.0, std::abs(x)));
    }

    if (!(y > a && y < b)) {
      if (dir > 0.0) {
        if (std::isfinite(b)) {
          if (b == box.hi && !probed_hi) {
            y = b;
            probed_hi = true;
          } else {
            y = 0.5 * (x + b);
          }
        } else {
          y = x + std::min(max_step, std::max(0.1 * (1.0 + std::abs(x)), 2.0 * std::abs(last_step)));
        }
      } else {
        if (std::isfinite(a)) {
          if (a == box.lo && !probed_lo) {
            y = a;
            probed_lo = true;
          } else {
            y = 0.5 * (x + a);
          }
        } else {
          y = x - std::min(max_step, std::max(0.1 * (1.0 + std::abs(x)), 2.0 * std::abs(last_step)));
        }
      }
    }
    if (std::abs(y - x) <= 0.5 * resolution) {
      done = true;
      break;
    }

    ++out.iterations;
    auto trial = ascent.evaluate(y, y > x ? -1.0 : 1.0);
    if (!trial) {
      (y > x ? b : a) = y;
      continue;
    }
    last_step = trial->x - x;
    stalled = trial->eval.value > g ? 0 : stalled + 1;
    if (trial->eval.value >= g) {
      prev = cur;
      cur = *trial;
      out.trace_points.push_back(cur.x);
      out.trace_gains.push_back(cur.eval.value);
    } else {
      prev = *trial;
      (trial->x > x ? b : a) = trial->x;
    }
  }

  out.converged = done;
  if (!done) out.warnings.push_back("MaxItersExceeded: returning best iterate");
  out.point = cur.x;
  out.gain = cur.eval.value;
  out.frequency = Frequency::make(domain, cur.x);
  return out;
}

LocalMaximum maximize_boxed(const StateSpaceSystem& sys, double lo, double hi, double x0,
                            const OptimizerConfig& cfg) {
  const GainFunction f = system_gain_function(sys);
  return maximize(f, SearchBox{lo, hi}, x0, resolve_method(sys, cfg), cfg, sys.domain());
}

LocalMaximum maximize_unconstrained(const StateSpaceSystem& sys, double x0,
                                    const OptimizerConfig& cfg) {
  const GainFunction f = system_gain_function(sys);
  double cap = 10.0 * (1.0 + std::abs(x0));
  if (sys.domain() == Domain::Discrete) cap = std::min(cap, kPi);
  LocalMaximum out = maximize(f, SearchBox{}, x0, resolve_method(sys, cfg), cfg, sys.domain(), cap);
  if (sys.domain() == Domain::Discrete) out.point = wrap_angle(out.point);
  return out;
}

}  // namespace hinf
