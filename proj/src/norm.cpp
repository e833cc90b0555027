#include "hinf/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hinf/error.hpp"
#include "hinf/parallel.hpp"
#include "hinf/transfer.hpp"

namespace hinf {

namespace {

struct VariantName {
  Variant variant;
  std::string_view name;
};

constexpr std::array<VariantName, 7> kVariantNames = {{
    {Variant::BBBS, "bbbs"},
    {Variant::Cubic, "cubic"},
    {Variant::HybridNewtonInterp, "hybrid-newton-interp"},
    {Variant::HybridNewtonMP, "hybrid-newton-mp"},
    {Variant::HybridSecantInterp, "hybrid-secant-interp"},
    {Variant::HybridSecantMP, "hybrid-secant-mp"},
    {Variant::LocalOnly, "local-only"},
}};

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& vn : kVariantNames) {
    if (vn.variant == v) return vn.name;
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (const auto& vn : kVariantNames) {
    if (vn.name == name) return vn.variant;
  }
  return std::nullopt;
}

bool is_hybrid(Variant v) {
  return v == Variant::HybridNewtonInterp || v == Variant::HybridNewtonMP ||
         v == Variant::HybridSecantInterp || v == Variant::HybridSecantMP;
}

CandidateScheme scheme_of(Variant v) {
  return (v == Variant::BBBS || v == Variant::HybridNewtonMP || v == Variant::HybridSecantMP)
             ? CandidateScheme::Midpoint
             : CandidateScheme::Cubic;
}

namespace {

OptimizerConfig optimizer_for(const AlgoConfig& cfg) {
  OptimizerConfig oc = cfg.optimizer;
  if (cfg.variant == Variant::HybridNewtonInterp || cfg.variant == Variant::HybridNewtonMP) {
    oc.method = OptMethod::Newton;
  } else if (cfg.variant == Variant::HybridSecantInterp ||
             cfg.variant == Variant::HybridSecantMP) {
    oc.method = OptMethod::Secant;
  }
  return oc;
}

/// Running maximum of the gain with its frequency.
struct Best {
  double gamma = -1.0;
  Frequency frequency;

  bool offer(double g, const Frequency& f) {
    if (g > gamma) {
      gamma = g;
      frequency = f;
      return true;
    }
    return false;
  }
};

struct SeedGain {
  Frequency frequency;
  double gain = 0.0;
};

/// Gain at every finite seed, sorted descending. Seeds at poles are skipped.
std::vector<SeedGain> evaluate_seeds(const StateSpaceSystem& sys,
                                     const std::vector<Frequency>& seeds, int threads,
                                     NormResult& res) {
  std::vector<std::optional<double>> gains(seeds.size());
  std::vector<std::string> errors(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    if (seeds[i].at_infinity()) return;
    try {
      gains[i] = gain_at(sys, seeds[i].value());
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  std::vector<SeedGain> out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i].at_infinity()) continue;
    ++res.gain_eval_count;
    if (gains[i]) {
      out.push_back({seeds[i], *gains[i]});
    } else {
      res.warnings.push_back("seed skipped: " + errors[i]);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SeedGain& a, const SeedGain& b) { return a.gain > b.gain; });
  return out;
}

/// Unconstrained local maximization from the top phi seeds.
void optimize_seeds(const StateSpaceSystem& sys, const std::vector<SeedGain>& seeds, int phi,
                    const OptimizerConfig& oc, int threads, Best& best, NormResult& res) {
  const std::size_t count = std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(phi));
  std::vector<std::optional<LocalMaximum>> runs(count);
  std::vector<std::string> errors(count);
  parallel_for(count, threads, [&](std::size_t i) {
    try {
      runs[i] = maximize_unconstrained(sys, seeds[i].frequency.value(), oc);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < count; ++i) {
    if (!runs[i]) {
      res.warnings.push_back("seed optimization failed: " + errors[i]);
      continue;
    }
    res.gain_eval_count += runs[i]->gain_evals;
    if (!runs[i]->converged) res.warnings.push_back("seed optimization hit its iteration cap");
    best.offer(runs[i]->gain, runs[i]->frequency);
  }
}

/// Last-resort probes when every seed gives zero gain.
void probe_zero_gain(const StateSpaceSystem& sys, Best& best, NormResult& res) {
  const std::vector<double> pts = sys.domain() == Domain::Continuous
                                      ? std::vector<double>{0.1, 0.5, 1.0, 2.0, 10.0, 100.0}
                                      : std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  for (double w : pts) {
    ++res.gain_eval_count;
    try {
      best.offer(gain_at(sys, w), Frequency::make(sys.domain(), w));
    } catch (const Error&) {
    }
  }
}

/// A finite-frequency gain within rounding of ||D|| (G == D when B or C is
/// zero) is reported at infinity with the exact ||D||.
void apply_infinity_fallback(const StateSpaceSystem& sys, Best& best) {
  constexpr double kSlack = 8.0 * std::numeric_limits<double>::epsilon();
  if (sys.domain() == Domain::Continuous && best.gamma <= sys.norm_D() * (1.0 + kSlack)) {
    best.gamma = sys.norm_D();
    best.frequency = Frequency::infinity();
  }
}

}  // namespace

LevelCheck verify_level(const StateSpaceSystem& sys, double gamma, const AlgoConfig& cfg,
                        bool want_eigvecs) {
  LevelCheck out;
  out.level = gamma * (1.0 + cfg.level_bump);
  constexpr int kRetries = 5;
  for (int attempt = 0;; ++attempt) {
    try {
      const PencilPair pencil = build_pencil(sys, out.level);
      out.crossings = boundary_eigenvalues(pencil, cfg.band_tol, want_eigvecs);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GammaNearSingularValueOfD || attempt >= kRetries ||
          !(out.level > 0.0)) {
        throw;
      }
      out.level *= 1.0 + 1e-8;
    }
  }
  out.status = out.crossings.empty() ? LevelStatus::NoCrossings : LevelStatus::Crossings;
  return out;
}

NormResult hinf_norm(const StateSpaceSystem& input, const AlgoConfig& cfg) {
  if (cfg.variant == Variant::LocalOnly) return hinf_approx_local(input, cfg);
  if (cfg.phi < 1) throw Error(ErrorCode::InvalidArgument, "phi must be at least 1");

  NormResult res;
  res.variant = cfg.variant;
  if (input.storage() == Storage::Sparse) {
    res.warnings.push_back("sparse input densified for the level-set eigensolves");
  }
  const StateSpaceSystem sys = input.to_dense();
  const OptimizerConfig oc = optimizer_for(cfg);
  const bool hybrid = is_hybrid(cfg.variant);
  const CandidateScheme scheme = scheme_of(cfg.variant);

  const auto spectrum = filter_spectrum(sys, cfg.tol_ctrb);
  const auto seed_freqs = initial_frequencies(sys, spectrum, cfg.seeds);
  const auto seeds = evaluate_seeds(sys, seed_freqs, cfg.threads, res);

  Best best;
  for (const auto& s : seeds) best.offer(s.gain, s.frequency);
  if (hybrid) optimize_seeds(sys, seeds, cfg.phi, oc, cfg.threads, best, res);
  if (!(best.gamma > 0.0)) probe_zero_gain(sys, best, res);
  apply_infinity_fallback(sys, best);
  if (!(best.gamma > 0.0)) {
    res.warnings.push_back("gain is zero at every probe; no level set to examine");
    res.gamma = std::max(0.0, best.gamma);
    res.frequency = best.frequency;
    res.converged = true;
    res.history.push_back({0, res.gamma});
    return res;
  }
  res.history.push_back({0, best.gamma});

  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    res.iterations = iter;
    const LevelCheck check = verify_level(sys, best.gamma, cfg, cfg.eigvec_slopes);
    ++res.pencil_eig_count;
    if (check.status == LevelStatus::NoCrossings) {
      res.certified_global = true;
      res.converged = true;
      break;
    }
    const auto intervals = build_intervals(check.crossings, sys.domain());
    if (intervals.empty()) {
      res.warnings.push_back("isolated crossing at the verification level; stopping uncertified");
      res.converged = true;
      break;
    }
    ClassifyOptions copts;
    copts.threads = cfg.threads;
    if (cfg.eigvec_slopes) {
      copts.crossings = &check.crossings;
      copts.endpoint_slopes_from_eigvecs = true;
    }
    RankedIntervals ranked = classify_and_rank(sys, intervals, check.level, scheme, copts);
    res.gain_eval_count += ranked.gain_evals;
    for (auto& w : ranked.warnings) res.warnings.push_back(std::move(w));
    if (ranked.intervals.empty()) {
      res.warnings.push_back("no interval rises above the verification level; stopping uncertified");
      res.converged = true;
      break;
    }

    const double before = best.gamma;
    for (const auto& iv : ranked.intervals) best.offer(iv.candidate_gain, iv.candidate_frequency());

    if (hybrid) {
      const std::size_t count =
          std::min<std::size_t>(ranked.intervals.size(), static_cast<std::size_t>(cfg.phi));
      std::vector<std::optional<LocalMaximum>> runs(count);
      std::vector<std::string> errors(count);
      parallel_for(count, cfg.threads, [&](std::size_t i) {
        const LevelSetInterval& iv = ranked.intervals[i];
        try {
          runs[i] = maximize_boxed(sys, iv.lo, iv.hi, iv.candidate, oc);
        } catch (const Error& e) {
          errors[i] = e.what();
        }
      });
      for (std::size_t i = 0; i < count; ++i) {
        if (!runs[i]) {
          res.warnings.push_back("interval optimization failed: " + errors[i]);
          continue;
        }
        res.gain_eval_count += runs[i]->gain_evals;
        if (!runs[i]->converged) res.warnings.push_back("interval optimization hit its iteration cap");
        best.offer(runs[i]->gain, runs[i]->frequency);
      }
    }

    if (best.gamma > before) res.history.push_back({iter, best.gamma});
  }
  if (!res.converged) {
    res.warnings.push_back("NotConverged: outer iteration cap reached");
  }

  apply_infinity_fallback(sys, best);
  res.gamma = best.gamma;
  res.frequency = best.frequency;
  return res;
}

NormResult hinf_approx_local(const StateSpaceSystem& sys, const AlgoConfig& cfg) {
  if (cfg.phi < 1) throw Error(ErrorCode::InvalidArgument, "phi must be at least 1");
  NormResult res;
  res.variant = Variant::LocalOnly;
  const Domain domain = sys.domain();

  std::vector<Frequency> seed_freqs;
  auto push = [&](const Frequency& f) {
    const Frequency g = f.at_infinity() ? f : Frequency::make(domain, f.value());
    if (std::find(seed_freqs.begin(), seed_freqs.end(), g) == seed_freqs.end()) {
      seed_freqs.push_back(g);
    }
  };
  for (const auto& f : cfg.seeds) push(f);
  if (cfg.spectrum_seed_count > 0) {
    push(Frequency::make(domain, 0.0));
    if (domain == Domain::Discrete) push(Frequency::discrete(kPi));
    std::vector<SpectrumPoint> spectrum;
    if (sys.storage() == Storage::Sparse) {
      SparseSeedOptions so;
      so.count = cfg.spectrum_seed_count;
      so.tol_ctrb = cfg.tol_ctrb;
      spectrum = sparse_dominant_spectrum(sys, so);
    } else {
      spectrum = filter_spectrum(sys, cfg.tol_ctrb);
    }
    for (const auto& f : spectrum_frequencies(sys, spectrum, cfg.spectrum_seed_count)) push(f);
  }
  std::size_t finite = 0;
  for (const auto& f : seed_freqs) finite += f.at_infinity() ? 0 : 1;
  if (finite == 0) {
    throw Error(ErrorCode::NoSeedsAvailable, "no starting frequencies for local optimization");
  }

  const auto seeds = evaluate_seeds(sys, seed_freqs, cfg.threads, res);
  if (seeds.empty()) {
    throw Error(ErrorCode::NoSeedsAvailable, "every starting frequency failed to evaluate");
  }
  Best best;
  for (const auto& s : seeds) best.offer(s.gain, s.frequency);
  const int phi = std::min<int>(cfg.phi, static_cast<int>(seeds.size()));
  optimize_seeds(sys, seeds, phi, optimizer_for(cfg), cfg.threads, best, res);
  apply_infinity_fallback(sys, best);

  res.gamma = best.gamma;
  res.frequency = best.frequency;
  res.iterations = phi;
  res.converged = true;
  res.certified_global = false;
  res.history.push_back({0, best.gamma});
  return res;
}

}  // namespace hinf
