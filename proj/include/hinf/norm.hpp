#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hinf/levelset.hpp"
#include "hinf/optim1d.hpp"
#include "hinf/pencil.hpp"
#include "hinf/system.hpp"

namespace hinf {

enum class Variant {
  BBBS,
  Cubic,
  HybridNewtonInterp,
  HybridNewtonMP,
  HybridSecantInterp,
  HybridSecantMP,
  LocalOnly,
};

inline constexpr std::array<Variant, 6> kExactVariants = {
    Variant::BBBS,           Variant::Cubic,          Variant::HybridNewtonInterp,
    Variant::HybridNewtonMP, Variant::HybridSecantInterp, Variant::HybridSecantMP,
};

/// CLI spelling: bbbs, cubic, hybrid-newton-interp, hybrid-newton-mp,
/// hybrid-secant-interp, hybrid-secant-mp, local-only.
std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

bool is_hybrid(Variant v);
CandidateScheme scheme_of(Variant v);

struct AlgoConfig {
  Variant variant = Variant::HybridNewtonInterp;
  int phi = 1;
  double band_tol = kDefaultBandTol;
  double level_bump = 1e-12;
  OptimizerConfig optimizer;
  double tol_ctrb = kDefaultCtrbTol;
  std::vector<Frequency> seeds;
  int max_outer_iters = 50;
  int threads = 1;
  /// Spectrum-derived seeds for hinf_approx_local (0 disables them together
  /// with the constant guesses, leaving only user seeds).
  int spectrum_seed_count = 20;
  /// Cubic endpoint slopes from pencil eigenvectors instead of transfer solves.
  bool eigvec_slopes = false;
};

struct HistoryEntry {
  int iteration = 0;
  double gamma = 0.0;
};

struct NormResult {
  double gamma = 0.0;
  Frequency frequency;
  bool certified_global = false;
  int iterations = 0;
  int pencil_eig_count = 0;
  int gain_eval_count = 0;
  std::vector<HistoryEntry> history;
  Variant variant = Variant::HybridNewtonInterp;
  /// False when the outer iteration cap was hit.
  bool converged = false;
  std::vector<std::string> warnings;
};

enum class LevelStatus { NoCrossings, Crossings };

struct LevelCheck {
  LevelStatus status = LevelStatus::NoCrossings;
  std::vector<BoundaryCrossing> crossings;
  /// Level actually used: gamma * (1 + level_bump), times (1 + 1e-8) per
  /// retry when it sat on a singular value of D.
  double level = 0.0;
};

/// Pencil eigensolve at the inflated level. The single certification
/// primitive used by hinf_norm.
LevelCheck verify_level(const StateSpaceSystem& sys, double gamma, const AlgoConfig& cfg,
                        bool want_eigvecs = false);

/// Exact H-infinity norm by the configured level-set variant. Sparse input is
/// densified. LocalOnly delegates to hinf_approx_local.
NormResult hinf_norm(const StateSpaceSystem& sys, const AlgoConfig& cfg = {});

/// Best local maximum of the gain from the seed set (no certificate).
/// Throws Error{NoSeedsAvailable} when the seed set is empty.
NormResult hinf_approx_local(const StateSpaceSystem& sys, const AlgoConfig& cfg = {});

}  // namespace hinf
