#pragma once

#include <optional>
#include <vector>

#include "hinf/system.hpp"

namespace hinf {

inline constexpr double kDefaultBandTol = 1e-8;

/// Level-set pencil (left, right) at level gamma.
///
/// Continuous: left = [A~, -g B R^-1 B^*; g C^* S^-1 C, -A~^*], right = blkdiag(E, E^*).
/// Discrete:   left = [A~, -g B R^-1 B^*; 0, E^*], right = [E, 0; -g C^* S^-1 C, A~^*].
/// Here A~ = A - B R^-1 D^* C, R = D^* D - g^2 I and S = D D^* - g^2 I.
struct PencilPair {
  Matrix left;
  Matrix right;
  double gamma = 0.0;
  Domain domain = Domain::Continuous;
  double r_min_sv = 0.0;
  double s_min_sv = 0.0;
  /// True when right is the identity (continuous, E = I); the eigensolve then
  /// skips QZ.
  bool right_is_identity = false;
};

/// Relative guard on sigma_min(R) and sigma_min(S), measured against gamma^2.
inline constexpr double kGammaGuard = 1e-10;

/// Throws Error{GammaNearSingularValueOfD} if gamma <= 0 or gamma is too
/// close to a singular value of D.
PencilPair build_pencil(const StateSpaceSystem& sys, double gamma);

struct BoundaryCrossing {
  Frequency frequency;
  cd raw_eigenvalue;
  double distance_to_boundary = 0.0;
  double gamma = 0.0;
  Domain domain = Domain::Continuous;
  std::optional<Vector> eigvec_q;
  std::optional<Vector> eigvec_s;
};

/// Eigenvalues within band_tol of the imaginary axis (|Re l|) or unit circle
/// (||l| - 1|), mapped to frequencies, merged when closer than
/// 1e-10 * max(1, span) and sorted ascending. An empty list is a valid result.
std::vector<BoundaryCrossing> boundary_eigenvalues(const PencilPair& pencil, double band_tol,
                                                   bool want_eigvecs);

/// g'(crossing frequency) from the pencil eigenvector halves (q, s), with no
/// transfer-function solve. Throws Error{MissingEigenvectors}.
double derivative_from_eigenvector(const BoundaryCrossing& crossing, const StateSpaceSystem& sys);

}  // namespace hinf
