#pragma once

#include <memory>
#include <optional>

#include "hinf/system.hpp"

namespace hinf {

namespace detail {
class ShiftFactorization;
}

enum class SvdMode { Full, LargestOnly };

/// Full SVD when min(m, p) <= threshold, otherwise the iterative largest
/// singular triplet only.
SvdMode auto_svd_mode(const StateSpaceSystem& sys, int threshold = 64);

/// G evaluated at one frequency together with its SVD and the factorization
/// of Z = s E - A (s = i*omega or e^{i*theta}). Immutable once built; the
/// factorization is shared read-only by the derivative routines.
class TransferSample {
 public:
  /// Frequency as passed in (unreduced, so unwrapped discrete intervals keep
  /// their coordinates).
  double point() const { return point_; }
  Frequency frequency() const { return Frequency::make(domain_, point_); }
  Domain domain() const { return domain_; }
  cd shift() const { return shift_; }

  const Matrix& G() const { return g_; }
  const Eigen::VectorXd& singular_values() const { return sigma_; }
  /// Left/right singular vectors: all columns for SvdMode::Full, only the
  /// first for SvdMode::LargestOnly.
  const Matrix& U() const { return u_; }
  const Matrix& V() const { return v_; }
  SvdMode svd_mode() const { return mode_; }

  double gain() const { return sigma_(0); }

  /// sigma_1 - sigma_2 >= 1e-12 * max(1, sigma_1) (trivially true when
  /// min(m, p) = 1).
  bool largest_is_simple() const;
  /// All consecutive singular value gaps above the same threshold.
  bool all_distinct() const;

  int factorization_count() const;
  int solve_count() const;

 private:
  friend TransferSample eval_transfer(const StateSpaceSystem&, double, SvdMode);
  friend double gain_first_derivative(const TransferSample&, const StateSpaceSystem&);
  friend struct DerivativeChain;

  Domain domain_ = Domain::Continuous;
  double point_ = 0.0;
  cd shift_;
  Matrix g_;
  Eigen::VectorXd sigma_;
  Matrix u_, v_;
  SvdMode mode_ = SvdMode::Full;
  bool adjoint_side_ = false;
  // Z^{-1} B (m <= p) or Z^{-*} C^* (m > p).
  Matrix chain_;
  std::shared_ptr<const detail::ShiftFactorization> factorization_;
};

struct GainDerivatives {
  double value = 0.0;
  double first = 0.0;
  std::optional<double> second;
  bool simple = false;
};

/// Throws Error{SingularShift} when Z cannot be factored at this frequency.
TransferSample eval_transfer(const StateSpaceSystem& sys, double freq, SvdMode mode);
TransferSample eval_transfer(const StateSpaceSystem& sys, const Frequency& freq, SvdMode mode);

/// g'(freq) = Re(u_1^* G'(freq) v_1), one extra solve with the stored
/// factorization. Throws Error{NonSimpleSingularValue} if sigma_1 is not
/// simple.
double gain_first_derivative(const TransferSample& sample, const StateSpaceSystem& sys);

/// g''(freq) from the second-derivative formula for the largest eigenvalue
/// of the Hermitian embedding [0 G; G^* 0], with its eigenpairs assembled
/// from the full SVD rather than forming the embedding. Costs two blocks of
/// min(m, p) solves. Throws Error{DegenerateSpectrum} when the singular values
/// are not pairwise separated or the SVD is not full.
double gain_second_derivative(const TransferSample& sample, const StateSpaceSystem& sys);

/// Value, first derivative and (when requested and well defined) the second
/// derivative. Degenerate spectra leave `second` empty instead of throwing;
/// a non-simple sigma_1 still throws.
GainDerivatives gain_derivatives(const TransferSample& sample, const StateSpaceSystem& sys,
                                 bool want_second);

/// ||G(freq)||_2.
double gain_at(const StateSpaceSystem& sys, double freq);

}  // namespace hinf
