#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hinf {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cd, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<cd>;

enum class Domain { Continuous, Discrete };
enum class Storage { Dense, Sparse };

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

/// Reduces an angle into [0, 2*pi).
double wrap_angle(double theta);

/// A point on the imaginary axis (continuous) or the unit circle (discrete).
/// Discrete values are kept reduced into [0, 2*pi); only continuous
/// frequencies can sit at infinity.
class Frequency {
 public:
  Frequency() = default;

  static Frequency continuous(double omega) { return Frequency(omega, false); }
  static Frequency discrete(double theta) { return Frequency(wrap_angle(theta), false); }
  static Frequency infinity() { return Frequency(0.0, true); }
  static Frequency make(Domain domain, double value) {
    return domain == Domain::Discrete ? discrete(value) : continuous(value);
  }

  double value() const { return value_; }
  bool at_infinity() const { return at_infinity_; }

  friend bool operator==(const Frequency&, const Frequency&) = default;

 private:
  Frequency(double v, bool inf) : value_(v), at_infinity_(inf) {}

  double value_ = 0.0;
  bool at_infinity_ = false;
};

/// Dense or sparse matrix input before validation.
struct RawMatrix {
  int rows = 0;
  int cols = 0;
  std::optional<Matrix> dense;
  std::vector<Triplet> triplets;

  static RawMatrix from_dense(Matrix m);
  static RawMatrix from_triplets(int rows, int cols, std::vector<Triplet> t);
  Matrix to_dense() const;
};

/// E x' = A x + B u, y = C x + D u (or the discrete-time analogue).
///
/// A and E are held densely or as compressed sparse matrices according to
/// storage(); B, C and D are always dense. When E is the identity marker no E
/// matrix is stored and every E-product is the identity.
class StateSpaceSystem {
 public:
  StateSpaceSystem() = default;

  int n() const { return n_; }
  int m() const { return m_; }
  int p() const { return p_; }
  Domain domain() const { return domain_; }
  Storage storage() const { return storage_; }
  bool e_is_identity() const { return e_identity_; }

  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }

  /// Dense A and E. Only valid for dense storage.
  const Matrix& A() const { return a_; }
  Matrix E() const;

  /// Sparse A and E. Only valid for sparse storage.
  const SparseMatrix& A_sparse() const { return a_sparse_; }
  SparseMatrix E_sparse() const;

  /// E * x (and E^* x) for either storage.
  Matrix apply_E(const Matrix& x) const;
  Matrix apply_E_adjoint(const Matrix& x) const;

  /// True when every entry of every matrix has zero imaginary part.
  bool is_real() const { return real_; }

  /// Largest singular value of D.
  double norm_D() const { return norm_d_; }

  StateSpaceSystem to_dense() const;
  StateSpaceSystem to_sparse() const;

  friend StateSpaceSystem validate_system(const RawMatrix&, const RawMatrix&, const RawMatrix&,
                                          const RawMatrix&, const std::optional<RawMatrix>&,
                                          Domain, Storage);

 private:
  void finish();

  int n_ = 0, m_ = 0, p_ = 0;
  Domain domain_ = Domain::Continuous;
  Storage storage_ = Storage::Dense;
  bool e_identity_ = true;
  bool real_ = true;
  double norm_d_ = 0.0;
  Matrix a_, e_, b_, c_, d_;
  SparseMatrix a_sparse_, e_sparse_;
};

/// Builds a validated system. Omitted E means the identity marker.
/// Throws Error{DimensionMismatch} or Error{EmptySystem}.
StateSpaceSystem validate_system(const RawMatrix& a, const RawMatrix& b, const RawMatrix& c,
                                 const RawMatrix& d, const std::optional<RawMatrix>& e,
                                 Domain domain, Storage storage = Storage::Dense);

/// Dense convenience overload.
StateSpaceSystem make_system(Matrix a, Matrix b, Matrix c, Matrix d, std::optional<Matrix> e,
                             Domain domain);

struct SpectrumPoint {
  cd eigenvalue;
  double right_vec_norm_Cx = 0.0;
  double left_vec_norm_By = 0.0;
  bool controllable = false;
  bool observable = false;
  bool finite = true;

  bool admissible() const { return finite && controllable && observable; }
};

inline constexpr double kDefaultCtrbTol = 1e-10;

/// All eigenvalues of (A, E) with controllability/observability flags computed
/// from unit-norm left/right eigenvectors. Infinite eigenvalues are reported
/// with finite=false. Dense storage only (sparse systems are densified).
std::vector<SpectrumPoint> filter_spectrum(const StateSpaceSystem& sys,
                                           double tol_ctrb = kDefaultCtrbTol);

/// Constant guesses plus the admissible eigenvalue-derived guess, followed by
/// any caller-supplied extra seeds, with duplicates removed in order.
std::vector<Frequency> initial_frequencies(const StateSpaceSystem& sys,
                                           const std::vector<SpectrumPoint>& spectrum,
                                           const std::vector<Frequency>& extra_seeds = {});

struct SparseSeedOptions {
  int count = 20;
  int krylov_dim = 0;  // 0 picks min(n, 2*count + 20)
  double tol_ctrb = kDefaultCtrbTol;
};

/// Admissible eigenvalues of (A, E) found by shift-invert Arnoldi: those
/// nearest the origin for continuous systems, those of largest modulus for
/// discrete ones. Controllability/observability is checked with Ritz vectors
/// and inverse-iteration left vectors. Returns at most opts.count points.
std::vector<SpectrumPoint> sparse_dominant_spectrum(const StateSpaceSystem& sys,
                                                    const SparseSeedOptions& opts = {});

/// Frequencies (imaginary parts or angles) of the given spectrum points,
/// ranked rightmost-first (continuous) or by modulus (discrete).
std::vector<Frequency> spectrum_frequencies(const StateSpaceSystem& sys,
                                            const std::vector<SpectrumPoint>& spectrum,
                                            int count);

}  // namespace hinf
