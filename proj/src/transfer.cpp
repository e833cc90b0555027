#include "hinf/transfer.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <variant>

#include <Eigen/SparseLU>

#include "hinf/error.hpp"

namespace hinf {

namespace detail {

/// LU of Z = s E - A, dense or sparse. Counts factorizations and right-hand
/// sides so callers can check reuse.
class ShiftFactorization {
 public:
  ShiftFactorization(const StateSpaceSystem& sys, cd s) {
    if (sys.storage() == Storage::Dense) {
      Matrix z = -sys.A();
      if (sys.e_is_identity()) {
        z.diagonal().array() += s;
      } else {
        z += s * sys.E();
      }
      auto& lu = lu_.emplace<Eigen::PartialPivLU<Matrix>>(z);
      const double rc = lu.rcond();
      if (!(rc > std::numeric_limits<double>::epsilon())) {
        throw Error(ErrorCode::SingularShift, "s E - A is singular (rcond=" +
                                                  std::to_string(rc) + ")");
      }
    } else {
      SparseMatrix z = s * sys.E_sparse() - sys.A_sparse();
      z.makeCompressed();
      auto& lu = lu_.emplace<SparseLU>();
      lu.compute(z);
      if (lu.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularShift, "sparse LU of s E - A failed: " + lu.lastErrorMessage());
      }
    }
    ++factorizations_;
  }

  Matrix solve(const Matrix& rhs) const {
    solves_ += static_cast<int>(rhs.cols());
    Matrix x = std::visit(
        [&](const auto& lu) -> Matrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(lu)>, std::monostate>) {
            return Matrix();
          } else {
            return lu.solve(rhs);
          }
        },
        lu_);
    return check(std::move(x));
  }

  Matrix solve_adjoint(const Matrix& rhs) const {
    solves_ += static_cast<int>(rhs.cols());
    Matrix x = std::visit(
        [&](auto& lu) -> Matrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(lu)>, std::monostate>) {
            return Matrix();
          } else {
            return lu.adjoint().solve(rhs);
          }
        },
        lu_);
    return check(std::move(x));
  }

  int factorizations() const { return factorizations_; }
  int solves() const { return solves_; }

 private:
  using SparseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

  static Matrix check(Matrix x) {
    if (!x.allFinite()) throw Error(ErrorCode::SingularShift, "non-finite solve result");
    return x;
  }

  // SparseLU::adjoint() is non-const although it only builds a view.
  mutable std::variant<std::monostate, Eigen::PartialPivLU<Matrix>, SparseLU> lu_;
  int factorizations_ = 0;
  mutable std::atomic<int> solves_{0};
};

}  // namespace detail

namespace {

constexpr double kSimpleGap = 1e-12;

cd shift_for(Domain domain, double freq) {
  return domain == Domain::Continuous ? cd(0.0, freq) : std::polar(1.0, freq);
}

/// Largest singular triplet by block subspace iteration on G^* G with a
/// Rayleigh-Ritz step. Falls back to a dense SVD if it stalls.
void largest_triplet(const Matrix& g, Eigen::VectorXd& sigma, Matrix& u, Matrix& v) {
  const Eigen::Index r = std::min(g.rows(), g.cols());
  const Eigen::Index block = std::min<Eigen::Index>(8, r);
  Matrix q = Matrix::Zero(g.cols(), block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < g.cols(); ++i) {
      q(i, j) = cd(std::cos(0.7 * (i + 1) * (j + 1)), std::sin(0.3 * (i + 2) * (j + 1)));
    }
  }
  double prev = -1.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::HouseholderQR<Matrix> qr(g.adjoint() * (g * q));
    q = qr.householderQ() * Matrix::Identity(g.cols(), block);
    const Matrix gq = g * q;
    Eigen::JacobiSVD<Matrix> small(gq, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s1 = small.singularValues()(0);
    const Vector vv = q * small.matrixV().col(0);
    const Vector uu = small.matrixU().col(0);
    const double resid = (g.adjoint() * uu - s1 * vv).norm();
    if (resid <= 1e-13 * std::max(s1, std::numeric_limits<double>::min()) ||
        (it > 5 && std::abs(s1 - prev) <= 1e-16 * s1 && resid <= 1e-10 * s1)) {
      sigma = small.singularValues();
      u = uu;
      v = vv;
      return;
    }
    prev = s1;
  }
  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  sigma = svd.singularValues();
  u = svd.matrixU().leftCols(1);
  v = svd.matrixV().leftCols(1);
}

void full_svd(const Matrix& g, Eigen::VectorXd& sigma, Matrix& u, Matrix& v) {
  const int flags = Eigen::ComputeFullU | Eigen::ComputeFullV;
  if (std::min(g.rows(), g.cols()) > 32) {
    Eigen::BDCSVD<Matrix> svd(g, flags);
    sigma = svd.singularValues();
    u = svd.matrixU();
    v = svd.matrixV();
  } else {
    Eigen::JacobiSVD<Matrix> svd(g, flags);
    sigma = svd.singularValues();
    u = svd.matrixU();
    v = svd.matrixV();
  }
}

}  // namespace

SvdMode auto_svd_mode(const StateSpaceSystem& sys, int threshold) {
  return std::min(sys.m(), sys.p()) <= threshold ? SvdMode::Full : SvdMode::LargestOnly;
}

bool TransferSample::largest_is_simple() const {
  if (sigma_(0) <= 0.0) return false;
  if (sigma_.size() < 2) return true;
  return sigma_(0) - sigma_(1) >= kSimpleGap * std::max(1.0, sigma_(0));
}

bool TransferSample::all_distinct() const {
  if (sigma_(0) <= 0.0) return false;
  const double tol = kSimpleGap * std::max(1.0, sigma_(0));
  for (Eigen::Index k = 0; k + 1 < sigma_.size(); ++k) {
    if (sigma_(k) - sigma_(k + 1) < tol) return false;
  }
  return true;
}

int TransferSample::factorization_count() const { return factorization_->factorizations(); }
int TransferSample::solve_count() const { return factorization_->solves(); }

TransferSample eval_transfer(const StateSpaceSystem& sys, double freq, SvdMode mode) {
  if (!std::isfinite(freq)) {
    throw Error(ErrorCode::InvalidArgument, "transfer evaluation needs a finite frequency");
  }
  TransferSample out;
  out.domain_ = sys.domain();
  out.point_ = freq;
  out.shift_ = shift_for(sys.domain(), freq);
  out.mode_ = mode;
  out.factorization_ = std::make_shared<const detail::ShiftFactorization>(sys, out.shift_);

  out.adjoint_side_ = sys.m() > sys.p();
  if (!out.adjoint_side_) {
    out.chain_ = out.factorization_->solve(sys.B());
    out.g_ = sys.C() * out.chain_ + sys.D();
  } else {
    out.chain_ = out.factorization_->solve_adjoint(sys.C().adjoint());
    out.g_ = out.chain_.adjoint() * sys.B() + sys.D();
  }

  if (mode == SvdMode::Full) {
    full_svd(out.g_, out.sigma_, out.u_, out.v_);
  } else {
    largest_triplet(out.g_, out.sigma_, out.u_, out.v_);
  }
  return out;
}

TransferSample eval_transfer(const StateSpaceSystem& sys, const Frequency& freq, SvdMode mode) {
  return eval_transfer(sys, freq.value(), mode);
}

double gain_at(const StateSpaceSystem& sys, double freq) {
  return eval_transfer(sys, freq, SvdMode::LargestOnly).gain();
}

namespace {

/// d/dfreq of Z: Z' = kappa E, with kappa = i (continuous) or i e^{i theta}.
cd kappa_of(const TransferSample& s) {
  return s.domain() == Domain::Continuous ? cd(0.0, 1.0) : cd(0.0, 1.0) * s.shift();
}

/// d kappa / d freq.
cd kappa_prime_of(const TransferSample& s) {
  return s.domain() == Domain::Continuous ? cd(0.0) : -s.shift();
}

}  // namespace

double gain_first_derivative(const TransferSample& sample, const StateSpaceSystem& sys) {
  if (!sample.largest_is_simple()) {
    throw Error(ErrorCode::NonSimpleSingularValue,
                "largest singular value is not simple at frequency " +
                    std::to_string(sample.point()));
  }
  const Vector u1 = sample.u_.col(0);
  const Vector v1 = sample.v_.col(0);
  cd k1;  // u_1^* C Z^{-1} E Z^{-1} B v_1
  if (!sample.adjoint_side_) {
    const Matrix w = sample.factorization_->solve(sys.apply_E(sample.chain_ * v1));
    k1 = (sys.C().adjoint() * u1).dot(w.col(0));
  } else {
    const Matrix r = sample.factorization_->solve_adjoint(sys.apply_E_adjoint(sample.chain_ * u1));
    k1 = r.col(0).dot(sys.B() * v1);
  }
  return std::real(-kappa_of(sample) * k1);
}

/// C Z^{-1} E Z^{-1} B and C Z^{-1} E Z^{-1} E Z^{-1} B from the cached chain.
struct DerivativeChain {
  Matrix k1;
  Matrix k2;

  DerivativeChain(const TransferSample& s, const StateSpaceSystem& sys) {
    const auto& f = *s.factorization_;
    if (!s.adjoint_side_) {
      const Matrix x1 = f.solve(sys.apply_E(s.chain_));
      const Matrix x2 = f.solve(sys.apply_E(x1));
      k1 = sys.C() * x1;
      k2 = sys.C() * x2;
    } else {
      const Matrix y1 = f.solve_adjoint(sys.apply_E_adjoint(s.chain_));
      const Matrix y2 = f.solve_adjoint(sys.apply_E_adjoint(y1));
      k1 = y1.adjoint() * sys.B();
      k2 = y2.adjoint() * sys.B();
    }
  }
};

double gain_second_derivative(const TransferSample& sample, const StateSpaceSystem& sys) {
  if (sample.svd_mode() != SvdMode::Full) {
    throw Error(ErrorCode::DegenerateSpectrum, "second derivative needs the full SVD");
  }
  if (!sample.all_distinct()) {
    throw Error(ErrorCode::DegenerateSpectrum,
                "singular values are not pairwise distinct at frequency " +
                    std::to_string(sample.point()));
  }
  const DerivativeChain chain(sample, sys);
  const cd kappa = kappa_of(sample);
  const Matrix g1 = -kappa * chain.k1;
  const Matrix g2 = -kappa_prime_of(sample) * chain.k1 + 2.0 * kappa * kappa * chain.k2;

  const Matrix& U = sample.U();
  const Matrix& V = sample.V();
  const Eigen::VectorXd& sigma = sample.singular_values();
  const Eigen::Index p = U.rows();
  const Eigen::Index m = V.rows();
  const Eigen::Index r = sigma.size();
  const double s1 = sigma(0);

  // Projections u_i^* G' v_j; only row 0 and column 0 are needed.
  const Vector row0 = (U.col(0).adjoint() * g1 * V).transpose();  // u_1^* G' v_j
  const Vector col0 = U.adjoint() * (g1 * V.col(0));                // u_i^* G' v_1

  double sum = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    // Eigenvalue -sigma_k, eigenvector [u_k; -v_k] / sqrt(2).
    const cd minus = (-row0(k) + std::conj(col0(k))) * 0.5;
    sum += std::norm(minus) / (s1 + sigma(k));
    if (k == 0) continue;
    // Eigenvalue +sigma_k, eigenvector [u_k; v_k] / sqrt(2).
    const cd plus = (row0(k) + std::conj(col0(k))) * 0.5;
    sum += std::norm(plus) / (s1 - sigma(k));
  }
  // Zero eigenvalues from the longer side: [u_k; 0] (p > m) or [0; v_k] (p < m).
  for (Eigen::Index k = r; k < p; ++k) sum += 0.5 * std::norm(col0(k)) / s1;
  for (Eigen::Index k = r; k < m; ++k) sum += 0.5 * std::norm(row0(k)) / s1;

  const cd curvature = U.col(0).dot(g2 * V.col(0));
  return curvature.real() + 2.0 * sum;
}

GainDerivatives gain_derivatives(const TransferSample& sample, const StateSpaceSystem& sys,
                                 bool want_second) {
  GainDerivatives out;
  out.value = sample.gain();
  out.first = gain_first_derivative(sample, sys);
  out.simple = true;
  if (want_second && sample.svd_mode() == SvdMode::Full && sample.all_distinct()) {
    out.second = gain_second_derivative(sample, sys);
  }
  return out;
}

}  // namespace hinf
