#include "hinf/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hinf/error.hpp"
#include "linalg.hpp"

namespace hinf {

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

RawMatrix RawMatrix::from_dense(Matrix m) {
  RawMatrix r;
  r.rows = static_cast<int>(m.rows());
  r.cols = static_cast<int>(m.cols());
  r.dense = std::move(m);
  return r;
}

RawMatrix RawMatrix::from_triplets(int rows, int cols, std::vector<Triplet> t) {
  RawMatrix r;
  r.rows = rows;
  r.cols = cols;
  r.triplets = std::move(t);
  return r;
}

Matrix RawMatrix::to_dense() const {
  if (dense) return *dense;
  Matrix m = Matrix::Zero(rows, cols);
  for (const auto& t : triplets) m(t.row(), t.col()) += t.value();
  return m;
}

namespace {

SparseMatrix to_sparse_matrix(const RawMatrix& r) {
  SparseMatrix s(r.rows, r.cols);
  if (r.dense) {
    s = r.dense->sparseView();
  } else {
    s.setFromTriplets(r.triplets.begin(), r.triplets.end());
  }
  s.makeCompressed();
  return s;
}

void check_shape(const RawMatrix& mtx, int rows, int cols, const char* name) {
  if (mtx.rows != rows || mtx.cols != cols) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " is " + std::to_string(mtx.rows) + "x" +
                    std::to_string(mtx.cols) + ", expected " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  for (const auto& t : mtx.triplets) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols) {
      throw Error(ErrorCode::DimensionMismatch, std::string(name) + " has an entry out of range");
    }
  }
}

bool all_real(const Matrix& m) { return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0; }

bool all_real(const SparseMatrix& m) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.value().imag() != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

StateSpaceSystem validate_system(const RawMatrix& a, const RawMatrix& b, const RawMatrix& c,
                                 const RawMatrix& d, const std::optional<RawMatrix>& e,
                                 Domain domain, Storage storage) {
  const int n = a.rows;
  const int m = b.cols;
  const int p = c.rows;
  if (n <= 0 || m <= 0 || p <= 0 || a.cols <= 0) {
    throw Error(ErrorCode::EmptySystem, "system dimensions must be positive (n=" +
                                            std::to_string(n) + ", m=" + std::to_string(m) +
                                            ", p=" + std::to_string(p) + ")");
  }
  check_shape(a, n, n, "A");
  check_shape(b, n, m, "B");
  check_shape(c, p, n, "C");
  check_shape(d, p, m, "D");
  if (e) check_shape(*e, n, n, "E");

  StateSpaceSystem sys;
  sys.n_ = n;
  sys.m_ = m;
  sys.p_ = p;
  sys.domain_ = domain;
  sys.storage_ = storage;
  sys.e_identity_ = !e.has_value();
  sys.b_ = b.to_dense();
  sys.c_ = c.to_dense();
  sys.d_ = d.to_dense();
  if (storage == Storage::Dense) {
    sys.a_ = a.to_dense();
    if (e) sys.e_ = e->to_dense();
  } else {
    sys.a_sparse_ = to_sparse_matrix(a);
    if (e) sys.e_sparse_ = to_sparse_matrix(*e);
  }
  sys.finish();
  return sys;
}

StateSpaceSystem make_system(Matrix a, Matrix b, Matrix c, Matrix d, std::optional<Matrix> e,
                             Domain domain) {
  std::optional<RawMatrix> raw_e;
  if (e) raw_e = RawMatrix::from_dense(std::move(*e));
  return validate_system(RawMatrix::from_dense(std::move(a)), RawMatrix::from_dense(std::move(b)),
                         RawMatrix::from_dense(std::move(c)), RawMatrix::from_dense(std::move(d)),
                         raw_e, domain, Storage::Dense);
}

void StateSpaceSystem::finish() {
  real_ = all_real(b_) && all_real(c_) && all_real(d_);
  if (storage_ == Storage::Dense) {
    real_ = real_ && all_real(a_) && (e_identity_ || all_real(e_));
  } else {
    real_ = real_ && all_real(a_sparse_) && (e_identity_ || all_real(e_sparse_));
  }
  norm_d_ = detail::spectral_norm(d_);
}

Matrix StateSpaceSystem::E() const {
  if (e_identity_) return Matrix::Identity(n_, n_);
  if (storage_ == Storage::Sparse) return Matrix(e_sparse_);
  return e_;
}

SparseMatrix StateSpaceSystem::E_sparse() const {
  if (e_identity_) {
    SparseMatrix id(n_, n_);
    id.setIdentity();
    return id;
  }
  if (storage_ == Storage::Dense) return e_.sparseView();
  return e_sparse_;
}

Matrix StateSpaceSystem::apply_E(const Matrix& x) const {
  if (e_identity_) return x;
  if (storage_ == Storage::Sparse) return e_sparse_ * x;
  return e_ * x;
}

Matrix StateSpaceSystem::apply_E_adjoint(const Matrix& x) const {
  if (e_identity_) return x;
  if (storage_ == Storage::Sparse) return e_sparse_.adjoint() * x;
  return e_.adjoint() * x;
}

StateSpaceSystem StateSpaceSystem::to_dense() const {
  if (storage_ == Storage::Dense) return *this;
  StateSpaceSystem out = *this;
  out.storage_ = Storage::Dense;
  out.a_ = Matrix(a_sparse_);
  if (!e_identity_) out.e_ = Matrix(e_sparse_);
  out.a_sparse_ = SparseMatrix();
  out.e_sparse_ = SparseMatrix();
  return out;
}

StateSpaceSystem StateSpaceSystem::to_sparse() const {
  if (storage_ == Storage::Sparse) return *this;
  StateSpaceSystem out = *this;
  out.storage_ = Storage::Sparse;
  out.a_sparse_ = a_.sparseView();
  out.a_sparse_.makeCompressed();
  if (!e_identity_) {
    out.e_sparse_ = e_.sparseView();
    out.e_sparse_.makeCompressed();
  }
  out.a_ = Matrix();
  out.e_ = Matrix();
  return out;
}

std::vector<SpectrumPoint> filter_spectrum(const StateSpaceSystem& input, double tol_ctrb) {
  const StateSpaceSystem sys = input.to_dense();
  const detail::EigenDecomposition eig =
      sys.e_is_identity() ? detail::standard_eigen(sys.A(), true, true)
                          : detail::generalized_eigen(sys.A(), sys.E(), true, true);

  const double ctrb_scale = tol_ctrb * std::max(1.0, sys.B().norm());
  const double obsv_scale = tol_ctrb * std::max(1.0, sys.C().norm());

  std::vector<SpectrumPoint> out;
  out.reserve(eig.alpha.size());
  for (Eigen::Index k = 0; k < eig.alpha.size(); ++k) {
    SpectrumPoint pt;
    const cd alpha = eig.alpha(k);
    const cd beta = eig.beta(k);
    pt.finite = std::abs(beta) > 1e-12 * std::max(1.0, std::abs(alpha));
    pt.eigenvalue = pt.finite ? alpha / beta : cd(std::numeric_limits<double>::infinity(), 0.0);

    Vector x = eig.right.col(k);
    Vector y = eig.left.col(k);
    if (x.norm() > 0) x /= x.norm();
    if (y.norm() > 0) y /= y.norm();
    pt.right_vec_norm_Cx = (sys.C() * x).norm();
    pt.left_vec_norm_By = (sys.B().adjoint() * y).norm();
    pt.controllable = pt.left_vec_norm_By > ctrb_scale;
    pt.observable = pt.right_vec_norm_Cx > obsv_scale;
    out.push_back(pt);
  }
  return out;
}

namespace {

bool same_frequency(Domain domain, double a, double b) {
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  if (domain == Domain::Discrete) {
    const double d = std::abs(a - b);
    return std::min(d, kTwoPi - d) <= tol;
  }
  return std::abs(a - b) <= tol;
}

void push_unique(std::vector<Frequency>& out, Domain domain, const Frequency& f) {
  for (const auto& g : out) {
    if (g.at_infinity() == f.at_infinity() && same_frequency(domain, g.value(), f.value())) return;
  }
  out.push_back(f);
}

/// Admissible points ordered rightmost-first (continuous, ties toward larger
/// imaginary part) or largest-modulus-first (discrete, ties toward larger
/// angle).
std::vector<SpectrumPoint> rank_admissible(Domain domain, const std::vector<SpectrumPoint>& pts) {
  std::vector<SpectrumPoint> adm;
  for (const auto& p : pts) {
    if (p.admissible()) adm.push_back(p);
  }
  auto key = [domain](const SpectrumPoint& p) {
    return domain == Domain::Continuous ? p.eigenvalue.real() : std::abs(p.eigenvalue);
  };
  auto tie = [domain](const SpectrumPoint& p) {
    return domain == Domain::Continuous ? p.eigenvalue.imag() : wrap_angle(std::arg(p.eigenvalue));
  };
  std::stable_sort(adm.begin(), adm.end(), [&](const SpectrumPoint& a, const SpectrumPoint& b) {
    const double ka = key(a), kb = key(b);
    if (std::abs(ka - kb) > 1e-12 * std::max(1.0, std::max(std::abs(ka), std::abs(kb)))) {
      return ka > kb;
    }
    return tie(a) > tie(b);
  });
  return adm;
}

Frequency frequency_of(Domain domain, cd lambda) {
  return domain == Domain::Continuous ? Frequency::continuous(lambda.imag())
                                      : Frequency::discrete(std::arg(lambda));
}

}  // namespace

std::vector<Frequency> initial_frequencies(const StateSpaceSystem& sys,
                                           const std::vector<SpectrumPoint>& spectrum,
                                           const std::vector<Frequency>& extra_seeds) {
  const Domain domain = sys.domain();
  std::vector<Frequency> out;
  push_unique(out, domain, Frequency::make(domain, 0.0));
  if (domain == Domain::Discrete) push_unique(out, domain, Frequency::discrete(kPi));

  const auto ranked = rank_admissible(domain, spectrum);
  if (!ranked.empty()) push_unique(out, domain, frequency_of(domain, ranked.front().eigenvalue));

  for (const auto& f : extra_seeds) {
    push_unique(out, domain, f.at_infinity() ? f : Frequency::make(domain, f.value()));
  }
  return out;
}

std::vector<Frequency> spectrum_frequencies(const StateSpaceSystem& sys,
                                            const std::vector<SpectrumPoint>& spectrum,
                                            int count) {
  const Domain domain = sys.domain();
  std::vector<Frequency> out;
  for (const auto& p : rank_admissible(domain, spectrum)) {
    if (static_cast<int>(out.size()) >= count) break;
    push_unique(out, domain, frequency_of(domain, p.eigenvalue));
  }
  return out;
}

}  // namespace hinf
