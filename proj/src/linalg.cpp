#include "linalg.hpp"

#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "hinf/error.hpp"

namespace hinf::detail {

EigenDecomposition generalized_eigen(Matrix a, Matrix b, bool want_left, bool want_right) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigenDecomposition out;
  out.alpha.resize(n);
  out.beta.resize(n);
  if (want_left) out.left.resize(n, n);
  if (want_right) out.right.resize(n, n);
  cd dummy{};
  const lapack_int info = LAPACKE_zggev(
      LAPACK_COL_MAJOR, want_left ? 'V' : 'N', want_right ? 'V' : 'N', n, a.data(), n, b.data(),
      n, out.alpha.data(), out.beta.data(), want_left ? out.left.data() : &dummy,
      want_left ? n : 1, want_right ? out.right.data() : &dummy, want_right ? n : 1);
  if (info != 0) {
    throw Error(ErrorCode::EigensolveFailure, "zggev returned info=" + std::to_string(info));
  }
  return out;
}

EigenDecomposition standard_eigen(Matrix a, bool want_left, bool want_right) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigenDecomposition out;
  out.alpha.resize(n);
  out.beta = Vector::Ones(n);
  if (want_left) out.left.resize(n, n);
  if (want_right) out.right.resize(n, n);
  cd dummy{};
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, want_left ? 'V' : 'N', want_right ? 'V' : 'N', n, a.data(), n,
      out.alpha.data(), want_left ? out.left.data() : &dummy, want_left ? n : 1,
      want_right ? out.right.data() : &dummy, want_right ? n : 1);
  if (info != 0) {
    throw Error(ErrorCode::EigensolveFailure, "zgeev returned info=" + std::to_string(info));
  }
  return out;
}

namespace {

Eigen::VectorXd singular_values(const Matrix& a) {
  if (std::min(a.rows(), a.cols()) > 32) return Eigen::BDCSVD<Matrix>(a).singularValues();
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

}  // namespace

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double min_singular_value(const Matrix& a) {
  const Eigen::VectorXd s = singular_values(a);
  return s(s.size() - 1);
}

}  // namespace hinf::detail
