#pragma once

#include "hinf/system.hpp"

namespace hinf::detail {

/// Eigenvalues in homogeneous form (alpha, beta), lambda = alpha / beta.
/// Left/right eigenvector columns are filled only when requested.
struct EigenDecomposition {
  Vector alpha;
  Vector beta;
  Matrix left;
  Matrix right;
};

/// Complex QZ (LAPACK zggev) on the pencil (a, b): a x = lambda b x.
EigenDecomposition generalized_eigen(Matrix a, Matrix b, bool want_left, bool want_right);

/// Complex Hessenberg-QR (LAPACK zgeev) on a; beta is all ones.
EigenDecomposition standard_eigen(Matrix a, bool want_left, bool want_right);

/// Largest singular value of a dense matrix (0 for empty input).
double spectral_norm(const Matrix& a);

/// Smallest singular value of a square dense matrix.
double min_singular_value(const Matrix& a);

}  // namespace hinf::detail
