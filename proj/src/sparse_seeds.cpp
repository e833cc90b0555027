#include <algorithm>
#include <cmath>

#include <Eigen/SparseLU>

#include "hinf/error.hpp"
#include "hinf/system.hpp"

namespace hinf {

namespace {

using SparseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

struct Operator {
  // Applies x -> F^{-1} G x.
  SparseLU lu;
  SparseMatrix g;
  bool ok = false;

  Vector apply(const Vector& x) const { return lu.solve(g * x); }
};

bool factor(SparseLU& lu, const SparseMatrix& m) {
  lu.compute(m);
  return lu.info() == Eigen::Success;
}

/// Arnoldi with full reorthogonalization on a deterministic start vector.
/// Returns the basis V (n x k) and the square Hessenberg block H (k x k).
void arnoldi(const Operator& op, int n, int k, Matrix& basis, Matrix& hess) {
  basis = Matrix::Zero(n, k + 1);
  hess = Matrix::Zero(k + 1, k);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = cd(1.0 + 0.5 * std::sin(1.0 + i), 0.25 * std::cos(3.0 * i));
  basis.col(0) = v / v.norm();
  int built = k;
  for (int j = 0; j < k; ++j) {
    Vector w = op.apply(basis.col(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const cd h = basis.col(i).dot(w);
        hess(i, j) += h;
        w -= h * basis.col(i);
      }
    }
    const double beta = w.norm();
    hess(j + 1, j) = beta;
    if (beta <= 1e-14 * hess.col(j).norm()) {
      built = j + 1;
      break;
    }
    basis.col(j + 1) = w / beta;
  }
  basis = basis.leftCols(built).eval();
  hess = hess.topLeftCorner(built, built).eval();
}

}  // namespace

std::vector<SpectrumPoint> sparse_dominant_spectrum(const StateSpaceSystem& input,
                                                    const SparseSeedOptions& opts) {
  const int n = input.n();
  const int k = opts.krylov_dim > 0 ? std::min(n, opts.krylov_dim)
                                    : std::min(n, 2 * opts.count + 20);
  // Small problems: the dense eigensolve is exact and cheap.
  if (n <= k + 1) {
    auto dense = filter_spectrum(input, opts.tol_ctrb);
    return dense;
  }

  const StateSpaceSystem sys = input.to_sparse();
  const SparseMatrix a = sys.A_sparse();
  const SparseMatrix e = sys.E_sparse();
  const bool continuous = sys.domain() == Domain::Continuous;

  // Continuous: eigenvalues nearest the origin via (A - sigma E)^{-1} E.
  // Discrete: largest-modulus eigenvalues via E^{-1} A.
  Operator op;
  cd sigma = 0.0;
  if (continuous) {
    const double scale = std::max(1.0, a.norm() / std::sqrt(static_cast<double>(n)));
    for (double shift : {0.0, 1e-6, 1e-3}) {
      sigma = cd(shift * scale, 0.0);
      op.ok = factor(op.lu, SparseMatrix(a - sigma * e));
      if (op.ok) break;
    }
    op.g = e;
  } else {
    op.ok = factor(op.lu, e);
    op.g = a;
  }
  if (!op.ok) {
    throw Error(ErrorCode::EigensolveFailure, "shift-invert factorization failed");
  }

  Matrix basis, hess;
  arnoldi(op, n, k, basis, hess);
  Eigen::ComplexEigenSolver<Matrix> ritz(hess, true);
  if (ritz.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolveFailure, "Ritz eigensolve did not converge");
  }

  std::vector<int> order(ritz.eigenvalues().size());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return std::abs(ritz.eigenvalues()(x)) > std::abs(ritz.eigenvalues()(y));
  });

  const double ctrb_scale = opts.tol_ctrb * std::max(1.0, sys.B().norm());
  const double obsv_scale = opts.tol_ctrb * std::max(1.0, sys.C().norm());

  std::vector<SpectrumPoint> out;
  for (int idx : order) {
    if (static_cast<int>(out.size()) >= opts.count) break;
    const cd mu = ritz.eigenvalues()(idx);
    if (std::abs(mu) == 0.0) continue;
    SpectrumPoint pt;
    pt.eigenvalue = continuous ? sigma + 1.0 / mu : mu;

    Vector x = basis * ritz.eigenvectors().col(idx);
    x /= x.norm();

    // Left vector by two steps of inverse iteration with the adjoint pencil.
    const cd shifted = pt.eigenvalue * (1.0 + 1e-10) + cd(1e-12, 1e-12);
    SparseLU lu;
    Vector y = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    if (factor(lu, SparseMatrix((a - shifted * e).adjoint()))) {
      for (int step = 0; step < 2; ++step) {
        y = lu.solve(y);
        const double nrm = y.norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
        y /= nrm;
      }
    }
    pt.right_vec_norm_Cx = (sys.C() * x).norm();
    pt.left_vec_norm_By = (sys.B().adjoint() * y).norm();
    pt.controllable = pt.left_vec_norm_By > ctrb_scale;
    pt.observable = pt.right_vec_norm_Cx > obsv_scale;
    out.push_back(pt);
  }
  return out;
}

}  // namespace hinf
