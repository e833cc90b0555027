#include "hinf/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hinf/error.hpp"
#include "linalg.hpp"

namespace hinf {

namespace {

struct LevelBlocks {
  Matrix a_tilde;      // A - B R^-1 D^* C
  Matrix upper_right;  // -g B R^-1 B^*
  Matrix lower_left;   // g C^* S^-1 C
  double r_min = 0.0;
  double s_min = 0.0;
};

LevelBlocks level_blocks(const StateSpaceSystem& sys, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::GammaNearSingularValueOfD,
                "level must be positive and finite, got " + std::to_string(gamma));
  }
  const Matrix& b = sys.B();
  const Matrix& c = sys.C();
  const Matrix& d = sys.D();
  const double g2 = gamma * gamma;
  Matrix r = d.adjoint() * d;
  r.diagonal().array() -= g2;
  Matrix s = d * d.adjoint();
  s.diagonal().array() -= g2;

  LevelBlocks out;
  out.r_min = detail::min_singular_value(r);
  out.s_min = detail::min_singular_value(s);
  if (!(std::min(out.r_min, out.s_min) > kGammaGuard * g2)) {
    throw Error(ErrorCode::GammaNearSingularValueOfD,
                "level " + std::to_string(gamma) + " is too close to a singular value of D");
  }
  const Eigen::PartialPivLU<Matrix> r_lu(r);
  const Eigen::PartialPivLU<Matrix> s_lu(s);
  const Matrix rinv_dc = r_lu.solve(d.adjoint() * c);
  const Matrix rinv_b = r_lu.solve(b.adjoint());
  const Matrix sinv_c = s_lu.solve(c);

  const StateSpaceSystem dense = sys.to_dense();
  out.a_tilde = dense.A() - b * rinv_dc;
  out.upper_right = -gamma * (b * rinv_b);
  out.lower_left = gamma * (c.adjoint() * sinv_c);
  return out;
}

bool crossings_close(Domain domain, double a, double b, double tol) {
  const double d = std::abs(a - b);
  return domain == Domain::Discrete ? std::min(d, kTwoPi - d) <= tol : d <= tol;
}

}  // namespace

PencilPair build_pencil(const StateSpaceSystem& sys, double gamma) {
  const LevelBlocks blk = level_blocks(sys, gamma);
  const int n = sys.n();
  const Matrix e = sys.to_dense().E();

  PencilPair out;
  out.gamma = gamma;
  out.domain = sys.domain();
  out.r_min_sv = blk.r_min;
  out.s_min_sv = blk.s_min;
  out.left = Matrix::Zero(2 * n, 2 * n);
  out.right = Matrix::Zero(2 * n, 2 * n);
  out.left.topLeftCorner(n, n) = blk.a_tilde;
  out.left.topRightCorner(n, n) = blk.upper_right;
  out.right.topLeftCorner(n, n) = e;
  if (sys.domain() == Domain::Continuous) {
    out.left.bottomLeftCorner(n, n) = blk.lower_left;
    out.left.bottomRightCorner(n, n) = -blk.a_tilde.adjoint();
    out.right.bottomRightCorner(n, n) = e.adjoint();
    out.right_is_identity = sys.e_is_identity();
  } else {
    out.left.bottomRightCorner(n, n) = e.adjoint();
    out.right.bottomLeftCorner(n, n) = -blk.lower_left;
    out.right.bottomRightCorner(n, n) = blk.a_tilde.adjoint();
  }
  return out;
}

std::vector<BoundaryCrossing> boundary_eigenvalues(const PencilPair& pencil, double band_tol,
                                                   bool want_eigvecs) {
  const detail::EigenDecomposition eig =
      pencil.right_is_identity
          ? detail::standard_eigen(pencil.left, false, want_eigvecs)
          : detail::generalized_eigen(pencil.left, pencil.right, false, want_eigvecs);
  const Eigen::Index n = pencil.left.rows() / 2;

  std::vector<BoundaryCrossing> found;
  for (Eigen::Index k = 0; k < eig.alpha.size(); ++k) {
    const cd alpha = eig.alpha(k);
    const cd beta = eig.beta(k);
    if (!(std::abs(beta) > 1e-12 * std::max(1.0, std::abs(alpha)))) continue;
    const cd lambda = alpha / beta;
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) continue;

    BoundaryCrossing c;
    c.raw_eigenvalue = lambda;
    c.gamma = pencil.gamma;
    c.domain = pencil.domain;
    if (pencil.domain == Domain::Continuous) {
      c.distance_to_boundary = std::abs(lambda.real());
      c.frequency = Frequency::continuous(lambda.imag());
    } else {
      c.distance_to_boundary = std::abs(std::abs(lambda) - 1.0);
      c.frequency = Frequency::discrete(std::arg(lambda));
    }
    if (c.distance_to_boundary > band_tol) continue;
    if (want_eigvecs) {
      c.eigvec_q = eig.right.col(k).head(n);
      c.eigvec_s = eig.right.col(k).tail(n);
    }
    found.push_back(std::move(c));
  }

  std::sort(found.begin(), found.end(), [](const BoundaryCrossing& a, const BoundaryCrossing& b) {
    return a.frequency.value() < b.frequency.value();
  });
  if (found.size() < 2) return found;

  const double span = found.back().frequency.value() - found.front().frequency.value();
  const double tol = 1e-10 * std::max(1.0, span);
  const Domain domain = pencil.domain;

  // Merge runs of near-equal frequencies into their mean, keeping the first
  // member's eigenvector.
  std::vector<BoundaryCrossing> merged;
  std::vector<int> counts;
  for (auto& c : found) {
    if (!merged.empty() &&
        crossings_close(domain, merged.back().frequency.value(), c.frequency.value(), tol)) {
      auto& last = merged.back();
      const int cnt = counts.back();
      const double v = (last.frequency.value() * cnt + c.frequency.value()) / (cnt + 1);
      last.frequency = Frequency::make(domain, v);
      last.distance_to_boundary = std::min(last.distance_to_boundary, c.distance_to_boundary);
      ++counts.back();
    } else {
      merged.push_back(std::move(c));
      counts.push_back(1);
    }
  }
  // Discrete seam: the last angle may sit just below 2*pi next to a first
  // angle just above 0.
  if (domain == Domain::Discrete && merged.size() >= 2 &&
      crossings_close(domain, merged.back().frequency.value(), merged.front().frequency.value(),
                      tol)) {
    const double lo = merged.front().frequency.value();
    const double hi = merged.back().frequency.value() - kTwoPi;
    merged.front().frequency = Frequency::discrete(0.5 * (lo + hi));
    merged.pop_back();
    std::sort(merged.begin(), merged.end(),
              [](const BoundaryCrossing& a, const BoundaryCrossing& b) {
                return a.frequency.value() < b.frequency.value();
              });
  }
  return merged;
}

double derivative_from_eigenvector(const BoundaryCrossing& crossing, const StateSpaceSystem& sys) {
  if (!crossing.eigvec_q || !crossing.eigvec_s) {
    throw Error(ErrorCode::MissingEigenvectors, "crossing carries no eigenvector");
  }
  const Vector& q = *crossing.eigvec_q;
  const Vector& s = *crossing.eigvec_s;
  const double gamma = crossing.gamma;
  const Matrix& d = sys.D();

  // v = -R^-1 (D^* C q + g B^* s) recovers the right singular vector up to
  // the common scale of (q, s).
  Matrix r = d.adjoint() * d;
  r.diagonal().array() -= gamma * gamma;
  const Vector rhs = d.adjoint() * (sys.C() * q) + gamma * (sys.B().adjoint() * s);
  const Vector v = -Eigen::PartialPivLU<Matrix>(r).solve(rhs);
  const double scale = v.squaredNorm();
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::MissingEigenvectors, "eigenvector does not determine a singular vector");
  }

  const cd seq = s.dot(sys.apply_E(q).col(0));
  const double freq = crossing.frequency.value();
  const cd kappa = crossing.domain == Domain::Continuous ? cd(0.0, 1.0)
                                                         : cd(0.0, 1.0) * std::polar(1.0, freq);
  return std::real(-kappa * seq) / scale;
}

}  // namespace hinf
