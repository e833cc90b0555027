#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "hinf/error.hpp"
#include "hinf/random_system.hpp"
#include "hinf/system.hpp"

using namespace hinf;
using fixtures::scalar;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected hinf::Error");
  return ErrorCode::InvalidArgument;
}

Matrix diag2(cd a, cd b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_SUITE("system") {
  TEST_CASE("minimal continuous system uses the identity marker") {
    const auto sys = fixtures::scalar_continuous();
    CHECK(sys.n() == 1);
    CHECK(sys.m() == 1);
    CHECK(sys.p() == 1);
    CHECK(sys.e_is_identity());
    CHECK(sys.domain() == Domain::Continuous);
    CHECK(sys.is_real());
  }

  TEST_CASE("minimal discrete system") {
    const auto sys = fixtures::scalar_discrete();
    CHECK(sys.domain() == Domain::Discrete);
    CHECK(sys.A()(0, 0) == cd(0.5));
  }

  TEST_CASE("shape violations") {
    CHECK(code_of([] {
            make_system(Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2),
                        Matrix::Zero(1, 1), std::nullopt, Domain::Continuous);
          }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] {
            make_system(Matrix::Zero(2, 3), Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                        Matrix::Zero(1, 1), std::nullopt, Domain::Continuous);
          }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] {
            make_system(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                        Matrix::Zero(2, 1), std::nullopt, Domain::Continuous);
          }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] {
            make_system(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2),
                        Matrix::Zero(1, 1), Matrix(Matrix::Identity(3, 3)), Domain::Continuous);
          }) == ErrorCode::DimensionMismatch);
  }

  TEST_CASE("empty dimensions") {
    CHECK(code_of([] {
            make_system(Matrix::Zero(0, 0), Matrix::Zero(0, 1), Matrix::Zero(1, 0),
                        Matrix::Zero(1, 1), std::nullopt, Domain::Continuous);
          }) == ErrorCode::EmptySystem);
    CHECK(code_of([] {
            make_system(Matrix::Zero(2, 2), Matrix::Zero(2, 0), Matrix::Zero(1, 2),
                        Matrix::Zero(1, 0), std::nullopt, Domain::Continuous);
          }) == ErrorCode::EmptySystem);
  }

  TEST_CASE("sparse triplet input matches dense input") {
    std::vector<Triplet> t = {{0, 0, cd(-1.0)}, {1, 1, cd(-2.0)}, {0, 1, cd(0.5)}};
    const auto a = RawMatrix::from_triplets(2, 2, t);
    const auto b = RawMatrix::from_dense(Matrix::Ones(2, 1));
    const auto c = RawMatrix::from_dense(Matrix::Ones(1, 2));
    const auto d = RawMatrix::from_dense(Matrix::Zero(1, 1));
    const auto sp = validate_system(a, b, c, d, std::nullopt, Domain::Continuous, Storage::Sparse);
    CHECK(sp.storage() == Storage::Sparse);
    const auto dn = sp.to_dense();
    CHECK(dn.storage() == Storage::Dense);
    CHECK(dn.A()(0, 1) == cd(0.5));
    CHECK(dn.A()(1, 0) == cd(0.0));
    CHECK(Matrix(dn.to_sparse().A_sparse()) == dn.A());
  }

  TEST_CASE("complex data clears the real flag") {
    const auto sys = make_system(scalar(cd(-1.0, 0.3)), scalar(1.0), scalar(1.0), scalar(0.0),
                                 std::nullopt, Domain::Continuous);
    CHECK_FALSE(sys.is_real());
  }

  TEST_CASE("norm of D") {
    Matrix d(2, 2);
    d << 3.0, 0.0, 0.0, 4.0;
    const auto sys = make_system(Matrix(-Matrix::Identity(2, 2)), Matrix::Ones(2, 2),
                                 Matrix::Ones(2, 2), d, std::nullopt, Domain::Continuous);
    CHECK(sys.norm_D() == doctest::Approx(4.0).epsilon(1e-15));
  }

  TEST_CASE("filter_spectrum flags a decoupled mode") {
    Matrix b = Matrix::Zero(2, 1);
    b(0, 0) = 1.0;
    Matrix c = Matrix::Zero(1, 2);
    c(0, 0) = 1.0;
    const auto sys = make_system(diag2(-1.0, -2.0), b, c, scalar(0.0), std::nullopt,
                                 Domain::Continuous);
    const auto pts = filter_spectrum(sys);
    REQUIRE(pts.size() == 2);
    for (const auto& p : pts) {
      CHECK(p.finite);
      if (std::abs(p.eigenvalue - cd(-2.0)) < 1e-12) {
        CHECK_FALSE(p.controllable);
        CHECK_FALSE(p.observable);
        CHECK_FALSE(p.admissible());
      } else {
        CHECK(std::abs(p.eigenvalue - cd(-1.0)) < 1e-12);
        CHECK(p.admissible());
      }
    }
  }

  TEST_CASE("filter_spectrum on the scalar system") {
    const auto pts = filter_spectrum(fixtures::scalar_continuous());
    REQUIRE(pts.size() == 1);
    CHECK(std::abs(pts[0].eigenvalue - cd(-1.0)) < 1e-14);
    CHECK(pts[0].admissible());
  }

  TEST_CASE("filter_spectrum flags against explicit eigenvector products") {
    RandomSpec spec;
    spec.n = 5;
    spec.m = 2;
    spec.p = 2;
    spec.seed = 11;
    const auto sys = random_stable_system(spec, 0);
    const auto pts = filter_spectrum(sys);
    REQUIRE(pts.size() == 5);
    const Eigen::ComplexEigenSolver<Matrix> eig(sys.A(), true);
    const Eigen::ComplexEigenSolver<Matrix> eig_adj(sys.A().adjoint(), true);
    for (const auto& p : pts) {
      CHECK(p.admissible());
      Eigen::Index k = 0;
      (eig.eigenvalues().array() - p.eigenvalue).abs().minCoeff(&k);
      const Vector x = eig.eigenvectors().col(k).normalized();
      CHECK(p.right_vec_norm_Cx == doctest::Approx((sys.C() * x).norm()).epsilon(1e-8));
      (eig_adj.eigenvalues().array() - std::conj(p.eigenvalue)).abs().minCoeff(&k);
      const Vector y = eig_adj.eigenvectors().col(k).normalized();
      CHECK(p.left_vec_norm_By == doctest::Approx((sys.B().adjoint() * y).norm()).epsilon(1e-8));
    }
  }

  TEST_CASE("filter_spectrum returns the finite spectrum of (A, E)") {
    for (int idx = 0; idx < 6; ++idx) {
      RandomSpec spec;
      spec.n = 4 + 3 * idx;
      spec.m = 2;
      spec.p = 3;
      spec.seed = 5;
      spec.descriptor = idx % 2 == 1;
      const auto sys = random_stable_system(spec, idx);
      const auto pts = filter_spectrum(sys);
      REQUIRE(static_cast<int>(pts.size()) == sys.n());
      const Matrix ref_mat = sys.E().partialPivLu().solve(sys.A());
      std::vector<cd> ref(sys.n());
      const Vector ev = Eigen::ComplexEigenSolver<Matrix>(ref_mat).eigenvalues();
      for (int k = 0; k < sys.n(); ++k) ref[k] = ev(k);
      for (const auto& p : pts) {
        auto it = std::min_element(ref.begin(), ref.end(), [&](cd a, cd b) {
          return std::abs(a - p.eigenvalue) < std::abs(b - p.eigenvalue);
        });
        CHECK(std::abs(*it - p.eigenvalue) <= 1e-8 * std::max(1.0, std::abs(*it)));
        ref.erase(it);
      }
    }
  }

  TEST_CASE("scaling B keeps observability; scaling C keeps controllability") {
    RandomSpec spec;
    spec.n = 6;
    spec.m = 2;
    spec.p = 2;
    spec.seed = 3;
    const auto sys = random_stable_system(spec, 0);
    const auto base = filter_spectrum(sys);
    const auto sb = make_system(sys.A(), 1e-6 * sys.B(), sys.C(), sys.D(), std::nullopt,
                                Domain::Continuous);
    const auto sc = make_system(sys.A(), sys.B(), 1e6 * sys.C(), sys.D(), std::nullopt,
                                Domain::Continuous);
    const auto pb = filter_spectrum(sb);
    const auto pc = filter_spectrum(sc);
    REQUIRE(pb.size() == base.size());
    REQUIRE(pc.size() == base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
      CHECK(pb[k].observable == base[k].observable);
      CHECK(pc[k].controllable == base[k].controllable);
    }
  }

  TEST_CASE("initial guesses: rightmost admissible eigenvalue") {
    const auto sys = make_system(diag2(cd(-0.1, 3.0), cd(-1.0, 0.0)), Matrix::Ones(2, 1),
                                 Matrix::Ones(1, 2), scalar(0.0), std::nullopt,
                                 Domain::Continuous);
    const auto f = initial_frequencies(sys, filter_spectrum(sys));
    REQUIRE(f.size() == 2);
    CHECK(f[0].value() == 0.0);
    CHECK(f[1].value() == doctest::Approx(3.0).epsilon(1e-12));
  }

  TEST_CASE("initial guesses: real spectrum collapses to zero") {
    const auto sys = make_system(diag2(-1.0, -3.0), Matrix::Ones(2, 1), Matrix::Ones(1, 2),
                                 scalar(0.0), std::nullopt, Domain::Continuous);
    const auto f = initial_frequencies(sys, filter_spectrum(sys));
    REQUIRE(f.size() == 1);
    CHECK(f[0].value() == 0.0);
  }

  TEST_CASE("initial guesses: discrete largest modulus") {
    const auto sys = make_system(diag2(std::polar(0.9, 1.2), cd(0.3)), Matrix::Ones(2, 1),
                                 Matrix::Ones(1, 2), scalar(0.0), std::nullopt,
                                 Domain::Discrete);
    const auto f = initial_frequencies(sys, filter_spectrum(sys));
    REQUIRE(f.size() == 3);
    CHECK(f[0].value() == 0.0);
    CHECK(f[1].value() == doctest::Approx(kPi));
    CHECK(f[2].value() == doctest::Approx(1.2).epsilon(1e-12));
  }

  TEST_CASE("initial guesses skip inadmissible eigenvalues and append seeds") {
    Matrix b = Matrix::Zero(2, 1);
    b(1, 0) = 1.0;
    const auto sys = make_system(diag2(cd(-0.1, 5.0), cd(-1.0, 2.0)), b, Matrix::Ones(1, 2),
                                 scalar(0.0), std::nullopt, Domain::Continuous);
    const auto f = initial_frequencies(sys, filter_spectrum(sys),
                                       {Frequency::continuous(7.0), Frequency::continuous(0.0)});
    REQUIRE(f.size() == 3);
    CHECK(f[1].value() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f[2].value() == 7.0);
  }

  TEST_CASE("initial guesses are deterministic") {
    RandomSpec spec;
    spec.n = 12;
    spec.seed = 8;
    const auto sys = random_stable_system(spec, 2);
    const auto a = initial_frequencies(sys, filter_spectrum(sys), {Frequency::continuous(1.5)});
    const auto b = initial_frequencies(sys, filter_spectrum(sys), {Frequency::continuous(1.5)});
    CHECK(a == b);
  }

  TEST_CASE("wrap_angle") {
    CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(wrap_angle(kTwoPi) == 0.0);
    CHECK(wrap_angle(1.0) == 1.0);
    CHECK(Frequency::discrete(7.0).value() == doctest::Approx(7.0 - kTwoPi));
  }

  TEST_CASE("sparse dominant spectrum finds admissible poles") {
    RandomSpec spec;
    spec.n = 40;
    spec.m = 2;
    spec.p = 2;
    spec.density = 0.2;
    spec.seed = 4;
    const auto dense = random_stable_system(spec, 0);
    const auto sp = dense.to_sparse();
    SparseSeedOptions opts;
    opts.count = 5;
    const auto pts = sparse_dominant_spectrum(sp, opts);
    REQUIRE(!pts.empty());
    CHECK(pts.size() <= 5);
    const Vector ev = Eigen::ComplexEigenSolver<Matrix>(dense.A()).eigenvalues();
    for (const auto& p : pts) {
      CHECK(p.admissible());
      CHECK((ev.array() - p.eigenvalue).abs().minCoeff() < 1e-6 * std::max(1.0, std::abs(p.eigenvalue)));
    }
  }
}
