#include <doctest.h>

#include "gaplabel/error.hpp"
#include "gaplabel/matkernel.hpp"
#include "support/oracles.hpp"

using namespace gaplabel;
using namespace gaplabel::testing;

TEST_CASE("HermitianMatrix validates and symmetrizes") {
  Mat a(2, 2);
  a << 1.0, cd(2.0, 1.0), cd(2.0, -1.0), 3.0;
  HermitianMatrix h(a);
  CHECK((h.matrix() - h.matrix().adjoint()).norm() == 0.0);
  a(0, 1) += 1e-3;
  CHECK_THROWS_AS(HermitianMatrix{a}, Error);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(HermitianMatrix{a}, Error);
}

TEST_CASE("2x2 Hermitian eigenvalues match the quadratic formula") {
  Rng rng(1);
  for (int s = 0; s < 50; ++s) {
    const double a = uniform(rng, -3, 3), c = uniform(rng, -3, 3);
    const cd b(uniform(rng, -2, 2), uniform(rng, -2, 2));
    Mat m(2, 2);
    m << a, b, std::conj(b), c;
    const double mid = (a + c) / 2, rad = std::sqrt((a - c) * (a - c) / 4 + std::norm(b));
    const auto es = hermitian_eigs(HermitianMatrix(m));
    CHECK(es.eigenvalues(0) == doctest::Approx(mid - rad).epsilon(1e-12));
    CHECK(es.eigenvalues(1) == doctest::Approx(mid + rad).epsilon(1e-12));
    CHECK((m * es.eigenvectors - es.eigenvectors * es.eigenvalues.asDiagonal()).norm() < 1e-12);
  }
}

TEST_CASE("tridiagonal eigenvalues match the dense solver") {
  Rng rng(2);
  const int n = 40;
  RealVector diag(n);
  ComplexVector off(n - 1);
  Mat dense = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) dense(i, i) = diag(i) = uniform(rng, -2, 2);
  for (int i = 0; i + 1 < n; ++i) {
    off(i) = cd(uniform(rng, -1, 1), uniform(rng, -1, 1));
    dense(i + 1, i) = off(i);
    dense(i, i + 1) = std::conj(off(i));
  }
  CHECK((tridiagonal_eigenvalues(diag, off) - dense_eigenvalues(dense)).norm() < 1e-11);
}

TEST_CASE("svd, determinant and condition number") {
  Rng rng(3);
  const Mat a = random_matrix(rng, 4);
  const SvdResult s = svd(a);
  CHECK((s.u * s.sigma.asDiagonal() * s.v.adjoint() - a).norm() < 1e-12);
  for (Eigen::Index i = 0; i + 1 < s.sigma.size(); ++i) CHECK(s.sigma(i) >= s.sigma(i + 1));
  const DetArg d = det_with_arg(a);
  const cd det = a.determinant();
  CHECK(d.modulus == doctest::Approx(std::abs(det)).epsilon(1e-10));
  CHECK(std::abs(std::polar(1.0, d.argument) - det / std::abs(det)) < 1e-10);
  CHECK(d.log_modulus == doctest::Approx(std::log(std::abs(det))).epsilon(1e-10));
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 10.0;
  CHECK(condition_number(diag) == doctest::Approx(10.0));
  CHECK(all_finite(a));
}

TEST_CASE("unitary_log inverts the exponential") {
  Rng rng(4);
  for (int s = 0; s < 10; ++s) {
    const Mat q = random_unitary(rng, 3);
    const Mat h = unitary_log(q);
    CHECK((h - h.adjoint()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Eigen::VectorXcd phases = (es.eigenvalues().cast<cd>() * cd(0.0, 1.0)).array().exp();
    const Mat back = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    CHECK((back - q).norm() < 1e-10);
    CHECK(es.eigenvalues().maxCoeff() <= kPi + 1e-12);
    CHECK(es.eigenvalues().minCoeff() > -kPi - 1e-12);
  }
}

TEST_CASE("GlPath joins the identity to C inside GL(m)") {
  Rng rng(5);
  const Mat c = random_invertible(rng, 3);
  const GlPath path(c);
  CHECK((path(0.0) - Mat::Identity(3, 3)).norm() < 1e-12);
  CHECK((path(1.0) - c).norm() < 1e-10);
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK((path.inverse(t) * path(t) - Mat::Identity(3, 3)).norm() < 1e-10);
    CHECK(std::abs(path(t).determinant()) > 1e-8);
  }
  CHECK((gl_path(c, 0.5) - path(0.5)).norm() < 1e-12);
}
