#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "gaplabel/tolerance.hpp"

namespace gaplabel {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest block size handled by the fixed-capacity kernels (2m <= 16).
inline constexpr int kMaxBlock = 8;

/// Heap-free small matrix used in the transfer-matrix hot loops.
using BlockMatrix =
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2 * kMaxBlock, 2 * kMaxBlock>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Square matrix with M == M* held exactly.
///
/// Construction rejects non-finite input and inputs whose relative asymmetry
/// exceeds the tolerance, then replaces M by (M + M*)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m, const ToleranceProfile& tol = {});

  static HermitianMatrix from_real_diagonal(const RealVector& diag);

  Eigen::Index dim() const { return data_.rows(); }
  const ComplexMatrix& matrix() const { return data_; }

 private:
  ComplexMatrix data_;
};

struct EigenSystem {
  RealVector eigenvalues;      ///< ascending
  ComplexMatrix eigenvectors;  ///< columns, first nonzero component real positive
};

struct SvdResult {
  ComplexMatrix u;
  RealVector sigma;  ///< descending, nonnegative
  ComplexMatrix v;
};

struct DetArg {
  double modulus = 0.0;
  double argument = 0.0;  ///< in (-pi, pi]
  double log_modulus = -std::numeric_limits<double>::infinity();
};

bool all_finite(const ComplexMatrix& m);

EigenSystem hermitian_eigs(const HermitianMatrix& m);
RealVector hermitian_eigenvalues(const HermitianMatrix& m);

/// Eigenvalues of a Hermitian tridiagonal matrix given by its real diagonal and
/// complex sub-diagonal; the off-diagonal phases are gauged away.
RealVector tridiagonal_eigenvalues(const RealVector& diag, const ComplexVector& offdiag);

SvdResult svd(const ComplexMatrix& m);

DetArg det_with_arg(const ComplexMatrix& m);

double condition_number(const ComplexMatrix& m);

/// Principal logarithm of a unitary matrix as a Hermitian generator H with Q = exp(iH),
/// spectrum of H in (-pi, pi].
ComplexMatrix unitary_log(const ComplexMatrix& q);

/// Smooth path in GL(m, C) from the identity (t = 0) to C (t = 1).
///
/// Uses the polar decomposition C = QP and V(t) = exp(t log Q) P^t. The
/// decomposition is computed once; evaluating at many t is cheap.
class GlPath {
 public:
  explicit GlPath(const ComplexMatrix& c, const ToleranceProfile& tol = {});

  ComplexMatrix operator()(double t) const;
  /// V(t)^{-1}, computed from the factors without a general inverse.
  ComplexMatrix inverse(double t) const;

  Eigen::Index dim() const { return unitary_vectors_.rows(); }

 private:
  ComplexMatrix unitary_vectors_;  // Q = Z diag(e^{i phi}) Z*
  RealVector unitary_phases_;
  ComplexMatrix positive_vectors_;  // P = Y diag(s) Y*
  RealVector positive_values_;
};

ComplexMatrix gl_path(const ComplexMatrix& c, double t);

}  // namespace gaplabel
