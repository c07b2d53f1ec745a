#include "gaplabel/matkernel.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gaplabel/error.hpp"

namespace gaplabel {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::UnsupportedDirection: return "UnsupportedDirection";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::DegenerateAction: return "DegenerateAction";
    case ErrorKind::RefinementExhausted: return "RefinementExhausted";
    case ErrorKind::UnsupportedBase: return "UnsupportedBase";
    case ErrorKind::RefineGrid: return "RefineGrid";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::InvalidLaw: return "InvalidLaw";
    case ErrorKind::DegreeZeroLeading: return "DegreeZeroLeading";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, const ToleranceProfile& tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInput, "Hermitian matrix must be square");
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "non-finite entry in Hermitian matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol.hermitian_asymmetry * scale)
    throw Error(ErrorKind::InvalidInput, "matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")");
  data_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::from_real_diagonal(const RealVector& diag) {
  ComplexMatrix m = ComplexMatrix::Zero(diag.size(), diag.size());
  m.diagonal() = diag.cast<cd>();
  return HermitianMatrix(m);
}

namespace {

void fix_phases(ComplexMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double col_norm = v.col(j).norm();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, j));
      if (a > 1e-10 * col_norm) {
        v.col(j) *= std::conj(v(i, j)) / a;
        v(i, j) = cd(a, 0.0);
        break;
      }
    }
  }
}

}  // namespace

EigenSystem hermitian_eigs(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "eigensolver failed");
  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  fix_phases(out.eigenvectors);
  return out;
}

RealVector hermitian_eigenvalues(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "eigensolver failed");
  return solver.eigenvalues();
}

RealVector tridiagonal_eigenvalues(const RealVector& diag, const ComplexVector& offdiag) {
  const Eigen::Index n = diag.size();
  if (n == 0) return {};
  if (offdiag.size() != n - 1) throw Error(ErrorKind::InvalidInput, "tridiagonal size mismatch");
  if (n == 1) return diag;
  // A diagonal unitary gauge maps the complex off-diagonal to |offdiag|.
  RealVector sub = offdiag.cwiseAbs();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "tridiagonal eigensolver failed");
  return solver.eigenvalues();
}

SvdResult svd(const ComplexMatrix& m) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "non-finite entry in svd input");
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

DetArg det_with_arg(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInput, "determinant of non-square matrix");
  DetArg out;
  if (m.rows() == 0) {
    out.modulus = 1.0;
    out.log_modulus = 0.0;
    return out;
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const ComplexMatrix& packed = lu.matrixLU();
  double log_mod = 0.0;
  cd phase(1.0, 0.0);
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const cd d = packed(i, i);
    const double a = std::abs(d);
    if (a == 0.0) {
      out.modulus = 0.0;
      out.argument = 0.0;
      return out;
    }
    log_mod += std::log(a);
    phase *= d / a;
  }
  phase *= static_cast<double>(lu.permutationP().determinant());
  out.log_modulus = log_mod;
  out.modulus = std::exp(log_mod);
  out.argument = std::arg(phase);
  if (out.argument <= -kPi) out.argument = kPi;
  return out;
}

double condition_number(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> solver(m);
  const RealVector& s = solver.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

ComplexMatrix unitary_log(const ComplexMatrix& q) {
  // Unitary matrices are normal, so the complex Schur form is diagonal.
  Eigen::ComplexSchur<ComplexMatrix> schur(q);
  const ComplexMatrix& z = schur.matrixU();
  const ComplexMatrix& t = schur.matrixT();
  RealVector phases(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    double phi = std::arg(t(i, i));
    if (phi <= -kPi) phi = kPi;
    phases(i) = phi;
  }
  ComplexMatrix h = z * phases.cast<cd>().asDiagonal() * z.adjoint();
  return 0.5 * (h + h.adjoint());
}

GlPath::GlPath(const ComplexMatrix& c, const ToleranceProfile& tol) {
  if (c.rows() != c.cols() || c.rows() == 0) throw Error(ErrorKind::InvalidInput, "gl_path needs a square matrix");
  if (!all_finite(c)) throw Error(ErrorKind::InvalidInput, "non-finite entry in gl_path input");
  Eigen::JacobiSVD<ComplexMatrix> solver(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = solver.singularValues();
  if (s(s.size() - 1) <= tol.singular_rel * s(0))
    throw Error(ErrorKind::SingularMatrix, "gl_path endpoint is singular");
  // C = U S V* = (U V*)(V S V*)
  const ComplexMatrix q = solver.matrixU() * solver.matrixV().adjoint();
  positive_vectors_ = solver.matrixV();
  positive_values_ = s;

  Eigen::ComplexSchur<ComplexMatrix> schur(q);
  unitary_vectors_ = schur.matrixU();
  unitary_phases_.resize(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double phi = std::arg(schur.matrixT()(i, i));
    if (phi <= -kPi) phi = kPi;
    unitary_phases_(i) = phi;
  }
}

ComplexMatrix GlPath::operator()(double t) const {
  const Eigen::Index n = dim();
  ComplexVector u(n), p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u(i) = std::polar(1.0, t * unitary_phases_(i));
    p(i) = cd(std::pow(positive_values_(i), t), 0.0);
  }
  return (unitary_vectors_ * u.asDiagonal() * unitary_vectors_.adjoint()) *
         (positive_vectors_ * p.asDiagonal() * positive_vectors_.adjoint());
}

ComplexMatrix GlPath::inverse(double t) const {
  const Eigen::Index n = dim();
  ComplexVector u(n), p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u(i) = std::polar(1.0, -t * unitary_phases_(i));
    p(i) = cd(std::pow(positive_values_(i), -t), 0.0);
  }
  return (positive_vectors_ * p.asDiagonal() * positive_vectors_.adjoint()) *
         (unitary_vectors_ * u.asDiagonal() * unitary_vectors_.adjoint());
}

ComplexMatrix gl_path(const ComplexMatrix& c, double t) { return GlPath(c)(t); }

}  // namespace gaplabel
