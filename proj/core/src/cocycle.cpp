#include "gaplabel/cocycle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "gaplabel/error.hpp"

namespace gaplabel {

namespace {

constexpr cd kI{0.0, 1.0};

void check_even_square(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0)
    throw Error(ErrorKind::InvalidInput, "expected a square matrix of even size");
  if (!all_finite(a)) throw Error(ErrorKind::InvalidInput, "non-finite matrix entry");
}

}  // namespace

ComplexMatrix symplectic_form(int m) {
  ComplexMatrix j = ComplexMatrix::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m).setIdentity();
  j.bottomLeftCorner(m, m) = -ComplexMatrix::Identity(m, m);
  return j;
}

ComplexMatrix pseudo_unitary_form(int m) {
  ComplexMatrix q = ComplexMatrix::Identity(2 * m, 2 * m);
  q.bottomRightCorner(m, m) *= -1.0;
  return q;
}

double symplectic_defect(const ComplexMatrix& a) {
  check_even_square(a);
  const ComplexMatrix j = symplectic_form(static_cast<int>(a.rows() / 2));
  return (a.adjoint() * j * a - j).norm();
}

double pseudo_unitary_defect(const ComplexMatrix& a) {
  check_even_square(a);
  const ComplexMatrix q = pseudo_unitary_form(static_cast<int>(a.rows() / 2));
  return (a.adjoint() * q * a - q).norm();
}

TransferStep transfer_step(const OperatorModel& model, double e, const BasePoint& theta) {
  const int m = model.m();
  const ComplexMatrix f = model.f(theta);
  TransferStep out;
  out.a_hat = ComplexMatrix::Zero(2 * m, 2 * m);
  ComplexMatrix ef = -f;
  ef.diagonal().array() += e;
  out.a_hat.topLeftCorner(m, m) = model.c_inv() * ef;
  out.a_hat.topRightCorner(m, m) = -model.c_inv() * model.c().adjoint();
  out.a_hat.bottomLeftCorner(m, m).setIdentity();
  out.a = transfer_matrix(model, e, f);
  return out;
}

void transfer_matrix(const OperatorModel& model, double e, const ComplexMatrix& f, BlockMatrix& out) {
  const int m = model.m();
  out.resize(2 * m, 2 * m);
  out.topLeftCorner(m, m).noalias() = -f * model.c_inv();
  out.topLeftCorner(m, m) += e * model.c_inv();
  out.topRightCorner(m, m) = -model.c().adjoint();
  out.bottomLeftCorner(m, m) = model.c_inv();
  out.bottomRightCorner(m, m).setZero();
}

ComplexMatrix transfer_matrix(const OperatorModel& model, double e, const ComplexMatrix& f) {
  BlockMatrix a;
  transfer_matrix(model, e, f, a);
  return a;
}

ComplexMatrix symplectic_inverse(const ComplexMatrix& a) {
  check_even_square(a);
  const ComplexMatrix j = symplectic_form(static_cast<int>(a.rows() / 2));
  return -j * a.adjoint() * j;
}

ComplexMatrix transfer_product(const OperatorModel& model, double e, const BasePoint& theta, long n) {
  const BaseDynamics& base = model.base();
  if (n < 0 && !base.invertible())
    throw Error(ErrorKind::UnsupportedDirection, "backward transfer product needs an invertible base");
  const int m = model.m();
  ComplexMatrix out = ComplexMatrix::Identity(2 * m, 2 * m);
  BlockMatrix step;
  if (n >= 0) {
    BasePoint p = base.reduce(theta);
    for (long k = 0; k < n; ++k) {
      transfer_matrix(model, e, model.f(p), step);
      out = step * out;
      p = base.advance(p);
    }
  } else {
    BasePoint p = base.reduce(theta);
    for (long k = 0; k < -n; ++k) {
      p = base.retreat(p);
      transfer_matrix(model, e, model.f(p), step);
      out = symplectic_inverse(step) * out;
    }
  }
  return out;
}

ComplexMatrix cayley(const ComplexMatrix& a) {
  check_even_square(a);
  const Eigen::Index m = a.rows() / 2;
  // C A C^-1 with C = (1/2)[[I, -iI], [I, iI]], C^-1 = [[I, I], [iI, -iI]]
  const auto a1 = a.topLeftCorner(m, m), a2 = a.topRightCorner(m, m);
  const auto a3 = a.bottomLeftCorner(m, m), a4 = a.bottomRightCorner(m, m);
  const ComplexMatrix p = a1 - kI * a3, q = a2 - kI * a4;  // top row of C A
  const ComplexMatrix r = a1 + kI * a3, s = a2 + kI * a4;  // bottom row
  ComplexMatrix out(2 * m, 2 * m);
  out.topLeftCorner(m, m) = 0.5 * (p + kI * q);
  out.topRightCorner(m, m) = 0.5 * (p - kI * q);
  out.bottomLeftCorner(m, m) = 0.5 * (r + kI * s);
  out.bottomRightCorner(m, m) = 0.5 * (r - kI * s);
  return out;
}

ComplexMatrix cayley_inverse(const ComplexMatrix& a_ring) {
  check_even_square(a_ring);
  const Eigen::Index m = a_ring.rows() / 2;
  ComplexMatrix c = ComplexMatrix::Zero(2 * m, 2 * m), c_inv = ComplexMatrix::Zero(2 * m, 2 * m);
  const ComplexMatrix id = ComplexMatrix::Identity(m, m);
  c << 0.5 * id, -0.5 * kI * id, 0.5 * id, 0.5 * kI * id;
  c_inv << id, id, kI * id, -kI * id;
  return c_inv * a_ring * c;
}

// ---------------------------------------------------------------- frames

LagrangianFrame::LagrangianFrame(ComplexMatrix x, ComplexMatrix y, const ToleranceProfile& tol)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != x_.cols() || y_.rows() != y_.cols() || x_.rows() != y_.rows() || x_.rows() < 1)
    throw Error(ErrorKind::InvalidInput, "frame blocks must be square and of equal size");
  if (!all_finite(x_) || !all_finite(y_)) throw Error(ErrorKind::InvalidInput, "non-finite frame entry");
  const RealVector sigma = svd(stack()).sigma;
  if (sigma(0) == 0.0 || sigma(sigma.size() - 1) <= tol.frame_rank * sigma(0))
    throw Error(ErrorKind::DegenerateFrame, "frame does not have full rank");
  const double lag = (x_.adjoint() * y_ - y_.adjoint() * x_).norm();
  if (lag > tol.lagrangian * sigma(0) * sigma(0))
    throw Error(ErrorKind::InvalidInput, "frame is not Lagrangian (X*Y != Y*X)");
}

LagrangianFrame LagrangianFrame::from_stack(const ComplexMatrix& stack, const ToleranceProfile& tol) {
  if (stack.rows() != 2 * stack.cols()) throw Error(ErrorKind::InvalidInput, "frame stack must be 2m x m");
  const Eigen::Index m = stack.cols();
  return LagrangianFrame(stack.topRows(m), stack.bottomRows(m), tol);
}

LagrangianFrame LagrangianFrame::horizontal(int m) {
  return LagrangianFrame(ComplexMatrix::Identity(m, m), ComplexMatrix::Zero(m, m));
}

LagrangianFrame LagrangianFrame::vertical(int m) {
  return LagrangianFrame(ComplexMatrix::Zero(m, m), ComplexMatrix::Identity(m, m));
}

ComplexMatrix LagrangianFrame::stack() const {
  ComplexMatrix s(2 * x_.rows(), x_.cols());
  s << x_, y_;
  return s;
}

LagrangianFrame LagrangianFrame::orthonormalized() const {
  const Eigen::Index m = x_.rows();
  Eigen::HouseholderQR<ComplexMatrix> qr(stack());
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(2 * m, m);
  LagrangianFrame out;
  out.x_ = q.topRows(m);
  out.y_ = q.bottomRows(m);
  return out;
}

LagrangianFrame LagrangianFrame::mapped(const ComplexMatrix& a) const {
  if (a.rows() != 2 * x_.rows() || a.cols() != 2 * x_.rows())
    throw Error(ErrorKind::InvalidInput, "matrix size does not match frame");
  const Eigen::Index m = x_.rows();
  const ComplexMatrix s = a * stack();
  LagrangianFrame raw;
  raw.x_ = s.topRows(m);
  raw.y_ = s.bottomRows(m);
  return raw.orthonormalized();
}

UnitaryPoint::UnitaryPoint(ComplexMatrix w, const ToleranceProfile& tol) : w_(std::move(w)) {
  if (w_.rows() != w_.cols()) throw Error(ErrorKind::InvalidInput, "unitary point must be square");
  if (!all_finite(w_)) throw Error(ErrorKind::InvalidInput, "non-finite unitary point");
  if ((w_.adjoint() * w_ - ComplexMatrix::Identity(w_.rows(), w_.cols())).norm() > tol.unitary_point)
    throw Error(ErrorKind::InvalidInput, "matrix is not unitary");
}

UnitaryPoint frame_to_unitary(const LagrangianFrame& frame, const ToleranceProfile& tol) {
  const LagrangianFrame q = frame.orthonormalized();
  const ComplexMatrix minus = q.x() - kI * q.y();
  const ComplexMatrix plus = q.x() + kI * q.y();
  const RealVector sigma = svd(minus).sigma;
  if (sigma(sigma.size() - 1) < tol.degenerate) throw Error(ErrorKind::DegenerateFrame, "X - iY is singular");
  // X - iY is unitary for an orthonormal Lagrangian basis; solve rather than rely on that.
  const ComplexMatrix w = minus.transpose().partialPivLu().solve(plus.transpose()).transpose();
  return UnitaryPoint(w, tol);
}

UnitaryPoint mobius_act(const ComplexMatrix& a_ring, const UnitaryPoint& w, const ToleranceProfile& tol) {
  check_even_square(a_ring);
  const Eigen::Index m = a_ring.rows() / 2;
  if (w.m() != m) throw Error(ErrorKind::InvalidInput, "unitary point size does not match matrix");
  const ComplexMatrix den = a_ring.topLeftCorner(m, m) + a_ring.topRightCorner(m, m) * w.w();
  const ComplexMatrix num = a_ring.bottomLeftCorner(m, m) + a_ring.bottomRightCorner(m, m) * w.w();
  const RealVector sigma = svd(den).sigma;
  if (sigma(sigma.size() - 1) < tol.degenerate * std::max(1.0, sigma(0)))
    throw Error(ErrorKind::DegenerateAction, "A1 + A2 W is singular");
  const ComplexMatrix out = den.transpose().partialPivLu().solve(num.transpose()).transpose();
  return UnitaryPoint(out, tol);
}

int kernel_dimension(const ComplexMatrix& m, double cutoff) {
  const RealVector sigma = svd(m).sigma;
  const double scale = std::max(1.0, sigma.size() ? sigma(0) : 0.0);
  int k = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) < cutoff * scale) ++k;
  return k;
}

DetKernel det_kernel_test(const LagrangianFrame& frame, const ToleranceProfile& tol) {
  const ComplexMatrix& x = frame.x();
  const ComplexMatrix& y = frame.y();
  DetKernel out;
  const cd num = (x + kI * y).determinant() * (x.adjoint() + kI * y.adjoint()).determinant();
  const cd den = (x.adjoint() * x + y.adjoint() * y).determinant();
  out.det_w = num / den;
  const UnitaryPoint w = frame_to_unitary(frame, tol);
  out.dim_fix = kernel_dimension(w.w() - ComplexMatrix::Identity(frame.m(), frame.m()), tol.kernel_cutoff);
  // Y relative to an orthonormal basis of the plane, so the cutoff is scale-free.
  out.dim_ker_y = kernel_dimension(frame.orthonormalized().y(), tol.kernel_cutoff);
  return out;
}

ComplexMatrix SymplecticCocycle::conjugator() const {
  const int m = model_->m();
  ComplexMatrix p = ComplexMatrix::Identity(2 * m, 2 * m);
  p.topLeftCorner(m, m) = model_->c();
  return p;
}

}  // namespace gaplabel
