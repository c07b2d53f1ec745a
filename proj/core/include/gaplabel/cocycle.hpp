#pragma once

#include "gaplabel/matkernel.hpp"
#include "gaplabel/model.hpp"

namespace gaplabel {

/// J = [[0, I], [-I, 0]]
ComplexMatrix symplectic_form(int m);
/// Q = diag(I, -I)
ComplexMatrix pseudo_unitary_form(int m);

/// ||A* J A - J||
double symplectic_defect(const ComplexMatrix& a);
/// ||A* Q A - Q||
double pseudo_unitary_defect(const ComplexMatrix& a);

struct TransferStep {
  ComplexMatrix a_hat;  ///< [[C^-1 (E - f), -C^-1 C*], [I, 0]]
  ComplexMatrix a;      ///< P a_hat P^-1 with P = diag(C, I)
};

TransferStep transfer_step(const OperatorModel& model, double e, const BasePoint& theta);

/// A_E for a given potential value f, without re-evaluating the potential.
ComplexMatrix transfer_matrix(const OperatorModel& model, double e, const ComplexMatrix& f);
void transfer_matrix(const OperatorModel& model, double e, const ComplexMatrix& f, BlockMatrix& out);

/// Inverse of a Hermitian-symplectic matrix, -J A* J.
ComplexMatrix symplectic_inverse(const ComplexMatrix& a);

/// n-step transfer matrix A_{E,n}(theta); n < 0 needs an invertible base.
ComplexMatrix transfer_product(const OperatorModel& model, double e, const BasePoint& theta, long n);

/// Conjugation by the Cayley element, mapping HSp(2m) to U(m, m).
ComplexMatrix cayley(const ComplexMatrix& a);
ComplexMatrix cayley_inverse(const ComplexMatrix& a_ring);

/// Lagrangian plane spanned by the columns of [X; Y].
class LagrangianFrame {
 public:
  LagrangianFrame(ComplexMatrix x, ComplexMatrix y, const ToleranceProfile& tol = {});
  static LagrangianFrame from_stack(const ComplexMatrix& stack, const ToleranceProfile& tol = {});
  /// [I; 0]
  static LagrangianFrame horizontal(int m);
  /// [0; I]
  static LagrangianFrame vertical(int m);

  int m() const { return static_cast<int>(x_.rows()); }
  const ComplexMatrix& x() const { return x_; }
  const ComplexMatrix& y() const { return y_; }
  ComplexMatrix stack() const;
  /// Same plane with an orthonormal basis.
  LagrangianFrame orthonormalized() const;
  /// A * frame, re-orthonormalized.
  LagrangianFrame mapped(const ComplexMatrix& a) const;

 private:
  LagrangianFrame() = default;
  ComplexMatrix x_;
  ComplexMatrix y_;
};

class UnitaryPoint {
 public:
  explicit UnitaryPoint(ComplexMatrix w, const ToleranceProfile& tol = {});
  const ComplexMatrix& w() const { return w_; }
  int m() const { return static_cast<int>(w_.rows()); }

 private:
  ComplexMatrix w_;
};

/// W = (X + iY)(X - iY)^-1
UnitaryPoint frame_to_unitary(const LagrangianFrame& frame, const ToleranceProfile& tol = {});

/// W -> (A3 + A4 W)(A1 + A2 W)^-1 for a pseudo-unitary a_ring = [[A1, A2], [A3, A4]].
UnitaryPoint mobius_act(const ComplexMatrix& a_ring, const UnitaryPoint& w, const ToleranceProfile& tol = {});

struct DetKernel {
  cd det_w;          ///< det(X+iY) det(X*+iY*) / det(X*X+Y*Y)
  int dim_fix = 0;   ///< dim of the eigenvalue-1 eigenspace of W
  int dim_ker_y = 0;
};

DetKernel det_kernel_test(const LagrangianFrame& frame, const ToleranceProfile& tol = {});

/// Number of singular values of M below cutoff * max(1, sigma_max).
int kernel_dimension(const ComplexMatrix& m, double cutoff);

/// Evaluates theta -> A_E(theta) for a fixed model and energy.
class SymplecticCocycle {
 public:
  SymplecticCocycle(const OperatorModel& model, double e) : model_(&model), e_(e) {}

  const OperatorModel& model() const { return *model_; }
  double energy() const { return e_; }
  ComplexMatrix operator()(const BasePoint& theta) const { return transfer_matrix(*model_, e_, model_->f(theta)); }
  ComplexMatrix conjugator() const;

 private:
  const OperatorModel* model_;
  double e_;
};

}  // namespace gaplabel
