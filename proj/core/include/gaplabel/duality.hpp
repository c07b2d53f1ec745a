#pragma once

#include <complex>
#include <span>
#include <vector>

#include "gaplabel/model.hpp"

namespace gaplabel {

/// Real trigonometric polynomial v = sum_{k=-d}^{d} v_k e^{2 pi i k theta} with frequency alpha.
class TrigPolynomial {
 public:
  /// coeffs[k] = v_k for k = 0..d; negative modes are the conjugates.
  TrigPolynomial(std::vector<cd> coeffs, double alpha);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double alpha() const { return alpha_; }
  /// v_k for |k| <= d, zero outside.
  cd coeff(int k) const;
  double operator()(double theta) const;

 private:
  std::vector<cd> coeffs_;
  double alpha_;
};

/// Scalar operator u_{n+1} + u_{n-1} + v(theta + n alpha) u_n.
OperatorModel scalar_model(const TrigPolynomial& v);

/// Block operator of the Aubry dual: m = d, C upper-triangular Toeplitz of (v_d, ..., v_1),
/// base rotation by d alpha.
OperatorModel build_dual(const TrigPolynomial& v);

/// One-step companion matrix L_{E,v}(theta) (2d x 2d) of the dual recurrence.
ComplexMatrix dual_step(const TrigPolynomial& v, double e, double theta);

/// ||L(theta + (d-1) alpha) ... L(theta) - A_hat_E(theta)|| / ||A_hat_E(theta)|| for the dual model.
double check_factorization(const TrigPolynomial& v, double e, double theta);

struct IdsDualityReport {
  std::vector<double> energies;
  std::vector<double> ids_dual;    ///< block operator
  std::vector<double> ids_scalar;  ///< scalar operator
  double max_difference = 0.0;
};

IdsDualityReport check_ids_duality(const TrigPolynomial& v, std::span<const double> energies, int n, int workers = 1);

}  // namespace gaplabel
