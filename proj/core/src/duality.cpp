#include "gaplabel/duality.hpp"

#include <cmath>

#include "gaplabel/cocycle.hpp"
#include "gaplabel/error.hpp"

namespace gaplabel {

TrigPolynomial::TrigPolynomial(std::vector<cd> coeffs, double alpha) : coeffs_(std::move(coeffs)), alpha_(alpha) {
  if (coeffs_.size() < 2) throw Error(ErrorKind::InvalidInput, "trigonometric polynomial needs degree >= 1");
  for (const cd& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw Error(ErrorKind::InvalidInput, "non-finite coefficient");
  if (!std::isfinite(alpha_)) throw Error(ErrorKind::InvalidInput, "non-finite frequency");
  if (coeffs_.back() == cd(0.0, 0.0)) throw Error(ErrorKind::DegreeZeroLeading, "leading coefficient is zero");
  // v_0 must be real for v to be real-valued.
  coeffs_[0] = cd(coeffs_[0].real(), 0.0);
}

cd TrigPolynomial::coeff(int k) const {
  const int d = degree();
  if (k > d || k < -d) return {0.0, 0.0};
  return k >= 0 ? coeffs_[static_cast<std::size_t>(k)] : std::conj(coeffs_[static_cast<std::size_t>(-k)]);
}

double TrigPolynomial::operator()(double theta) const {
  double out = coeffs_[0].real();
  for (int k = 1; k <= degree(); ++k) out += 2.0 * (coeffs_[static_cast<std::size_t>(k)] * std::polar(1.0, kTwoPi * k * theta)).real();
  return out;
}

OperatorModel scalar_model(const TrigPolynomial& v) {
  std::vector<FourierBlock> blocks;
  for (int k = -v.degree(); k <= v.degree(); ++k) {
    if (v.coeff(k) == cd(0.0, 0.0)) continue;
    blocks.push_back({{k}, ComplexMatrix::Constant(1, 1, v.coeff(k))});
  }
  return OperatorModel(ComplexMatrix::Identity(1, 1), Potential::trig_blocks(1, std::move(blocks)),
                       BaseDynamics::torus_rotation({v.alpha()}));
}

OperatorModel build_dual(const TrigPolynomial& v) {
  const int d = v.degree();
  if (d > kMaxBlock) throw Error(ErrorKind::InvalidInput, "dual degree exceeds the supported block size");
  ComplexMatrix c = ComplexMatrix::Zero(d, d);
  ComplexMatrix hop = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j >= i) c(i, j) = v.coeff(d - (j - i));
      hop(i, j) = v.coeff(i - j);  // includes v_0 on the diagonal
    }
  // Diagonal entry i is 2 cos 2 pi (theta + (d-1-i) alpha): modes +-1 with diagonal phases.
  ComplexMatrix plus = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) plus(i, i) = std::polar(1.0, kTwoPi * (d - 1 - i) * v.alpha());
  std::vector<FourierBlock> blocks{{{0}, hop}, {{1}, plus}, {{-1}, plus.adjoint()}};
  return OperatorModel(std::move(c), Potential::trig_blocks(d, std::move(blocks)),
                       BaseDynamics::torus_rotation({d * v.alpha()}));
}

ComplexMatrix dual_step(const TrigPolynomial& v, double e, double theta) {
  const int d = v.degree();
  ComplexMatrix l = ComplexMatrix::Zero(2 * d, 2 * d);
  const cd lead = v.coeff(d);
  // State (u_{n+d-1}, ..., u_{n-d}); column c holds u_{n+d-1-c}.
  for (int col = 0; col < 2 * d; ++col) {
    const int k = d - 1 - col;  // offset of u_{n+k} relative to n
    l(0, col) = -v.coeff(k) / lead;
  }
  l(0, d - 1) = (e - 2.0 * std::cos(kTwoPi * theta) - v.coeff(0)) / lead;
  for (int r = 1; r < 2 * d; ++r) l(r, r - 1) = 1.0;
  return l;
}

double check_factorization(const TrigPolynomial& v, double e, double theta) {
  const int d = v.degree();
  ComplexMatrix product = ComplexMatrix::Identity(2 * d, 2 * d);
  for (int j = 0; j < d; ++j) product = dual_step(v, e, theta + j * v.alpha()) * product;
  const OperatorModel dual = build_dual(v);
  BasePoint p(1);
  p(0) = theta - std::floor(theta);
  const ComplexMatrix a_hat = transfer_step(dual, e, p).a_hat;
  return (product - a_hat).norm() / a_hat.norm();
}

IdsDualityReport check_ids_duality(const TrigPolynomial& v, std::span<const double> energies, int n, int workers) {
  const OperatorModel dual = build_dual(v);
  const OperatorModel scalar = scalar_model(v);
  IdsOptions opts;
  opts.workers = workers;
  IdsDualityReport out;
  out.energies.assign(energies.begin(), energies.end());
  out.ids_dual = ids(dual, dual.base().origin(), n, energies, opts);
  out.ids_scalar = ids(scalar, scalar.base().origin(), n, energies, opts);
  for (std::size_t i = 0; i < energies.size(); ++i)
    out.max_difference = std::max(out.max_difference, std::abs(out.ids_dual[i] - out.ids_scalar[i]));
  return out;
}

}  // namespace gaplabel
