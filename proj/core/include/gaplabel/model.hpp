#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gaplabel/matkernel.hpp"

namespace gaplabel {

/// Point of the base space: torus coordinates in [0,1)^d.
using BasePoint = Eigen::VectorXd;

enum class BaseKind { TorusRotation, CatMap, Doubling };

/// Base dynamics T on a torus. Rational independence of a rotation vector is
/// the caller's responsibility; it is not checked.
class BaseDynamics {
 public:
  static BaseDynamics torus_rotation(std::vector<double> alpha);
  static BaseDynamics cat_map();
  static BaseDynamics doubling_map();

  BaseKind kind() const { return kind_; }
  int dimension() const;
  /// Rotation vector, reduced mod 1. Empty for non-rotation bases.
  const RealVector& alpha() const { return alpha_; }
  bool invertible() const { return kind_ != BaseKind::Doubling; }
  bool connected() const { return true; }

  BasePoint advance(const BasePoint& p) const;
  BasePoint retreat(const BasePoint& p) const;
  /// T^n p for signed n; negative n requires an invertible base.
  BasePoint iterate(const BasePoint& p, long n) const;
  BasePoint reduce(BasePoint p) const;
  BasePoint origin() const { return BasePoint::Zero(dimension()); }

 private:
  BaseKind kind_ = BaseKind::TorusRotation;
  RealVector alpha_;
};

enum class PotentialKind { Free, Constant, AmoDual, TrigBlocks };

/// One Fourier block of f: coeff * exp(2 pi i <k, theta>).
struct FourierBlock {
  std::vector<int> k;
  ComplexMatrix coeff;
};

/// Hermitian-valued potential f on the base torus.
class Potential {
 public:
  static Potential free(int m);
  static Potential constant(const HermitianMatrix& value);
  /// 2 * amplitude * cos(2 pi theta_1) * I_m
  static Potential amo_dual(int m, double amplitude = 1.0);
  /// Finite trigonometric polynomial. Blocks for k and -k must be adjoint to each other.
  static Potential trig_blocks(int m, std::vector<FourierBlock> blocks, const ToleranceProfile& tol = {});

  PotentialKind kind() const { return kind_; }
  int dim() const { return m_; }
  /// Number of torus coordinates the potential reads.
  int frequency_dimension() const;
  const std::vector<FourierBlock>& blocks() const { return blocks_; }
  double amplitude() const { return amplitude_; }

  ComplexMatrix operator()(const BasePoint& theta) const;

 private:
  PotentialKind kind_ = PotentialKind::Free;
  int m_ = 1;
  double amplitude_ = 1.0;
  ComplexMatrix constant_;
  std::vector<FourierBlock> blocks_;
};

/// (H u)_n = C* u_{n-1} + f(T^n theta) u_n + C u_{n+1} on l^2(Z, C^m).
class OperatorModel {
 public:
  OperatorModel(ComplexMatrix c, Potential f, BaseDynamics base, const ToleranceProfile& tol = {});

  int m() const { return static_cast<int>(c_.rows()); }
  const ComplexMatrix& c() const { return c_; }
  const ComplexMatrix& c_inv() const { return c_inv_; }
  const Potential& potential() const { return f_; }
  const BaseDynamics& base() const { return base_; }
  double c_condition() const { return c_condition_; }
  /// sup ||f|| over a fixed 10^4-point sample of the base.
  double potential_bound() const { return potential_bound_; }
  /// Bound on ||H||: sup ||f|| + 2 ||C||.
  double operator_bound() const;

  ComplexMatrix f(const BasePoint& theta) const { return f_(theta); }

 private:
  ComplexMatrix c_;
  ComplexMatrix c_inv_;
  Potential f_;
  BaseDynamics base_;
  double c_condition_ = 1.0;
  double potential_bound_ = 0.0;
};

/// H restricted to sites 1..N, stored with site N in the top-left block.
struct FiniteRestriction {
  int n = 0;
  int m = 0;
  HermitianMatrix h;
};

/// Diagonal blocks f(T^n theta), n = 1..N, in site order.
std::vector<ComplexMatrix> site_potentials(const OperatorModel& model, const BasePoint& theta, int n);

FiniteRestriction finite_restriction(const OperatorModel& model, const BasePoint& theta, int n);
/// Same matrix, assembled from precomputed site blocks (site order 1..N).
FiniteRestriction finite_restriction(const OperatorModel& model, std::span<const ComplexMatrix> sites);

/// Number of eigenvalues of H^N that are <= e (ties within tol.eigen_tie count),
/// computed from the inertia of the block LDL* factorisation of H^N - e.
long count_eigenvalues_below(const OperatorModel& model, std::span<const ComplexMatrix> sites, double e,
                             const ToleranceProfile& tol = {});

/// Fraction of eigenvalues of H^N_theta that are <= e.
double eigenvalue_count(const OperatorModel& model, const BasePoint& theta, int n, double e,
                        const ToleranceProfile& tol = {});

struct IdsOptions {
  int workers = 1;
  /// If > 1, average the counting function over this many phases theta0 + j/K e_1.
  int phase_average = 1;
  ToleranceProfile tol{};
};

/// Finite-volume integrated density of states on an energy grid.
std::vector<double> ids(const OperatorModel& model, const BasePoint& theta0, int n, std::span<const double> energies,
                        const IdsOptions& opts = {});

}  // namespace gaplabel
