#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gaplabel/cocycle.hpp"
#include "gaplabel/model.hpp"

namespace gaplabel {

class OrbitCache;

/// Continuous branch of (1/2pi) arg det W along a recorded path, in turns.
class PhaseLedger {
 public:
  PhaseLedger() = default;
  /// Anchor the ledger at a point whose principal det phase is `start_turns`; accumulated starts at 0.
  explicit PhaseLedger(double start_turns) : last_phase_(start_turns) {}

  /// Principal det phase of a unitary matrix in turns, in (-1/2, 1/2].
  static double det_phase(const ComplexMatrix& w);
  /// Wrap a turn difference into (-1/2, 1/2].
  static double wrap(double turns);

  /// Move to a point with principal phase `phase_turns`; returns the increment.
  double record(double phase_turns);

  double accumulated() const { return accumulated_; }
  double last_phase() const { return last_phase_; }
  /// Largest number of substeps any unit step needed.
  int substep_budget() const { return substep_budget_; }
  void note_substeps(int s) { substep_budget_ = std::max(substep_budget_, s); }
  long steps() const { return steps_; }
  void note_step() { ++steps_; }
  const std::optional<ComplexMatrix>& last_point() const { return last_point_; }
  void set_last_point(ComplexMatrix w) { last_point_ = std::move(w); }

 private:
  double accumulated_ = 0.0;
  double last_phase_ = 0.0;
  int substep_budget_ = 0;
  long steps_ = 0;
  std::optional<ComplexMatrix> last_point_;
};

/// Principal det phase (turns) of W for the plane spanned by [X; Y]; no orthonormality needed.
double frame_det_phase(const BlockMatrix& stack);

/// A family of unit steps: step n is the path t -> M(n, t), t in [0, 1], with
/// M(n, 0) = I and M(n, 1) the n-th cocycle matrix.
using StepPath = std::function<void(long n, double t, BlockMatrix& out)>;

/// Follow det W of the frame through `steps` unit steps, refining each step
/// until every substep moves the phase by less than the tolerance.
PhaseLedger track_phase(const StepPath& path, long steps, const LagrangianFrame& start,
                        const ToleranceProfile& tol = {}, ComplexMatrix* final_stack = nullptr);

/// The explicit homotopy P_E^t from the identity to A_E along one orbit.
class HomotopyPath {
 public:
  HomotopyPath(const OperatorModel& model, double e, BasePoint theta, const ToleranceProfile& tol = {});

  /// P^t(theta) for t >= 0, extended by P^t = P^{t-n}(T^n theta) A_{E,n}(theta).
  ComplexMatrix operator()(double t) const;

  /// P^t for t in [0, 1] at a point where the potential takes the value f.
  void unit(const ComplexMatrix& f, double t, BlockMatrix& out) const;

  const OperatorModel& model() const { return *model_; }
  double energy() const { return e_; }

 private:
  const OperatorModel* model_;
  double e_;
  BasePoint theta_;
  GlPath v_;
  ComplexMatrix g1_, g1_inv_, ccs_;
};

/// Unit steps of the Schroedinger cocycle along a cached orbit; step n uses f(orbit[first + n]).
class SchrodingerPath {
 public:
  SchrodingerPath(const OperatorModel& model, double e, const OrbitCache& orbit, int first = 0,
                  const ToleranceProfile& tol = {});
  void operator()(long n, double t, BlockMatrix& out);
  StepPath as_step_path();

 private:
  const OperatorModel* model_;
  double e_;
  const OrbitCache* orbit_;
  int first_;
  BlockMatrix g1_, g1_inv_;
  ComplexMatrix ccs_;
  GlPath v_;
  std::map<double, BlockMatrix> right_;  // [[I,0],[tI,I]] diag(V^-1, V*) G1, by t
  long cached_n_ = -1;
  BlockMatrix d_;  // E - f - CC* - I for cached_n_
  BlockMatrix a_;  // A_E for cached_n_
};

struct RotationResult {
  double estimate = 0.0;  ///< accumulated / N, turns per step
  long n = 0;
  PhaseLedger ledger;
};

/// Fibered rotation number estimate from N steps starting at theta0.
RotationResult rot_number(const OperatorModel& model, double e, const BasePoint& theta0,
                          const LagrangianFrame& start, long n, const ToleranceProfile& tol = {});
/// Same, reusing a precomputed orbit (steps use orbit[first], orbit[first+1], ...).
RotationResult rot_number(const OperatorModel& model, double e, const OrbitCache& orbit, int first,
                          const LagrangianFrame& start, long n, const ToleranceProfile& tol = {});

struct RotOptions {
  int workers = 1;
  ToleranceProfile tol{};
};

/// rot_number over an energy grid with frame [I; 0].
std::vector<RotationResult> rot_scan(const OperatorModel& model, const BasePoint& theta0, long n,
                                     std::span<const double> energies, const RotOptions& opts = {});

struct PhaseCurves {
  std::vector<double> energies;  ///< output grid (the input grid)
  int n = 0;
  int m = 0;
  /// phases[i][j]: branch j at energies[i], turns.
  std::vector<std::vector<double>> phases;
  /// Ledger total m x_E^{N+1} at each grid energy.
  std::vector<double> ledger_totals;
  /// Integer crossings found per grid interval (branch j passes an integer between i and i+1).
  std::vector<double> crossings;
};

/// Eigenphase branches of W for the plane A_{E,N+1}(T theta0)[I; 0] as functions of E. Integer
/// values of a branch occur exactly at eigenvalues of H^N_theta0.
PhaseCurves phase_curves(const OperatorModel& model, const BasePoint& theta0, int n,
                         std::span<const double> energies, const ToleranceProfile& tol = {});

/// Eigenphases of a unitary matrix, in turns, in [0, 1), ascending.
std::vector<double> unitary_phases(const ComplexMatrix& w);

/// |det(C)^N det U_z(N+1) - det(z - H^N)| / max(1, |det(z - H^N)|).
double char_poly_identity(const OperatorModel& model, const BasePoint& theta, int n, std::complex<double> z);

/// det(z - H^N) and the top-left block U_z(N+1) of the N-step product from T theta.
struct CharPolyParts {
  std::complex<double> det_resolvent;
  std::complex<double> det_u;
  std::complex<double> det_c_power;
};
CharPolyParts char_poly_parts(const OperatorModel& model, const BasePoint& theta, int n, std::complex<double> z);

/// W and Omega(E, n) for the frame A_{E,n}(theta) [X0; Y0], with dW/dE = i W Omega.
struct EnergyDerivative {
  ComplexMatrix w;
  ComplexMatrix omega;
};
EnergyDerivative energy_derivative(const OperatorModel& model, double e, const BasePoint& theta, int n,
                                   const LagrangianFrame& start);

/// Rotation by pi <r, theta> / 2 in the (x_1, y_1) plane; Hermitian-symplectic and unitary.
ComplexMatrix rotation_conjugator(int m, std::span<const int> r, const RealVector& theta_lift);

/// Step path of B(theta_n + t alpha)^-1 M(n, t) B(theta_n) with theta_n = theta0 + n alpha on the real lift.
StepPath conjugated_path(StepPath path, int m, std::vector<int> r, RealVector alpha, RealVector theta0);

/// rot(conjugated) - rot(original) at resolution N, reduced to [0, 1).
double conjugation_shift(const OperatorModel& model, double e, std::span<const int> r, long n,
                         const ToleranceProfile& tol = {});

}  // namespace gaplabel
