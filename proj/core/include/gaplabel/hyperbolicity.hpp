#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaplabel/cocycle.hpp"
#include "gaplabel/model.hpp"

namespace gaplabel {

struct UhParams {
  int n_iter = 2000;
  int sample_count = 32;
  double gap_threshold = std::exp(0.01);  ///< per-step ratio sigma_m / sigma_{m+1}

  static UhParams from(const ToleranceProfile& tol) { return {tol.uh_iterations, tol.uh_samples, tol.uh_gap_threshold}; }
};

/// Finite-time Lyapunov exponents (descending) from QR iteration along the orbit of theta0.
std::vector<double> lyapunov_spectrum(const OperatorModel& model, double e, const BasePoint& theta0, int n);

/// Largest principal angle between the column spans of two orthonormal 2m x m frames.
double subspace_distance(const ComplexMatrix& q1, const ComplexMatrix& q2);
/// Smallest principal angle between the spans.
double minimal_angle(const ComplexMatrix& q1, const ComplexMatrix& q2);

struct SplittingEstimate {
  /// samples[j * per_loop + s] = origin + (s / per_loop) e_j.
  std::vector<BasePoint> samples;
  int loops = 0;
  int per_loop = 0;
  std::vector<LagrangianFrame> unstable;
  std::vector<LagrangianFrame> stable;
  double gap = 0.0;  ///< smallest per-step log singular-value gap over samples
  int iterations = 0;
  bool converged = false;
  double convergence_error = 0.0;  ///< largest angle between runs from different initial planes
  double invariance_error = 0.0;   ///< largest angle between A Lambda(theta) and Lambda(T theta)
  double transversality = 0.0;     ///< smallest angle between Lambda_u and Lambda_s
  double continuity = 0.0;         ///< largest angle between neighbouring samples
};

enum class UhVerdict { Uniform, NotUniform, Inconclusive };

std::string_view to_string(UhVerdict v) noexcept;

struct UhResult {
  bool is_uh = false;
  UhVerdict verdict = UhVerdict::Inconclusive;
  double lyapunov_gap = 0.0;  ///< gamma_m - gamma_{m+1} along the orbit of the origin
  std::optional<SplittingEstimate> splitting;
  std::string reason;
};

/// Numerical test for uniform hyperbolicity of the cocycle at energy E.
UhResult uh_test(const OperatorModel& model, double e, const UhParams& params = {}, const ToleranceProfile& tol = {});

struct SectionDegree {
  std::vector<int> r;
  std::vector<double> raw;  ///< windings before rounding
};

/// Winding of det W over Lambda_u along each coordinate loop.
SectionDegree section_degree(const SplittingEstimate& splitting, const ToleranceProfile& tol = {});

/// uh_test followed by section_degree, doubling the sample count while the grid is too coarse.
std::optional<SectionDegree> degree_at(const OperatorModel& model, double e, const UhParams& params = {},
                                       const ToleranceProfile& tol = {});

}  // namespace gaplabel
