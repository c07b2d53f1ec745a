#pragma once

#include <cmath>

namespace gaplabel {

/// Every numerical threshold used by the library, in one place.
///
/// Defaults are the values the test-suite is written against; callers may
/// tighten or loosen them uniformly by passing a modified profile.
struct ToleranceProfile {
  // matkernel
  double hermitian_asymmetry = 1e-12;  ///< relative, checked before symmetrization
  double unitary = 1e-10;
  double singular_rel = 1e-14;         ///< sigma_min / sigma_max below this is singular

  // cocycle
  double lagrangian = 1e-10;           ///< ||X*Y - Y*X|| relative to ||frame||^2
  double frame_rank = 1e-10;           ///< sigma_min / sigma_max of the 2m x m stack
  double unitary_point = 1e-8;
  double degenerate = 1e-12;
  double kernel_cutoff = 1e-8;         ///< relative singular-value cutoff for dim ker

  // model
  double eigen_tie = 1e-12;            ///< eigenvalues within this of E count as <= E

  // rotation
  double max_turn_increment = 0.25;
  double max_relative_step = 1.0;      ///< frame displacement per substep over its smallest singular value
  int initial_substeps = 16;
  int max_substeps = 1 << 14;
  int max_grid_refinements = 40;

  // hyperbolicity
  double uh_gap_threshold = std::exp(0.01);  ///< per-step singular value ratio
  int uh_iterations = 2000;
  int uh_samples = 32;
  int uh_max_samples = 4096;           ///< per-loop cap when refining a fast-turning section
  double uh_angle = 1e-6;
  double uh_continuity = 0.5;          ///< max principal angle between neighbouring samples (rad)

  // gaps
  double flat_tol = 2e-3;
  double label_tol = 1e-2;
  int k_max = 20;
  int edge_bisections = 10;
};

}  // namespace gaplabel
