#include "gaplabel/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "gaplabel/error.hpp"
#include "gaplabel/rotation.hpp"

namespace gaplabel {

namespace {

using GrowthVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxBlock, 1>;

// Orthonormalize the columns in place and return log |R_ii|.
GrowthVector qr_step(BlockMatrix& basis) {
  const Eigen::Index rows = basis.rows(), cols = basis.cols();
  Eigen::HouseholderQR<BlockMatrix> qr(basis);
  BlockMatrix q = BlockMatrix::Identity(rows, cols);
  q.applyOnTheLeft(qr.householderQ());
  GrowthVector logs(cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    const cd rii = qr.matrixQR()(i, i);
    const double d = std::abs(rii);
    logs(i) = std::log(std::max(d, 1e-300));
    // Keep a positive diagonal so the basis is a continuous function of the input.
    if (d > 0.0) q.col(i) *= rii / d;
  }
  basis = q;
  return logs;
}

ComplexMatrix generic_plane(int m, double shift) {
  // [I; S] with S Hermitian is Lagrangian.
  ComplexMatrix s = ComplexMatrix::Identity(m, m) * shift;
  for (int i = 0; i + 1 < m; ++i) {
    s(i, i + 1) = cd(0.25, 0.1 * (i + 1));
    s(i + 1, i) = std::conj(s(i, i + 1));
  }
  ComplexMatrix stack(2 * m, m);
  stack << ComplexMatrix::Identity(m, m), s;
  return LagrangianFrame::from_stack(stack).orthonormalized().stack();
}

// Transfer matrices A_E(T^j theta) for j = -k .. k, stored once per sample point.
class OrbitSteps {
 public:
  OrbitSteps(const OperatorModel& model, double e, const BasePoint& theta, int k) : k_(k) {
    const BaseDynamics& base = model.base();
    steps_.resize(static_cast<std::size_t>(2 * k + 2));
    BasePoint p = base.iterate(theta, -k);
    for (int j = -k; j <= k + 1; ++j) {
      if (base.kind() == BaseKind::TorusRotation) p = base.iterate(theta, j);
      transfer_matrix(model, e, model.f(p), steps_[static_cast<std::size_t>(j + k)]);
      if (base.kind() != BaseKind::TorusRotation) p = base.advance(p);
    }
  }
  const BlockMatrix& at(int j) const { return steps_[static_cast<std::size_t>(j + k_)]; }

 private:
  int k_;
  std::vector<BlockMatrix> steps_;
};

// Push a plane forward through A(T^first) ... A(T^{last-1}).
BlockMatrix forward(const OrbitSteps& orbit, int first, int last, BlockMatrix plane, GrowthVector* growth) {
  BlockMatrix next;
  for (int j = first; j < last; ++j) {
    next.noalias() = orbit.at(j) * plane;
    plane = next;
    const GrowthVector g = qr_step(plane);
    if (growth) *growth += g;
  }
  return plane;
}

// Pull a plane back from T^last to T^first with A^{-1} = -J A* J.
BlockMatrix backward(const OrbitSteps& orbit, int first, int last, BlockMatrix plane, int m) {
  BlockMatrix next, tmp;
  for (int j = last - 1; j >= first; --j) {
    // J v = [v_bottom; -v_top]
    tmp.resize(plane.rows(), plane.cols());
    tmp.topRows(m) = plane.bottomRows(m);
    tmp.bottomRows(m) = -plane.topRows(m);
    next.noalias() = orbit.at(j).adjoint() * tmp;
    plane.topRows(m) = -next.bottomRows(m);
    plane.bottomRows(m) = next.topRows(m);
    qr_step(plane);
  }
  return plane;
}

struct SampleData {
  ComplexMatrix unstable, stable;
  double gap = 0.0;
  double invariance = 0.0;
  double convergence = 0.0;
  double transversality = 0.0;
};

SampleData compute_sample(const OperatorModel& model, double e, const BasePoint& theta, int k,
                          const ComplexMatrix& start1, const ComplexMatrix& start2) {
  const int m = model.m();
  const OrbitSteps orbit(model, e, theta, k);
  BlockMatrix basis(2 * m, 2 * m);
  basis.leftCols(m) = start1;
  // J * start is orthogonal to a Lagrangian plane and completes it to a basis.
  basis.rightCols(m) = symplectic_form(m) * start1;
  GrowthVector growth = GrowthVector::Zero(2 * m);
  const BlockMatrix full = forward(orbit, -k, 0, basis, &growth);

  SampleData d;
  d.unstable = full.leftCols(m);
  std::vector<double> g(growth.data(), growth.data() + growth.size());
  std::sort(g.begin(), g.end(), std::greater<>());
  d.gap = (g[static_cast<std::size_t>(m - 1)] - g[static_cast<std::size_t>(m)]) / k;

  d.stable = backward(orbit, 0, k, start1, m);
  // Independent estimates at T theta from a different initial plane.
  const BlockMatrix u_next = forward(orbit, -k + 1, 1, start2, nullptr);
  const BlockMatrix s_next = backward(orbit, 1, k + 1, start2, m);
  const ComplexMatrix pushed_u = forward(orbit, 0, 1, d.unstable, nullptr);
  const ComplexMatrix pushed_s = forward(orbit, 0, 1, d.stable, nullptr);
  d.invariance = std::max(subspace_distance(pushed_u, u_next), subspace_distance(pushed_s, s_next));
  // Same point, different initial plane.
  d.convergence = subspace_distance(forward(orbit, -k, 0, start2, nullptr), d.unstable);
  d.transversality = minimal_angle(d.unstable, d.stable);
  return d;
}

BasePoint loop_point(const BaseDynamics& base, int loop, int s, int per_loop) {
  BasePoint p = base.origin();
  p(loop) = static_cast<double>(s) / per_loop;
  return p;
}

SplittingEstimate assemble_splitting(const BaseDynamics& base, int loops, int per_loop, int k,
                                     const std::vector<std::vector<SampleData>>& data, const ToleranceProfile& tol) {
  SplittingEstimate sp;
  sp.iterations = k;
  sp.loops = loops;
  sp.per_loop = per_loop;
  sp.gap = 1e300;
  sp.transversality = 1e300;
  for (int j = 0; j < loops; ++j)
    for (int s = 0; s < per_loop; ++s) {
      const SampleData& d = data[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
      const SampleData& next = data[static_cast<std::size_t>(j)][static_cast<std::size_t>((s + 1) % per_loop)];
      sp.samples.push_back(loop_point(base, j, s, per_loop));
      sp.unstable.push_back(LagrangianFrame::from_stack(d.unstable, tol));
      sp.stable.push_back(LagrangianFrame::from_stack(d.stable, tol));
      sp.gap = std::min(sp.gap, d.gap);
      sp.transversality = std::min(sp.transversality, d.transversality);
      sp.invariance_error = std::max(sp.invariance_error, d.invariance);
      sp.convergence_error = std::max(sp.convergence_error, d.convergence);
      sp.continuity = std::max({sp.continuity, subspace_distance(d.unstable, next.unstable),
                                subspace_distance(d.stable, next.stable)});
    }
  sp.converged = sp.convergence_error < tol.uh_angle && sp.invariance_error < tol.uh_angle;
  return sp;
}

}  // namespace

std::string_view to_string(UhVerdict v) noexcept {
  switch (v) {
    case UhVerdict::Uniform: return "UH";
    case UhVerdict::NotUniform: return "not-UH";
    case UhVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<double> lyapunov_spectrum(const OperatorModel& model, double e, const BasePoint& theta0, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "iteration count must be positive");
  const int m = model.m();
  const BaseDynamics& base = model.base();
  BlockMatrix basis = BlockMatrix::Identity(2 * m, 2 * m);
  Eigen::VectorXd growth = Eigen::VectorXd::Zero(2 * m);
  BasePoint p = base.reduce(theta0);
  BlockMatrix a, next;
  for (int i = 0; i < n; ++i) {
    transfer_matrix(model, e, model.f(p), a);
    next.noalias() = a * basis;
    basis = next;
    growth += qr_step(basis);
    p = base.kind() == BaseKind::TorusRotation ? base.iterate(theta0, i + 1) : base.advance(p);
  }
  std::vector<double> out(growth.data(), growth.data() + growth.size());
  for (double& x : out) x /= n;
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double subspace_distance(const ComplexMatrix& q1, const ComplexMatrix& q2) {
  const ComplexMatrix residual = q2 - q1 * (q1.adjoint() * q2);
  const double s = svd(residual).sigma(0);
  return std::asin(std::min(1.0, s));
}

double minimal_angle(const ComplexMatrix& q1, const ComplexMatrix& q2) {
  const double s = svd(q1.adjoint() * q2).sigma(0);
  return std::acos(std::min(1.0, s));
}

UhResult uh_test(const OperatorModel& model, double e, const UhParams& params, const ToleranceProfile& tol) {
  const BaseDynamics& base = model.base();
  if (!base.invertible()) throw Error(ErrorKind::UnsupportedDirection, "uh_test needs an invertible base");
  if (params.n_iter < 1 || params.sample_count < 3 || !(params.gap_threshold > 1.0))
    throw Error(ErrorKind::InvalidInput, "invalid uh_test parameters");
  const int m = model.m();
  const double log_threshold = std::log(params.gap_threshold);

  UhResult out;
  const auto spectrum = lyapunov_spectrum(model, e, base.origin(), params.n_iter);
  out.lyapunov_gap = spectrum[static_cast<std::size_t>(m - 1)] - spectrum[static_cast<std::size_t>(m)];
  if (out.lyapunov_gap < log_threshold) {
    out.verdict = UhVerdict::NotUniform;
    out.reason = "Lyapunov gap below threshold";
    return out;
  }

  const int k = std::min(params.n_iter, std::max(64, static_cast<int>(std::ceil(30.0 / out.lyapunov_gap))));
  const int loops = base.kind() == BaseKind::TorusRotation ? base.dimension() : 1;
  const ComplexMatrix start1 = generic_plane(m, 0.37), start2 = generic_plane(m, -1.3);
  // One sample usually settles the points that fail; skip the rest of the loop then.
  SampleData probe = compute_sample(model, e, base.origin(), k, start1, start2);
  if (probe.gap < log_threshold) {
    out.verdict = UhVerdict::NotUniform;
    out.reason = "singular-value gap below threshold at some sample";
    return out;
  }
  if (probe.convergence >= tol.uh_angle || probe.invariance >= tol.uh_angle) {
    out.verdict = UhVerdict::Inconclusive;
    out.reason = "invariant planes did not converge";
    return out;
  }
  std::vector<std::vector<SampleData>> data(static_cast<std::size_t>(loops));
  for (int j = 0; j < loops; ++j)
    for (int s = 0; s < params.sample_count; ++s)
      if (j == 0 && s == 0)
        data[0].push_back(std::move(probe));
      else
      data[static_cast<std::size_t>(j)].push_back(
          compute_sample(model, e, loop_point(base, j, s, params.sample_count), k, start1, start2));
  SplittingEstimate sp = assemble_splitting(base, loops, params.sample_count, k, data, tol);
  // A section that winds quickly needs more samples before neighbours look close; old samples are kept.
  for (int per_loop = params.sample_count; per_loop < tol.uh_max_samples; per_loop *= 2) {
    const bool resolvable = sp.converged && sp.gap >= log_threshold && sp.transversality > tol.uh_angle;
    if (sp.continuity < tol.uh_continuity || !resolvable) break;
    for (int j = 0; j < loops; ++j) {
      auto& row = data[static_cast<std::size_t>(j)];
      std::vector<SampleData> refined;
      refined.reserve(row.size() * 2);
      for (int s = 0; s < per_loop; ++s) {
        refined.push_back(std::move(row[static_cast<std::size_t>(s)]));
        refined.push_back(compute_sample(model, e, loop_point(base, j, 2 * s + 1, 2 * per_loop), k, start1, start2));
      }
      row = std::move(refined);
    }
    sp = assemble_splitting(base, loops, 2 * per_loop, k, data, tol);
  }

  const bool converged = sp.converged;
  const bool gap_ok = sp.gap >= log_threshold;
  const bool transverse = sp.transversality > tol.uh_angle;
  const bool continuous = sp.continuity < tol.uh_continuity;
  out.splitting = std::move(sp);
  if (converged && gap_ok && transverse && continuous) {
    out.is_uh = true;
    out.verdict = UhVerdict::Uniform;
    return out;
  }
  if (!gap_ok) {
    out.verdict = UhVerdict::NotUniform;
    out.reason = "singular-value gap below threshold at some sample";
  } else if (!converged) {
    out.verdict = UhVerdict::Inconclusive;
    out.reason = "invariant planes did not converge";
  } else {
    out.verdict = UhVerdict::NotUniform;
    out.reason = transverse ? "unstable section is discontinuous" : "stable and unstable planes meet";
  }
  return out;
}

SectionDegree section_degree(const SplittingEstimate& splitting, const ToleranceProfile& tol) {
  if (!splitting.converged) throw Error(ErrorKind::InvalidInput, "splitting has not converged");
  if (splitting.samples.empty() || splitting.per_loop < 3)
    throw Error(ErrorKind::InvalidInput, "splitting has no sample loops");
  SectionDegree out;
  for (int j = 0; j < splitting.loops; ++j) {
    double total = 0.0;
    double prev = 0.0;
    for (int s = 0; s <= splitting.per_loop; ++s) {
      const auto& frame = splitting.unstable[static_cast<std::size_t>(j * splitting.per_loop + s % splitting.per_loop)];
      const double ph = PhaseLedger::det_phase(frame_to_unitary(frame, tol).w());
      if (s > 0) {
        const double inc = PhaseLedger::wrap(ph - prev);
        if (std::abs(inc) >= tol.max_turn_increment)
          throw Error(ErrorKind::RefineGrid, "det W moves by a quarter turn between neighbouring samples");
        total += inc;
      }
      prev = ph;
    }
    const double rounded = std::round(total);
    if (std::abs(total - rounded) > 1e-3) throw Error(ErrorKind::RefineGrid, "winding is not close to an integer");
    out.r.push_back(static_cast<int>(rounded));
    out.raw.push_back(total);
  }
  return out;
}

std::optional<SectionDegree> degree_at(const OperatorModel& model, double e, const UhParams& params,
                                       const ToleranceProfile& tol) {
  if (model.base().kind() != BaseKind::TorusRotation)
    throw Error(ErrorKind::UnsupportedBase, "section degree needs a torus rotation");
  UhParams p = params;
  for (int attempt = 0; attempt < 4; ++attempt, p.sample_count *= 2) {
    const UhResult r = uh_test(model, e, p, tol);
    if (!r.is_uh) return std::nullopt;
    try {
      return section_degree(*r.splitting, tol);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::RefineGrid) throw;
    }
  }
  throw Error(ErrorKind::RefineGrid, "section degree still unresolved after refining the sample grid");
}

}  // namespace gaplabel
