#include "gaplabel/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "gaplabel/error.hpp"
#include "gaplabel/scanengine.hpp"

namespace gaplabel {

namespace {

constexpr cd kI{0.0, 1.0};

using SmallMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxBlock, kMaxBlock>;
using FrameMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2 * kMaxBlock, kMaxBlock>;

void orthonormalize(BlockMatrix& stack) {
  const Eigen::Index m = stack.cols();
  const FrameMatrix input = stack;
  Eigen::HouseholderQR<FrameMatrix> qr(input);
  FrameMatrix q = FrameMatrix::Identity(2 * m, m);
  q.applyOnTheLeft(qr.householderQ());
  stack = q;
}

ComplexMatrix unitary_from_stack(const BlockMatrix& stack) {
  const Eigen::Index m = stack.cols();
  const ComplexMatrix x = stack.topRows(m), y = stack.bottomRows(m);
  const ComplexMatrix minus = x - kI * y, plus = x + kI * y;
  return minus.transpose().partialPivLu().solve(plus.transpose()).transpose();
}

}  // namespace

// ---------------------------------------------------------------- ledger

double PhaseLedger::wrap(double turns) {
  double r = turns - std::round(turns);
  if (r <= -0.5) r += 1.0;
  return r;
}

double PhaseLedger::det_phase(const ComplexMatrix& w) { return wrap(std::arg(w.determinant()) / kTwoPi); }

double PhaseLedger::record(double phase_turns) {
  const double inc = wrap(phase_turns - last_phase_);
  accumulated_ += inc;
  last_phase_ = phase_turns;
  return inc;
}

double frame_det_phase(const BlockMatrix& stack) {
  const Eigen::Index m = stack.cols();
  if (m == 1) {
    const cd x = stack(0, 0), y = stack(1, 0);
    return PhaseLedger::wrap((std::arg(x + kI * y) - std::arg(x - kI * y)) / kTwoPi);
  }
  const SmallMatrix x = stack.topRows(m), y = stack.bottomRows(m);
  const cd plus = SmallMatrix(x + kI * y).determinant();
  const cd minus = SmallMatrix(x - kI * y).determinant();
  return PhaseLedger::wrap((std::arg(plus) - std::arg(minus)) / kTwoPi);
}

PhaseLedger track_phase(const StepPath& path, long steps, const LagrangianFrame& start, const ToleranceProfile& tol,
                        ComplexMatrix* final_stack) {
  if (steps < 0) throw Error(ErrorKind::InvalidInput, "step count must be nonnegative");
  BlockMatrix frame = start.orthonormalized().stack();
  PhaseLedger ledger(frame_det_phase(frame));
  BlockMatrix step, moved;
  std::vector<double> phases;
  for (long n = 0; n < steps; ++n) {
    // Accept a grid when every phase increment is small and the moved frame
    // vectors change little between samples; the second test catches a plane
    // that turns over between samples, which flips the frame vectors.
    int s = tol.initial_substeps;
    for (;;) {
      phases.clear();
      double prev = ledger.last_phase();
      BlockMatrix prev_frame = frame;
      double prev_floor = 1.0;  // smallest singular value of prev_frame
      bool ok = true;
      for (int k = 1; k <= s && ok; ++k) {
        path(n, k == s ? 1.0 : static_cast<double>(k) / s, step);
        moved.noalias() = step * frame;
        if ((moved - prev_frame).norm() >= tol.max_relative_step * prev_floor) ok = false;
        const double ph = frame_det_phase(moved);
        if (std::abs(PhaseLedger::wrap(ph - prev)) >= tol.max_turn_increment) ok = false;
        phases.push_back(ph);
        prev = ph;
        prev_frame = moved;
        const SmallMatrix gram = moved.adjoint() * moved;
        prev_floor = std::sqrt(std::max(0.0, Eigen::SelfAdjointEigenSolver<SmallMatrix>(gram, Eigen::EigenvaluesOnly).eigenvalues()(0)));
      }
      if (ok) break;
      s *= 2;
      if (s > tol.max_substeps)
        throw Error(ErrorKind::RefinementExhausted, "phase increments stay above the limit at step " + std::to_string(n));
    }
    for (double ph : phases) ledger.record(ph);
    ledger.note_substeps(s);
    ledger.note_step();
    frame = moved;  // the last substep is t = 1
    orthonormalize(frame);
  }
  ledger.set_last_point(unitary_from_stack(frame));
  if (final_stack) *final_stack = frame;
  return ledger;
}

// ---------------------------------------------------------------- homotopy

namespace {

// [[I, -CC*], [0, I]]
ComplexMatrix make_g1(const ComplexMatrix& ccs, bool inverse) {
  const Eigen::Index m = ccs.rows();
  ComplexMatrix g = ComplexMatrix::Identity(2 * m, 2 * m);
  g.topRightCorner(m, m) = inverse ? ccs : ComplexMatrix(-ccs);
  return g;
}

// [[I,0],[tI,I]] diag(V^-1, V*) G1
void right_factor(const GlPath& v, const ComplexMatrix& ccs, double t, BlockMatrix& out) {
  const Eigen::Index m = ccs.rows();
  const ComplexMatrix vinv = v.inverse(t);
  const ComplexMatrix vadj = v(t).adjoint();
  out.resize(2 * m, 2 * m);
  out.topLeftCorner(m, m) = vinv;
  out.topRightCorner(m, m) = -vinv * ccs;
  out.bottomLeftCorner(m, m) = t * vinv;
  out.bottomRightCorner(m, m) = vadj - t * vinv * ccs;
}

// G1^-1 [[I, tD], [0, I]] R  =  [[R_top + (tD + CC*) R_bot], [R_bot]]
void assemble(const BlockMatrix& right, const BlockMatrix& d, const ComplexMatrix& ccs, double t, BlockMatrix& out) {
  const Eigen::Index m = ccs.rows();
  out.resize(2 * m, 2 * m);
  SmallMatrix lead = t * d;
  lead += ccs;
  out.topRows(m) = right.topRows(m);
  out.topRows(m).noalias() += lead * right.bottomRows(m);
  out.bottomRows(m) = right.bottomRows(m);
}

BlockMatrix d_matrix(double e, const ComplexMatrix& f, const ComplexMatrix& ccs) {
  BlockMatrix d = -f - ccs;
  d.diagonal().array() += e - 1.0;
  return d;
}

}  // namespace

HomotopyPath::HomotopyPath(const OperatorModel& model, double e, BasePoint theta, const ToleranceProfile& tol)
    : model_(&model), e_(e), theta_(model.base().reduce(std::move(theta))), v_(model.c(), tol) {
  ccs_ = model.c() * model.c().adjoint();
  g1_ = make_g1(ccs_, false);
  g1_inv_ = make_g1(ccs_, true);
}

void HomotopyPath::unit(const ComplexMatrix& f, double t, BlockMatrix& out) const {
  BlockMatrix right;
  right_factor(v_, ccs_, t, right);
  assemble(right, d_matrix(e_, f, ccs_), ccs_, t, out);
}

ComplexMatrix HomotopyPath::operator()(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidInput, "homotopy parameter must be >= 0");
  const long n = static_cast<long>(std::floor(t));
  const double frac = t - static_cast<double>(n);
  const ComplexMatrix an = transfer_product(*model_, e_, theta_, n);
  if (frac == 0.0) return an;
  BlockMatrix head;
  unit(model_->f(model_->base().iterate(theta_, n)), frac, head);
  return head * an;
}

SchrodingerPath::SchrodingerPath(const OperatorModel& model, double e, const OrbitCache& orbit, int first,
                                 const ToleranceProfile& tol)
    : model_(&model), e_(e), orbit_(&orbit), first_(first), v_(model.c(), tol) {
  ccs_ = model.c() * model.c().adjoint();
}

void SchrodingerPath::operator()(long n, double t, BlockMatrix& out) {
  if (n != cached_n_) {
    const ComplexMatrix& f = (*orbit_)[first_ + static_cast<int>(n)];
    d_ = d_matrix(e_, f, ccs_);
    transfer_matrix(*model_, e_, f, a_);
    cached_n_ = n;
  }
  if (t == 1.0) {
    out = a_;
    return;
  }
  auto it = right_.find(t);
  if (it == right_.end()) {
    BlockMatrix r;
    right_factor(v_, ccs_, t, r);
    it = right_.emplace(t, std::move(r)).first;
  }
  assemble(it->second, d_, ccs_, t, out);
}

StepPath SchrodingerPath::as_step_path() {
  return [this](long n, double t, BlockMatrix& out) { (*this)(n, t, out); };
}

// ---------------------------------------------------------------- rotation number

RotationResult rot_number(const OperatorModel& model, double e, const OrbitCache& orbit, int first,
                          const LagrangianFrame& start, long n, const ToleranceProfile& tol) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  if (start.m() != model.m()) throw Error(ErrorKind::InvalidInput, "frame size does not match the model");
  if (first < 0 || first + n > orbit.length() + 1) throw Error(ErrorKind::InvalidInput, "orbit cache too short");
  SchrodingerPath path(model, e, orbit, first, tol);
  RotationResult out;
  out.n = n;
  out.ledger = track_phase(path.as_step_path(), n, start, tol);
  out.estimate = out.ledger.accumulated() / static_cast<double>(n);
  return out;
}

RotationResult rot_number(const OperatorModel& model, double e, const BasePoint& theta0, const LagrangianFrame& start,
                          long n, const ToleranceProfile& tol) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  const OrbitCache orbit(model, model.base().reduce(theta0), static_cast<int>(n));
  return rot_number(model, e, orbit, 0, start, n, tol);
}

std::vector<RotationResult> rot_scan(const OperatorModel& model, const BasePoint& theta0, long n,
                                     std::span<const double> energies, const RotOptions& opts) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  const OrbitCache orbit(model, model.base().reduce(theta0), static_cast<int>(n));
  const LagrangianFrame start = LagrangianFrame::horizontal(model.m());
  auto result = scan_indexed<RotationResult>(
      energies.size(), [&](std::size_t i) { return rot_number(model, energies[i], orbit, 0, start, n, opts.tol); },
      opts.workers);
  if (!result.ok()) {
    const auto& [index, message] = result.failures.front();
    throw Error(ErrorKind::RefinementExhausted, "rotation scan failed at E index " + std::to_string(index) + ": " + message);
  }
  std::vector<RotationResult> out;
  out.reserve(energies.size());
  for (auto& r : result.results) out.push_back(std::move(*r));
  return out;
}

// ---------------------------------------------------------------- phase curves

std::vector<double> unitary_phases(const ComplexMatrix& w) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(w, false);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double p = std::arg(solver.eigenvalues()(i)) / kTwoPi;
    if (p < 0.0) p += 1.0;
    if (p >= 1.0) p -= 1.0;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double circular_distance(double a, double b) { return std::abs(PhaseLedger::wrap(a - b)); }

// Assignment of new principal phases to lifted branches with the least total circular move.
std::vector<double> continue_branches(const std::vector<double>& lifted, const std::vector<double>& principal) {
  const std::size_t m = lifted.size();
  std::vector<std::size_t> perm(m), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = 1e300;
  do {
    double cost = 0.0;
    for (std::size_t j = 0; j < m && cost < best_cost; ++j) cost += circular_distance(principal[perm[j]], lifted[j]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = lifted[j] + PhaseLedger::wrap(principal[best[j]] - lifted[j]);
  return out;
}

struct PhaseSample {
  std::vector<double> principal;
  double total = 0.0;
};

}  // namespace

PhaseCurves phase_curves(const OperatorModel& model, const BasePoint& theta0, int n, std::span<const double> energies,
                         const ToleranceProfile& tol) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  if (energies.empty()) throw Error(ErrorKind::InvalidInput, "energy grid is empty");
  for (std::size_t i = 1; i < energies.size(); ++i)
    if (!(energies[i] > energies[i - 1])) throw Error(ErrorKind::InvalidInput, "energy grid must be increasing");
  const int m = model.m();
  const OrbitCache orbit(model, model.base().reduce(theta0), n + 1);
  const LagrangianFrame start = LagrangianFrame::horizontal(m);

  auto sample = [&](double e) {
    const RotationResult r = rot_number(model, e, orbit, 1, start, n + 1, tol);
    return PhaseSample{unitary_phases(*r.ledger.last_point()), r.ledger.accumulated()};
  };

  PhaseCurves out;
  out.energies.assign(energies.begin(), energies.end());
  out.n = n;
  out.m = m;

  PhaseSample first = sample(energies[0]);
  std::vector<double> lifted = first.principal;
  {
    const double principal_sum = std::accumulate(lifted.begin(), lifted.end(), 0.0);
    const long k = std::lround(first.total - principal_sum);
    const long q = static_cast<long>(std::floor(static_cast<double>(k) / m));
    const long r = k - q * m;
    for (int j = 0; j < m; ++j) lifted[static_cast<std::size_t>(j)] += static_cast<double>(q + (j < r ? 1 : 0));
  }
  out.phases.push_back(lifted);
  out.ledger_totals.push_back(first.total);

  // Move the branches from e_a to e_b, bisecting while any branch would jump by a quarter turn.
  // Branch moves are only known mod 1; the sum of the moves must also reproduce the change of the
  // continuously tracked ledger total, which catches a branch that wrapped by a full turn.
  auto advance = [&](auto&& self, double e_a, const std::vector<double>& from, double total_a, double e_b,
                     const PhaseSample& at_b, int depth) -> std::vector<double> {
    std::vector<double> to = continue_branches(from, at_b.principal);
    double worst = 0.0, moved = 0.0;
    for (std::size_t j = 0; j < from.size(); ++j) {
      worst = std::max(worst, std::abs(to[j] - from[j]));
      moved += to[j] - from[j];
    }
    if (worst < tol.max_turn_increment && std::abs(moved - (at_b.total - total_a)) < 0.5) return to;
    if (depth >= tol.max_grid_refinements)
      throw Error(ErrorKind::RefinementExhausted, "eigenphase branches cannot be separated near E = " + std::to_string(e_b));
    const double mid = 0.5 * (e_a + e_b);
    const PhaseSample at_mid = sample(mid);
    const std::vector<double> half = self(self, e_a, from, total_a, mid, at_mid, depth + 1);
    return self(self, mid, half, at_mid.total, e_b, at_b, depth + 1);
  };

  for (std::size_t i = 1; i < energies.size(); ++i) {
    const PhaseSample s = sample(energies[i]);
    lifted = advance(advance, energies[i - 1], lifted, out.ledger_totals.back(), energies[i], s, 0);
    double crossed = 0.0;
    for (std::size_t j = 0; j < lifted.size(); ++j)
      crossed += std::abs(std::floor(out.phases.back()[j]) - std::floor(lifted[j]));
    out.crossings.push_back(crossed);
    out.phases.push_back(lifted);
    out.ledger_totals.push_back(s.total);
  }
  return out;
}

// ---------------------------------------------------------------- characteristic polynomial

CharPolyParts char_poly_parts(const OperatorModel& model, const BasePoint& theta, int n, std::complex<double> z) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  const int m = model.m();
  const auto sites = site_potentials(model, theta, n);
  const FiniteRestriction fr = finite_restriction(model, sites);
  ComplexMatrix resolvent = -fr.h.matrix();
  resolvent.diagonal().array() += z;

  // Track P [I; 0] with QR re-orthonormalization: det U = det(Q_top) * prod det R_k.
  // Forming the raw product loses det U to cancellation once its entries grow.
  ComplexMatrix frame = ComplexMatrix::Zero(2 * m, m);
  frame.topRows(m).setIdentity();
  ComplexMatrix step = ComplexMatrix::Zero(2 * m, 2 * m);
  std::complex<double> scale = 1.0;
  for (const auto& f : sites) {
    ComplexMatrix zf = -f;
    zf.diagonal().array() += z;
    step.topLeftCorner(m, m) = zf * model.c_inv();
    step.topRightCorner(m, m) = -model.c().adjoint();
    step.bottomLeftCorner(m, m) = model.c_inv();
    const Eigen::HouseholderQR<ComplexMatrix> qr(step * frame);
    frame = qr.householderQ() * ComplexMatrix::Identity(2 * m, m);
    for (int i = 0; i < m; ++i) scale *= qr.matrixQR()(i, i);
  }
  CharPolyParts out;
  out.det_resolvent = resolvent.determinant();
  out.det_u = ComplexMatrix(frame.topRows(m)).determinant() * scale;
  out.det_c_power = std::pow(model.c().determinant(), n);
  return out;
}

double char_poly_identity(const OperatorModel& model, const BasePoint& theta, int n, std::complex<double> z) {
  const CharPolyParts p = char_poly_parts(model, theta, n, z);
  return std::abs(p.det_c_power * p.det_u - p.det_resolvent) / std::max(1.0, std::abs(p.det_resolvent));
}

// ---------------------------------------------------------------- energy derivative

EnergyDerivative energy_derivative(const OperatorModel& model, double e, const BasePoint& theta, int n,
                                   const LagrangianFrame& start) {
  if (n < 0) throw Error(ErrorKind::InvalidInput, "n must be nonnegative");
  const int m = model.m();
  const OrbitCache orbit(model, model.base().reduce(theta), std::max(n, 1));
  ComplexMatrix frame = start.stack();
  ComplexMatrix form = ComplexMatrix::Zero(m, m);  // X* dY - Y* dX
  // The form transforms as G* form G under frame -> frame G, so the frame is
  // re-orthonormalized each step to keep both factors of order one.
  for (int k = 0; k < n; ++k) {
    const ComplexMatrix cx = model.c_inv() * frame.topRows(m);
    form -= cx.adjoint() * cx;
    const Eigen::HouseholderQR<ComplexMatrix> qr(transfer_matrix(model, e, orbit[k]) * frame);
    const ComplexMatrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const ComplexMatrix r_inv = r.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(m, m));
    form = r_inv.adjoint() * form * r_inv;
    frame = qr.householderQ() * ComplexMatrix::Identity(2 * m, m);
  }
  const ComplexMatrix x = frame.topRows(m), y = frame.bottomRows(m);
  const ComplexMatrix minus = x - kI * y;
  const Eigen::PartialPivLU<ComplexMatrix> lu(minus);
  const ComplexMatrix minus_inv = lu.inverse();
  EnergyDerivative out;
  out.w = (x + kI * y) * minus_inv;
  out.omega = 2.0 * minus_inv.adjoint() * form * minus_inv;
  return out;
}

// ---------------------------------------------------------------- conjugation

ComplexMatrix rotation_conjugator(int m, std::span<const int> r, const RealVector& theta_lift) {
  double dot = 0.0;
  for (std::size_t i = 0; i < r.size() && static_cast<Eigen::Index>(i) < theta_lift.size(); ++i)
    dot += r[i] * theta_lift(static_cast<Eigen::Index>(i));
  const double psi = 0.5 * kPi * dot;
  ComplexMatrix b = ComplexMatrix::Identity(2 * m, 2 * m);
  b(0, 0) = std::cos(psi);
  b(0, m) = -std::sin(psi);
  b(m, 0) = std::sin(psi);
  b(m, m) = std::cos(psi);
  return b;
}

StepPath conjugated_path(StepPath path, int m, std::vector<int> r, RealVector alpha, RealVector theta0) {
  return [path = std::move(path), m, r = std::move(r), alpha = std::move(alpha), theta0 = std::move(theta0)](
             long n, double t, BlockMatrix& out) {
    BlockMatrix inner;
    path(n, t, inner);
    const RealVector at = theta0 + static_cast<double>(n) * alpha;
    const ComplexMatrix b0 = rotation_conjugator(m, r, at);
    const ComplexMatrix b1 = rotation_conjugator(m, r, at + t * alpha);
    out = b1.adjoint() * inner * b0;
  };
}

double conjugation_shift(const OperatorModel& model, double e, std::span<const int> r, long n,
                         const ToleranceProfile& tol) {
  const BaseDynamics& base = model.base();
  if (base.kind() != BaseKind::TorusRotation)
    throw Error(ErrorKind::UnsupportedBase, "conjugation shift needs a torus rotation");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  const BasePoint theta0 = base.origin();
  const OrbitCache orbit(model, theta0, static_cast<int>(n));
  const LagrangianFrame start = LagrangianFrame::horizontal(model.m());

  SchrodingerPath plain(model, e, orbit, 0, tol);
  const double original = track_phase(plain.as_step_path(), n, start, tol).accumulated();

  SchrodingerPath inner(model, e, orbit, 0, tol);
  const StepPath conj = conjugated_path(inner.as_step_path(), model.m(), std::vector<int>(r.begin(), r.end()),
                                        base.alpha(), theta0);
  const double conjugated = track_phase(conj, n, start, tol).accumulated();

  double shift = (conjugated - original) / static_cast<double>(n);
  shift -= std::floor(shift);
  return shift >= 1.0 ? 0.0 : shift;
}

}  // namespace gaplabel
