#include "gaplabel/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "gaplabel/error.hpp"
#include "gaplabel/scanengine.hpp"

namespace gaplabel {

namespace {

double frac(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

using SmallMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxBlock, kMaxBlock>;

}  // namespace

// ---------------------------------------------------------------- base

BaseDynamics BaseDynamics::torus_rotation(std::vector<double> alpha) {
  if (alpha.empty()) throw Error(ErrorKind::InvalidInput, "rotation vector must be nonempty");
  BaseDynamics b;
  b.kind_ = BaseKind::TorusRotation;
  b.alpha_.resize(static_cast<Eigen::Index>(alpha.size()));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!std::isfinite(alpha[i])) throw Error(ErrorKind::InvalidInput, "non-finite rotation vector");
    b.alpha_(static_cast<Eigen::Index>(i)) = frac(alpha[i]);
  }
  return b;
}

BaseDynamics BaseDynamics::cat_map() {
  BaseDynamics b;
  b.kind_ = BaseKind::CatMap;
  return b;
}

BaseDynamics BaseDynamics::doubling_map() {
  BaseDynamics b;
  b.kind_ = BaseKind::Doubling;
  return b;
}

int BaseDynamics::dimension() const {
  switch (kind_) {
    case BaseKind::TorusRotation: return static_cast<int>(alpha_.size());
    case BaseKind::CatMap: return 2;
    case BaseKind::Doubling: return 1;
  }
  return 0;
}

BasePoint BaseDynamics::reduce(BasePoint p) const {
  if (p.size() != dimension()) throw Error(ErrorKind::InvalidInput, "base point has wrong dimension");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p(i))) throw Error(ErrorKind::InvalidInput, "non-finite base point");
    p(i) = frac(p(i));
  }
  return p;
}

BasePoint BaseDynamics::advance(const BasePoint& p) const { return iterate(p, 1); }

BasePoint BaseDynamics::retreat(const BasePoint& p) const { return iterate(p, -1); }

BasePoint BaseDynamics::iterate(const BasePoint& p, long n) const {
  BasePoint q = reduce(p);
  switch (kind_) {
    case BaseKind::TorusRotation:
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        // Split n * alpha into an integer-free part to keep precision for large n.
        const double shift = std::fmod(static_cast<double>(n) * alpha_(i), 1.0);
        q(i) = frac(q(i) + shift);
      }
      return q;
    case BaseKind::CatMap: {
      const long steps = n < 0 ? -n : n;
      for (long s = 0; s < steps; ++s) {
        const double x = q(0), y = q(1);
        if (n > 0) {
          q(0) = frac(2.0 * x + y);
          q(1) = frac(x + y);
        } else {
          q(0) = frac(x - y);
          q(1) = frac(-x + 2.0 * y);
        }
      }
      return q;
    }
    case BaseKind::Doubling:
      if (n < 0) throw Error(ErrorKind::UnsupportedDirection, "doubling map is not invertible");
      for (long s = 0; s < n; ++s) q(0) = frac(2.0 * q(0));
      return q;
  }
  return q;
}

// ---------------------------------------------------------------- potential

Potential Potential::free(int m) {
  if (m < 1 || m > kMaxBlock) throw Error(ErrorKind::InvalidInput, "block size out of range");
  Potential p;
  p.kind_ = PotentialKind::Free;
  p.m_ = m;
  p.constant_ = ComplexMatrix::Zero(m, m);
  return p;
}

Potential Potential::constant(const HermitianMatrix& value) {
  const int m = static_cast<int>(value.dim());
  if (m < 1 || m > kMaxBlock) throw Error(ErrorKind::InvalidInput, "block size out of range");
  Potential p;
  p.kind_ = PotentialKind::Constant;
  p.m_ = m;
  p.constant_ = value.matrix();
  return p;
}

Potential Potential::amo_dual(int m, double amplitude) {
  if (m < 1 || m > kMaxBlock) throw Error(ErrorKind::InvalidInput, "block size out of range");
  if (!std::isfinite(amplitude)) throw Error(ErrorKind::InvalidInput, "non-finite amplitude");
  Potential p;
  p.kind_ = PotentialKind::AmoDual;
  p.m_ = m;
  p.amplitude_ = amplitude;
  return p;
}

Potential Potential::trig_blocks(int m, std::vector<FourierBlock> blocks, const ToleranceProfile& tol) {
  if (m < 1 || m > kMaxBlock) throw Error(ErrorKind::InvalidInput, "block size out of range");
  std::map<std::vector<int>, ComplexMatrix> table;
  std::size_t dim = 0;
  for (const auto& b : blocks) dim = std::max(dim, b.k.size());
  for (auto& b : blocks) {
    if (b.coeff.rows() != m || b.coeff.cols() != m)
      throw Error(ErrorKind::InvalidInput, "Fourier block has wrong shape");
    if (!all_finite(b.coeff)) throw Error(ErrorKind::InvalidInput, "non-finite Fourier block");
    b.k.resize(dim, 0);
    auto [it, inserted] = table.emplace(b.k, b.coeff);
    if (!inserted) it->second += b.coeff;
  }
  double scale = 1.0;
  for (const auto& [k, c] : table) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  for (const auto& [k, c] : table) {
    std::vector<int> neg(k.size());
    std::transform(k.begin(), k.end(), neg.begin(), [](int x) { return -x; });
    auto it = table.find(neg);
    const ComplexMatrix partner = it == table.end() ? ComplexMatrix::Zero(m, m) : it->second;
    if ((c - partner.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian_asymmetry * scale)
      throw Error(ErrorKind::InvalidInput, "Fourier blocks for k and -k must be adjoint (potential not Hermitian)");
  }
  Potential p;
  p.kind_ = PotentialKind::TrigBlocks;
  p.m_ = m;
  for (auto& [k, c] : table) p.blocks_.push_back({k, c});
  return p;
}

int Potential::frequency_dimension() const {
  switch (kind_) {
    case PotentialKind::Free:
    case PotentialKind::Constant: return 0;
    case PotentialKind::AmoDual: return 1;
    case PotentialKind::TrigBlocks: {
      int d = 0;
      for (const auto& b : blocks_) {
        for (int i = static_cast<int>(b.k.size()); i > 0; --i)
          if (b.k[static_cast<std::size_t>(i - 1)] != 0) {
            d = std::max(d, i);
            break;
          }
      }
      return d;
    }
  }
  return 0;
}

ComplexMatrix Potential::operator()(const BasePoint& theta) const {
  if (theta.size() < frequency_dimension())
    throw Error(ErrorKind::InvalidInput, "base point has fewer coordinates than the potential reads");
  switch (kind_) {
    case PotentialKind::Free:
    case PotentialKind::Constant: return constant_;
    case PotentialKind::AmoDual:
      return ComplexMatrix::Identity(m_, m_) * cd(2.0 * amplitude_ * std::cos(kTwoPi * theta(0)), 0.0);
    case PotentialKind::TrigBlocks: {
      ComplexMatrix out = ComplexMatrix::Zero(m_, m_);
      for (const auto& b : blocks_) {
        double phase = 0.0;
        for (std::size_t i = 0; i < b.k.size(); ++i)
          if (b.k[i] != 0) phase += b.k[i] * theta(static_cast<Eigen::Index>(i));
        phase = kTwoPi * frac(phase);
        out += b.coeff * cd(std::cos(phase), std::sin(phase));
      }
      return 0.5 * (out + out.adjoint());
    }
  }
  return constant_;
}

// ---------------------------------------------------------------- model

OperatorModel::OperatorModel(ComplexMatrix c, Potential f, BaseDynamics base, const ToleranceProfile& tol)
    : c_(std::move(c)), f_(std::move(f)), base_(std::move(base)) {
  if (c_.rows() != c_.cols() || c_.rows() < 1 || c_.rows() > kMaxBlock)
    throw Error(ErrorKind::InvalidInput, "C must be square with 1 <= m <= 8");
  if (!all_finite(c_)) throw Error(ErrorKind::InvalidInput, "non-finite entry in C");
  if (f_.dim() != m()) throw Error(ErrorKind::InvalidInput, "potential block size differs from C");
  if (f_.frequency_dimension() > base_.dimension())
    throw Error(ErrorKind::InvalidInput, "potential reads more torus coordinates than the base has");
  c_condition_ = condition_number(c_);
  if (!std::isfinite(c_condition_) || 1.0 / c_condition_ < tol.singular_rel)
    throw Error(ErrorKind::SingularMatrix, "C is not invertible");
  c_inv_ = c_.inverse();

  // Kronecker sample of the base; the same points for every model.
  constexpr int kSamples = 10000;
  const int d = base_.dimension();
  double bound = 0.0;
  if (f_.kind() == PotentialKind::Free || f_.kind() == PotentialKind::Constant) {
    bound = hermitian_eigenvalues(HermitianMatrix(f_(base_.origin()))).cwiseAbs().maxCoeff();
  } else {
    BasePoint p(d);
    for (int j = 0; j < kSamples; ++j) {
      for (int i = 0; i < d; ++i) p(i) = frac(j * std::sqrt(2.0 + 3.0 * i) + 0.5 / kSamples);
      const ComplexMatrix v = f_(p);
      const double n =
          m() == 1 ? std::abs(v(0, 0).real())
                   : Eigen::SelfAdjointEigenSolver<ComplexMatrix>(v, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
      bound = std::max(bound, n);
    }
  }
  if (!std::isfinite(bound)) throw Error(ErrorKind::InvalidInput, "potential is not bounded on the sample");
  potential_bound_ = bound;
}

double OperatorModel::operator_bound() const {
  return potential_bound_ + 2.0 * svd(c_).sigma(0);
}

std::vector<ComplexMatrix> site_potentials(const OperatorModel& model, const BasePoint& theta, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  const BaseDynamics& base = model.base();
  BasePoint p = base.reduce(theta);
  for (int k = 1; k <= n; ++k) {
    p = base.kind() == BaseKind::TorusRotation ? base.iterate(theta, k) : base.advance(p);
    out.push_back(model.f(p));
  }
  return out;
}

FiniteRestriction finite_restriction(const OperatorModel& model, std::span<const ComplexMatrix> sites) {
  const int n = static_cast<int>(sites.size());
  const int m = model.m();
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  ComplexMatrix h = ComplexMatrix::Zero(m * n, m * n);
  // Row block r holds site N - r.
  for (int r = 0; r < n; ++r) {
    h.block(r * m, r * m, m, m) = sites[static_cast<std::size_t>(n - 1 - r)];
    if (r + 1 < n) {
      h.block((r + 1) * m, r * m, m, m) = model.c();
      h.block(r * m, (r + 1) * m, m, m) = model.c().adjoint();
    }
  }
  return {n, m, HermitianMatrix(h)};
}

FiniteRestriction finite_restriction(const OperatorModel& model, const BasePoint& theta, int n) {
  const auto sites = site_potentials(model, theta, n);
  return finite_restriction(model, sites);
}

long count_eigenvalues_below(const OperatorModel& model, std::span<const ComplexMatrix> sites, double e,
                             const ToleranceProfile& tol) {
  const int m = model.m();
  const double shifted = e + tol.eigen_tie;
  // A vanishing pivot is nudged off zero; inertia is unaffected for shifts below the tie tolerance.
  const double tiny = 1e-300;
  long negatives = 0;

  if (m == 1) {
    const double c2 = std::norm(model.c()(0, 0));
    double d = 0.0;
    bool first = true;
    for (const auto& b : sites) {
      d = b(0, 0).real() - shifted - (first ? 0.0 : c2 / d);
      first = false;
      if (d == 0.0) d = -tiny;
      if (d < 0.0) ++negatives;
    }
    return negatives;
  }

  const SmallMatrix c = model.c();
  const SmallMatrix cadj = c.adjoint();
  SmallMatrix d_inv_c;  // D_n^{-1} C from the previous site
  Eigen::SelfAdjointEigenSolver<SmallMatrix> solver(m);
  bool first = true;
  for (const auto& b : sites) {
    SmallMatrix d = b;
    d.diagonal().array() -= shifted;
    if (!first) d.noalias() -= cadj * d_inv_c;
    first = false;
    d = (0.5 * (d + d.adjoint())).eval();
    solver.compute(d, Eigen::ComputeEigenvectors);
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxBlock, 1> lambda = solver.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (lambda(i) == 0.0) lambda(i) = -tiny;
      if (lambda(i) < 0.0) ++negatives;
    }
    const SmallMatrix& v = solver.eigenvectors();
    d_inv_c.noalias() = v * lambda.cwiseInverse().asDiagonal() * (v.adjoint() * c);
  }
  return negatives;
}

double eigenvalue_count(const OperatorModel& model, const BasePoint& theta, int n, double e,
                        const ToleranceProfile& tol) {
  const auto sites = site_potentials(model, theta, n);
  return static_cast<double>(count_eigenvalues_below(model, sites, e, tol)) / (static_cast<double>(model.m()) * n);
}

std::vector<double> ids(const OperatorModel& model, const BasePoint& theta0, int n, std::span<const double> energies,
                        const IdsOptions& opts) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  const int phases = std::max(1, opts.phase_average);
  std::vector<OrbitCache> caches;
  caches.reserve(static_cast<std::size_t>(phases));
  for (int j = 0; j < phases; ++j) {
    BasePoint start = theta0;
    if (j > 0) start(0) += static_cast<double>(j) / phases;
    caches.emplace_back(model, model.base().reduce(start), n);
  }
  const double norm = static_cast<double>(model.m()) * n * phases;
  auto result = scan_indexed<double>(
      energies.size(),
      [&](std::size_t i) {
        long total = 0;
        for (const auto& cache : caches) total += count_eigenvalues_below(model, cache.sites(n), energies[i], opts.tol);
        return static_cast<double>(total) / norm;
      },
      opts.workers);
  if (!result.ok()) throw Error(ErrorKind::InvalidInput, "ids scan failed: " + result.failures.front().second);
  std::vector<double> out;
  out.reserve(energies.size());
  for (auto& r : result.results) out.push_back(*r);
  return out;
}

}  // namespace gaplabel
