#include "gaplabel/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaplabel/error.hpp"
#include "gaplabel/gaps.hpp"
#include "gaplabel/scanengine.hpp"

namespace gaplabel {

// ---------------------------------------------------------------- sets

SpectralSet::SpectralSet(std::vector<Interval> intervals, double merge_gap) {
  for (const auto& iv : intervals)
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi)
      throw Error(ErrorKind::InvalidInput, "invalid interval");
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.lo - intervals_.back().hi <= merge_gap)
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    else
      intervals_.push_back(iv);
  }
}

SpectralSet SpectralSet::from_points(std::span<const double> points, double radius) {
  std::vector<Interval> iv;
  iv.reserve(points.size());
  for (double x : points) iv.push_back({x - radius, x + radius});
  return SpectralSet(std::move(iv));
}

double SpectralSet::lo() const {
  if (empty()) throw Error(ErrorKind::EmptySet, "empty spectral set");
  return intervals_.front().lo;
}

double SpectralSet::hi() const {
  if (empty()) throw Error(ErrorKind::EmptySet, "empty spectral set");
  return intervals_.back().hi;
}

SpectralSet SpectralSet::hull() const { return SpectralSet({{lo(), hi()}}); }

SpectralSet SpectralSet::minkowski_sum(const SpectralSet& other) const {
  if (empty() || other.empty()) throw Error(ErrorKind::EmptySet, "Minkowski sum of an empty set");
  std::vector<Interval> out;
  out.reserve(intervals_.size() * other.intervals_.size());
  for (const auto& a : intervals_)
    for (const auto& b : other.intervals_) out.push_back({a.lo + b.lo, a.hi + b.hi});
  return SpectralSet(std::move(out));
}

SpectralSet SpectralSet::unite(const SpectralSet& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return SpectralSet(std::move(all));
}

SpectralSet SpectralSet::complement_of(std::span<const Interval> gaps, double lo, double hi) {
  std::vector<Interval> sorted(gaps.begin(), gaps.end());
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  double cursor = lo;
  for (const auto& g : sorted) {
    if (g.hi <= cursor) continue;
    if (g.lo >= hi) break;
    if (g.lo > cursor) out.push_back({cursor, g.lo});
    cursor = std::max(cursor, g.hi);
  }
  if (cursor < hi) out.push_back({cursor, hi});
  return SpectralSet(std::move(out));
}

double SpectralSet::distance(double x) const {
  if (empty()) throw Error(ErrorKind::EmptySet, "distance to an empty set");
  auto it = std::lower_bound(intervals_.begin(), intervals_.end(), x,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  double best = std::numeric_limits<double>::infinity();
  if (it != intervals_.end()) best = std::max(0.0, it->lo - x);
  if (it != intervals_.begin()) best = std::min(best, x - std::prev(it)->hi);
  return best;
}

double SpectralSet::hausdorff(const SpectralSet& other) const {
  if (empty() || other.empty()) throw Error(ErrorKind::EmptySet, "Hausdorff distance with an empty set");
  // For unions of intervals the one-sided distance is attained at endpoints or at gap midpoints
  // of the other set that fall inside this one.
  auto one_sided = [](const SpectralSet& a, const SpectralSet& b) {
    double worst = 0.0;
    for (const auto& iv : a.intervals_) {
      worst = std::max({worst, b.distance(iv.lo), b.distance(iv.hi)});
      for (std::size_t k = 0; k + 1 < b.intervals_.size(); ++k) {
        const double mid = 0.5 * (b.intervals_[k].hi + b.intervals_[k + 1].lo);
        if (mid >= iv.lo && mid <= iv.hi) worst = std::max(worst, b.distance(mid));
      }
    }
    return worst;
  };
  return std::max(one_sided(*this, other), one_sided(other, *this));
}

SpectralSet star(const SpectralSet& a, const SpectralSet& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySet, "star product of an empty set");
  if (a.diameter() >= b.diameter()) return a.minkowski_sum(b.hull());
  return a.hull().minkowski_sum(b);
}

// ---------------------------------------------------------------- random perturbations

RandomDiagonalLaw::RandomDiagonalLaw(std::vector<double> support, std::uint64_t seed) : seed_(seed) {
  for (double x : support)
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidLaw, "support must be finite");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.size() < 2) throw Error(ErrorKind::InvalidLaw, "support needs at least two distinct values");
  support_ = std::move(support);
}

std::vector<double> realization(const RandomDiagonalLaw& law, int r, int sites, int m) {
  const auto& s = law.support();
  const int k = static_cast<int>(s.size());
  std::vector<double> omega(static_cast<std::size_t>(sites) * static_cast<std::size_t>(m));
  if (r < k) {
    std::fill(omega.begin(), omega.end(), s[static_cast<std::size_t>(r)]);
  } else if (r < k * k) {
    const int pair = r - k;
    const int first = pair / (k - 1);
    int second = pair % (k - 1);
    if (second >= first) ++second;
    for (int n = 0; n < sites; ++n)
      for (int l = 0; l < m; ++l)
        omega[static_cast<std::size_t>(n * m + l)] = s[static_cast<std::size_t>(2 * n < sites ? first : second)];
  } else {
    const CounterRng rng(law.seed(), static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < omega.size(); ++i)
      omega[i] = s[static_cast<std::size_t>(rng.at(i) % static_cast<std::uint64_t>(k))];
  }
  return omega;
}

std::vector<double> perturbed_eigenvalues(const OperatorModel& model, const BasePoint& theta, int n,
                                          std::span<const double> omega) {
  const int m = model.m();
  if (omega.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
    throw Error(ErrorKind::InvalidInput, "perturbation has the wrong length");
  const auto sites = site_potentials(model, theta, n);
  RealVector values;
  if (m == 1) {
    RealVector diag(n);
    ComplexVector off = ComplexVector::Constant(std::max(n - 1, 0), model.c()(0, 0));
    for (int i = 0; i < n; ++i) diag(i) = sites[static_cast<std::size_t>(i)](0, 0).real() + omega[static_cast<std::size_t>(i)];
    values = tridiagonal_eigenvalues(diag, off);
  } else {
    ComplexMatrix h = finite_restriction(model, sites).h.matrix();
    // Row block r holds site N - r.
    for (int s = 0; s < n; ++s)
      for (int l = 0; l < m; ++l) {
        const int row = (n - 1 - s) * m + l;
        h(row, row) += omega[static_cast<std::size_t>(s * m + l)];
      }
    values = hermitian_eigenvalues(HermitianMatrix(h));
  }
  return {values.data(), values.data() + values.size()};
}

namespace {

double median_spacing(const OperatorModel& model, int n) {
  const std::vector<double> zero(static_cast<std::size_t>(n) * static_cast<std::size_t>(model.m()), 0.0);
  const auto ev = perturbed_eigenvalues(model, model.base().origin(), n, zero);
  std::vector<double> gaps;
  for (std::size_t i = 1; i < ev.size(); ++i) gaps.push_back(ev[i] - ev[i - 1]);
  if (gaps.empty()) return 0.0;
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

MonteCarloResult monte_carlo_sigma1(const OperatorModel& model, const RandomDiagonalLaw& law, int n, int realizations,
                                    const MonteCarloOptions& opts) {
  if (realizations < 1) throw Error(ErrorKind::InvalidInput, "need at least one realization");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  const int m = model.m();
  const int k = static_cast<int>(law.support().size());
  const BaseDynamics& base = model.base();
  auto jobs = scan_indexed<std::vector<double>>(
      static_cast<std::size_t>(realizations),
      [&](std::size_t idx) {
        const int r = static_cast<int>(idx);
        BasePoint theta = base.origin();
        if (r >= k * k) {
          // Phase drawn from a stream disjoint from the site draws.
          const CounterRng rng(law.seed() ^ 0x5bd1e995u, static_cast<std::uint64_t>(r));
          for (Eigen::Index i = 0; i < theta.size(); ++i)
            theta(i) = static_cast<double>(rng.at(static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53;
        }
        return perturbed_eigenvalues(model, theta, n, realization(law, r, n, m));
      },
      opts.workers);
  if (!jobs.ok()) throw Error(ErrorKind::InvalidInput, "realization failed: " + jobs.failures.front().second);
  MonteCarloResult out;
  out.realizations = realizations;
  for (auto& ev : jobs.results) out.points.insert(out.points.end(), ev->begin(), ev->end());
  std::sort(out.points.begin(), out.points.end());
  out.merge_radius = opts.merge_radius >= 0.0 ? opts.merge_radius : 2.0 * median_spacing(model, n);
  out.sigma1 = SpectralSet::from_points(out.points, out.merge_radius);
  return out;
}

SpectralSet estimate_sigma0(const OperatorModel& model, int n, int workers, const ToleranceProfile& tol) {
  const double bound = model.operator_bound() + 0.5;
  GapScanOptions opts;
  opts.workers = workers;
  opts.tol = tol;
  opts.uh = UhParams::from(tol);
  const auto gaps = detect_gaps(model, -bound, bound, 400, n, opts);
  std::vector<Interval> open;
  for (const auto& g : gaps) {
    // Gaps touching the scan boundary extend to infinity.
    const double lo = g.e_lo <= -bound ? -bound - 1.0 : g.e_lo;
    const double hi = g.e_hi >= bound ? bound + 1.0 : g.e_hi;
    open.push_back({lo, hi});
  }
  return SpectralSet::complement_of(open, -bound, bound);
}

BigstarReport check_bigstar(const OperatorModel& model, const RandomDiagonalLaw& law, int n, int realizations,
                            const MonteCarloOptions& opts, std::optional<SpectralSet> sigma0) {
  if (!model.base().connected()) throw Error(ErrorKind::UnsupportedBase, "the star identity needs a connected base");
  BigstarReport out;
  out.sigma0 = sigma0 ? *sigma0 : estimate_sigma0(model, n, opts.workers);
  if (out.sigma0.empty()) throw Error(ErrorKind::EmptySet, "unperturbed spectrum estimate is empty");
  const std::vector<double>& s = law.support();
  out.predicted = star(out.sigma0, SpectralSet::from_points(s));
  const MonteCarloResult mc = monte_carlo_sigma1(model, law, n, realizations, opts);
  out.sigma1 = mc.sigma1;
  out.merge_radius = mc.merge_radius;
  for (double x : mc.points) out.subset_violation = std::max(out.subset_violation, out.predicted.distance(x));
  // Sample the predicted set finely and measure how far the sampled eigenvalues are.
  constexpr int kGrid = 4000;
  const double lo = out.predicted.lo(), hi = out.predicted.hi();
  auto nearest_point = [&](double x) {
    auto it = std::lower_bound(mc.points.begin(), mc.points.end(), x);
    double d = std::numeric_limits<double>::infinity();
    if (it != mc.points.end()) d = *it - x;
    if (it != mc.points.begin()) d = std::min(d, x - *std::prev(it));
    return d;
  };
  for (const auto& iv : out.predicted.intervals()) {
    out.coverage_gap = std::max({out.coverage_gap, nearest_point(iv.lo), nearest_point(iv.hi)});
  }
  for (int i = 0; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    if (out.predicted.contains(x)) out.coverage_gap = std::max(out.coverage_gap, nearest_point(x));
  }
  return out;
}

}  // namespace gaplabel
