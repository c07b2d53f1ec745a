#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gaplabel/model.hpp"

namespace gaplabel {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of disjoint closed intervals, sorted. Points are zero-width intervals.
class SpectralSet {
 public:
  SpectralSet() = default;
  /// Sorts and merges intervals whose separation is <= merge_gap (touching intervals always merge).
  explicit SpectralSet(std::vector<Interval> intervals, double merge_gap = 0.0);
  /// Union of [x - radius, x + radius].
  static SpectralSet from_points(std::span<const double> points, double radius = 0.0);

  bool empty() const { return intervals_.empty(); }
  const std::vector<Interval>& intervals() const { return intervals_; }
  double lo() const;
  double hi() const;
  double diameter() const { return hi() - lo(); }
  SpectralSet hull() const;

  SpectralSet minkowski_sum(const SpectralSet& other) const;
  SpectralSet unite(const SpectralSet& other) const;
  /// Complement of `gaps` (open intervals) inside [lo, hi].
  static SpectralSet complement_of(std::span<const Interval> gaps, double lo, double hi);

  double distance(double x) const;
  bool contains(double x, double slack = 0.0) const { return distance(x) <= slack; }
  double hausdorff(const SpectralSet& other) const;

  friend bool operator==(const SpectralSet&, const SpectralSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

/// A + ch(B) if diam A >= diam B, otherwise ch(A) + B.
SpectralSet star(const SpectralSet& a, const SpectralSet& b);

class RandomDiagonalLaw {
 public:
  RandomDiagonalLaw(std::vector<double> support, std::uint64_t seed);
  const std::vector<double>& support() const { return support_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<double> support_;
  std::uint64_t seed_;
};

struct MonteCarloOptions {
  int workers = 1;
  /// Thickening radius for the union; negative means twice the median unperturbed eigenvalue spacing.
  double merge_radius = -1.0;
};

struct MonteCarloResult {
  SpectralSet sigma1;
  std::vector<double> points;  ///< all sampled eigenvalues, sorted
  double merge_radius = 0.0;
  int realizations = 0;
};

/// Realization r: the first |S| are constant, the next |S|(|S|-1) are two-sided constant (v on the
/// lower half of the sites, v' on the upper half), the rest are i.i.d. uniform on S per site and component.
std::vector<double> realization(const RandomDiagonalLaw& law, int r, int sites, int m);

/// Eigenvalues of H^N_theta + diag(omega).
std::vector<double> perturbed_eigenvalues(const OperatorModel& model, const BasePoint& theta, int n,
                                          std::span<const double> omega);

MonteCarloResult monte_carlo_sigma1(const OperatorModel& model, const RandomDiagonalLaw& law, int n, int realizations,
                                    const MonteCarloOptions& opts = {});

struct BigstarReport {
  SpectralSet sigma0;
  SpectralSet predicted;  ///< sigma0 star S
  SpectralSet sigma1;     ///< Monte Carlo estimate
  double subset_violation = 0.0;
  double coverage_gap = 0.0;
  double merge_radius = 0.0;
};

/// Sigma_0 from the gap scan of the unperturbed model (resolution 400 on the operator bound).
SpectralSet estimate_sigma0(const OperatorModel& model, int n, int workers = 1, const ToleranceProfile& tol = {});

BigstarReport check_bigstar(const OperatorModel& model, const RandomDiagonalLaw& law, int n, int realizations,
                            const MonteCarloOptions& opts = {}, std::optional<SpectralSet> sigma0 = std::nullopt);

}  // namespace gaplabel
