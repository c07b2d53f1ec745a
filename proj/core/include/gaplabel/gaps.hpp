#pragma once

#include <optional>
#include <vector>

#include "gaplabel/hyperbolicity.hpp"
#include "gaplabel/model.hpp"

namespace gaplabel {

struct GapLabel {
  std::vector<int> k;
  long j = 0;
  double distance = 0.0;  ///< |value - <k, alpha> - j|
};

/// Label group Z^d alpha + Z (torus) or Z (integers), searched to |k|_inf <= k_max.
class LabelGroup {
 public:
  static LabelGroup torus(const RealVector& alpha, int k_max = 20);
  static LabelGroup integers();

  bool is_torus() const { return alpha_.size() > 0; }
  const RealVector& alpha() const { return alpha_; }
  int k_max() const { return k_max_; }

  /// Value reduced mod 1 into [0, 1).
  static double reduce(double x);

  /// Element nearest to x: among candidates within `tol`, the one with smallest |k|_1;
  /// otherwise the overall nearest.
  GapLabel nearest(double x, double tol) const;
  /// min over group elements g of |x - g|.
  double distance(double x) const;

 private:
  RealVector alpha_;
  int k_max_ = 0;
};

enum class GapKind { Below, Interior, Above };

std::string_view to_string(GapKind kind) noexcept;

struct GapRecord {
  double e_lo = 0.0;
  double e_hi = 0.0;
  double ids_value = 0.0;  ///< at the interval midpoint
  GapKind kind = GapKind::Interior;
  std::optional<GapLabel> label;  ///< set when matched
  GapLabel best;                  ///< nearest candidate, matched or not
  std::optional<double> rot_value;
  std::optional<double> dist_mod_group;
  std::optional<SectionDegree> degree;

  double midpoint() const { return 0.5 * (e_lo + e_hi); }
};

struct GapScanOptions {
  int workers = 1;
  BasePoint theta0{};  ///< empty means the base origin
  UhParams uh{};
  ToleranceProfile tol{};
  bool with_rot = false;     ///< evaluate verify_ids_rot at each gap midpoint
  bool with_degree = false;  ///< evaluate the unstable-section degree at each gap midpoint
};

struct GapScan {
  std::vector<double> energies;
  std::vector<double> ids;
  std::vector<UhVerdict> uh;
  std::vector<GapRecord> gaps;
};

/// Maximal runs of grid energies that are UH with flat IDS, edges refined by bisection on the UH flag.
GapScan scan_gaps(const OperatorModel& model, double e_min, double e_max, int resolution, int n,
                  const GapScanOptions& opts = {});
std::vector<GapRecord> detect_gaps(const OperatorModel& model, double e_min, double e_max, int resolution, int n,
                                   const GapScanOptions& opts = {});

GapRecord label_gap(GapRecord record, const LabelGroup& group, int m, const ToleranceProfile& tol = {});

/// Label group of the model's base: Z^d alpha + Z for a rotation, Z otherwise.
LabelGroup label_group_for(const OperatorModel& model, int k_max = 20);

struct IdsRotCheck {
  double lhs = 0.0;  ///< m (1 - ids(E))
  double rhs = 0.0;  ///< rotation number, turns per step
  double distance_mod_group = 0.0;
};

IdsRotCheck verify_ids_rot(const OperatorModel& model, double e, int n, const LabelGroup& group,
                           const ToleranceProfile& tol = {}, const BasePoint& theta0 = {});

}  // namespace gaplabel
