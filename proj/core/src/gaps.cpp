#include "gaplabel/gaps.hpp"

#include <algorithm>
#include <cmath>

#include "gaplabel/error.hpp"
#include "gaplabel/rotation.hpp"
#include "gaplabel/scanengine.hpp"

namespace gaplabel {

LabelGroup LabelGroup::torus(const RealVector& alpha, int k_max) {
  if (alpha.size() < 1) throw Error(ErrorKind::InvalidInput, "torus label group needs a frequency vector");
  if (k_max < 0) throw Error(ErrorKind::InvalidInput, "search bound must be nonnegative");
  LabelGroup g;
  g.alpha_ = alpha;
  for (Eigen::Index i = 0; i < g.alpha_.size(); ++i) g.alpha_(i) = reduce(g.alpha_(i));
  g.k_max_ = k_max;
  return g;
}

LabelGroup LabelGroup::integers() { return LabelGroup{}; }

double LabelGroup::reduce(double x) {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

GapLabel LabelGroup::nearest(double x, double tol) const {
  const int d = static_cast<int>(alpha_.size());
  GapLabel best_any{std::vector<int>(static_cast<std::size_t>(d), 0), std::lround(x), std::abs(x - std::round(x))};
  std::optional<GapLabel> best_within;
  int best_norm = 0;
  std::vector<int> k(static_cast<std::size_t>(d), -k_max_);
  for (;;) {
    double dot = 0.0;
    int norm = 0;
    for (int i = 0; i < d; ++i) {
      dot += k[static_cast<std::size_t>(i)] * alpha_(i);
      norm += std::abs(k[static_cast<std::size_t>(i)]);
    }
    const double rest = x - dot;
    const GapLabel cand{k, std::lround(rest), std::abs(rest - std::round(rest))};
    if (cand.distance < best_any.distance) best_any = cand;
    if (cand.distance < tol &&
        (!best_within || norm < best_norm || (norm == best_norm && cand.distance < best_within->distance))) {
      best_within = cand;
      best_norm = norm;
    }
    int i = 0;
    while (i < d && k[static_cast<std::size_t>(i)] == k_max_) k[static_cast<std::size_t>(i++)] = -k_max_;
    if (i == d) break;
    ++k[static_cast<std::size_t>(i)];
  }
  return best_within ? *best_within : best_any;
}

double LabelGroup::distance(double x) const { return nearest(x, 0.0).distance; }

std::string_view to_string(GapKind kind) noexcept {
  switch (kind) {
    case GapKind::Below: return "below";
    case GapKind::Interior: return "interior";
    case GapKind::Above: return "above";
  }
  return "interior";
}

LabelGroup label_group_for(const OperatorModel& model, int k_max) {
  if (model.base().kind() == BaseKind::TorusRotation) return LabelGroup::torus(model.base().alpha(), k_max);
  return LabelGroup::integers();
}

GapRecord label_gap(GapRecord record, const LabelGroup& group, int m, const ToleranceProfile& tol) {
  if (!(record.ids_value >= 0.0 && record.ids_value <= 1.0))
    throw Error(ErrorKind::InvalidInput, "IDS value must lie in [0, 1]");
  record.best = group.nearest(m * record.ids_value, tol.label_tol);
  if (record.best.distance < tol.label_tol)
    record.label = record.best;
  else
    record.label.reset();
  return record;
}

IdsRotCheck verify_ids_rot(const OperatorModel& model, double e, int n, const LabelGroup& group,
                           const ToleranceProfile& tol, const BasePoint& theta0) {
  const BasePoint start = theta0.size() ? model.base().reduce(theta0) : model.base().origin();
  const std::vector<double> es{e};
  IdsOptions io;
  io.tol = tol;
  IdsRotCheck out;
  out.lhs = model.m() * (1.0 - ids(model, start, n, es, io)[0]);
  out.rhs = rot_number(model, e, start, LagrangianFrame::horizontal(model.m()), n, tol).estimate;
  out.distance_mod_group = group.distance(out.lhs - out.rhs);
  return out;
}

namespace {

// Move the boundary between a UH point `inside` and a non-UH point `outside` towards the true edge.
double bisect_edge(const OperatorModel& model, double inside, double outside, const GapScanOptions& opts) {
  for (int i = 0; i < opts.tol.edge_bisections; ++i) {
    const double mid = 0.5 * (inside + outside);
    if (uh_test(model, mid, opts.uh, opts.tol).is_uh)
      inside = mid;
    else
      outside = mid;
  }
  return inside;
}

}  // namespace

GapScan scan_gaps(const OperatorModel& model, double e_min, double e_max, int resolution, int n,
                  const GapScanOptions& opts) {
  if (!(e_max > e_min) || !std::isfinite(e_min) || !std::isfinite(e_max))
    throw Error(ErrorKind::InvalidInput, "energy range is empty");
  if (resolution < 50) throw Error(ErrorKind::InvalidInput, "resolution must be at least 50 points");
  if (n < 1) throw Error(ErrorKind::InvalidInput, "N must be positive");
  const BasePoint theta0 = opts.theta0.size() ? model.base().reduce(opts.theta0) : model.base().origin();

  GapScan out;
  out.energies.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i)
    out.energies[static_cast<std::size_t>(i)] = e_min + (e_max - e_min) * i / (resolution - 1);
  IdsOptions io;
  io.workers = opts.workers;
  io.tol = opts.tol;
  out.ids = ids(model, theta0, n, out.energies, io);

  auto uh_scan = scan_indexed<UhVerdict>(
      out.energies.size(), [&](std::size_t i) { return uh_test(model, out.energies[i], opts.uh, opts.tol).verdict; },
      opts.workers);
  if (!uh_scan.ok()) throw Error(ErrorKind::InvalidInput, "uh scan failed: " + uh_scan.failures.front().second);
  for (auto& v : uh_scan.results) out.uh.push_back(*v);

  // Runs of UH points with flat IDS.
  struct Run {
    std::size_t first, last;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < out.energies.size(); ++i) {
    if (out.uh[i] != UhVerdict::Uniform) continue;
    if (!runs.empty() && runs.back().last + 1 == i && out.uh[i - 1] == UhVerdict::Uniform &&
        std::abs(out.ids[i] - out.ids[runs.back().first]) <= opts.tol.flat_tol)
      runs.back().last = i;
    else
      runs.push_back({i, i});
  }

  const std::size_t last_index = out.energies.size() - 1;
  auto records = scan_indexed<GapRecord>(
      runs.size(),
      [&](std::size_t r) {
        const Run run = runs[r];
        GapRecord rec;
        rec.e_lo = run.first == 0 ? out.energies.front()
                                  : bisect_edge(model, out.energies[run.first], out.energies[run.first - 1], opts);
        rec.e_hi = run.last == last_index ? out.energies.back()
                                          : bisect_edge(model, out.energies[run.last], out.energies[run.last + 1], opts);
        const std::vector<double> mid{rec.midpoint()};
        IdsOptions single;
        single.tol = opts.tol;
        rec.ids_value = ids(model, theta0, n, mid, single)[0];
        if (rec.ids_value <= opts.tol.flat_tol)
          rec.kind = GapKind::Below;
        else if (rec.ids_value >= 1.0 - opts.tol.flat_tol)
          rec.kind = GapKind::Above;
        rec = label_gap(rec, label_group_for(model, opts.tol.k_max), model.m(), opts.tol);
        if (opts.with_rot) {
          const IdsRotCheck c = verify_ids_rot(model, rec.midpoint(), n, label_group_for(model, opts.tol.k_max),
                                               opts.tol, theta0);
          rec.rot_value = c.rhs;
          rec.dist_mod_group = c.distance_mod_group;
        }
        if (opts.with_degree && model.base().kind() == BaseKind::TorusRotation) {
          if (auto deg = degree_at(model, rec.midpoint(), opts.uh, opts.tol)) rec.degree = *deg;
        }
        return rec;
      },
      opts.workers);
  if (!records.ok()) throw Error(ErrorKind::InvalidInput, "gap refinement failed: " + records.failures.front().second);
  for (auto& r : records.results) out.gaps.push_back(std::move(*r));
  return out;
}

std::vector<GapRecord> detect_gaps(const OperatorModel& model, double e_min, double e_max, int resolution, int n,
                                   const GapScanOptions& opts) {
  return scan_gaps(model, e_min, e_max, resolution, n, opts).gaps;
}

}  // namespace gaplabel
