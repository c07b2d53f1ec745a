// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <set>
#include <string>

#include <unistd.h>

#include <fmt/format.h>

#include "cli/run.hpp"
#include "gaplabel/cocycle.hpp"
#include "gaplabel/duality.hpp"
#include "gaplabel/gaps.hpp"
#include "gaplabel/hyperbolicity.hpp"
#include "gaplabel/perturb.hpp"
#include "gaplabel/rotation.hpp"
#include "support/oracles.hpp"

using namespace gaplabel;
using namespace gaplabel::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

TrigPolynomial dual_amo_potential() { return TrigPolynomial({0.0, 1.0, 1.0}, kGolden); }

// Scalar potential v(theta + n alpha), n = 1..N.
std::vector<double> scalar_sites(const TrigPolynomial& v, double theta, int n) {
  std::vector<double> out;
  for (int k = 1; k <= n; ++k) out.push_back(v(theta + k * v.alpha()));
  return out;
}

struct CharPolySample {
  OperatorModel model;
  BasePoint theta;
  int n;
  std::vector<double> energies;
};

std::vector<CharPolySample> charpoly_samples() {
  Rng rng(20240601);
  std::vector<CharPolySample> out;
  for (int s = 0; s < 100; ++s) {
    const int m = uniform_int(rng, 1, 3);
    OperatorModel model = random_model(rng, m);
    const int n = uniform_int(rng, 1, 20);
    const double b = model.operator_bound();
    std::vector<double> es;
    for (int i = 0; i < 5; ++i) es.push_back(uniform(rng, -b, b));
    out.push_back({std::move(model), point(uniform(rng, 0.0, 1.0)), n, std::move(es)});
  }
  return out;
}

// 1
Outcome charpoly() {
  double worst = 0.0;
  for (const auto& s : charpoly_samples()) {
    const Mat h = dense_h(s.model, sites(s.model, s.theta, s.n));
    for (double e : s.energies) {
      const std::complex<double> oracle = (e * Mat::Identity(h.rows(), h.cols()) - h).determinant();
      const CharPolyParts parts = char_poly_parts(s.model, s.theta, s.n, e);
      const double res = std::abs(parts.det_c_power * parts.det_u - oracle) / std::max(1.0, std::abs(oracle));
      worst = std::max(worst, res);
    }
  }
  return {worst < 1e-8, fmt::format("max relative residual {:.3g} over 500 (model, E)", worst)};
}

// 2
Outcome structure() {
  double worst_product = 0.0, worst_cayley = 0.0;
  for (const auto& s : charpoly_samples()) {
    const int m = s.model.m();
    Mat j = Mat::Zero(2 * m, 2 * m);
    j.topRightCorner(m, m) = Mat::Identity(m, m);
    j.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
    Mat q = Mat::Identity(2 * m, 2 * m);
    q.bottomRightCorner(m, m) *= -1.0;
    for (double e : s.energies) {
      const Mat a = transfer_product(s.model, e, s.theta, s.n);
      worst_product = std::max(worst_product, (a.adjoint() * j * a - j).norm() / a.squaredNorm());
      for (int k = 0; k < s.n; ++k) {
        const Mat step = transfer_step(s.model, e, s.model.base().iterate(s.theta, k)).a;
        const Mat ring = cayley(step);
        worst_cayley = std::max(worst_cayley, (ring.adjoint() * q * ring - q).norm());
      }
    }
  }
  return {worst_product < 1e-8 && worst_cayley < 1e-8,
          fmt::format("max ||A*JA-J||/||A||^2 {:.3g}, max ||Å*QÅ-Q|| {:.3g}", worst_product, worst_cayley)};
}

// 3
Outcome free_closed_form() {
  const OperatorModel free = free_laplacian();
  const std::vector<double> es{-1.5, -1.0, 0.0, 1.0, 1.5};
  const auto values = ids(free, free.base().origin(), 5000, es);
  double worst = 0.0;
  for (std::size_t i = 0; i < es.size(); ++i)
    worst = std::max(worst, std::abs(values[i] - (1.0 - std::acos(es[i] / 2.0) / kPi)));
  const double rot = rot_number(free, 0.0, free.base().origin(), LagrangianFrame::horizontal(1), 5000).estimate;
  return {worst < 1e-2 && std::abs(rot - 0.5) < 1e-2,
          fmt::format("max |ids - closed form| {:.3g}, rot(0) {:.6f}", worst, rot)};
}

// Shared by 4 and 5.
const std::vector<GapRecord>& dual_amo_gaps() {
  static const std::vector<GapRecord> gaps = [] {
    GapScanOptions opts;
    return detect_gaps(build_dual(dual_amo_potential()), -6.0, 6.0, 400, 2000, opts);
  }();
  return gaps;
}

std::vector<GapRecord> interior(const std::vector<GapRecord>& all) {
  std::vector<GapRecord> out;
  for (const auto& g : all)
    if (g.kind == GapKind::Interior) out.push_back(g);
  return out;
}

// 4
Outcome ids_rot_identity() {
  const OperatorModel dual = build_dual(dual_amo_potential());
  auto gaps = interior(dual_amo_gaps());
  if (gaps.size() < 3) return {false, fmt::format("only {} interior gaps detected", gaps.size())};
  std::sort(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) { return a.e_hi - a.e_lo > b.e_hi - b.e_lo; });
  const LabelGroup group = label_group_for(dual);
  double worst = 0.0;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const double e = gaps[static_cast<std::size_t>(i)].midpoint();
    const IdsRotCheck c = verify_ids_rot(dual, e, 4000, group);
    const double d = distance_mod(c.lhs - c.rhs, kGolden, 20);
    worst = std::max(worst, d);
    detail += fmt::format(" E={:.4f}: {:.5f} vs {:.5f} d={:.2g};", e, c.lhs, c.rhs, d);
  }
  return {worst < 5e-3, fmt::format("{} interior gaps;{}", gaps.size(), detail)};
}

// 5
Outcome gap_labels() {
  const auto gaps = interior(dual_amo_gaps());
  if (gaps.empty()) return {false, "no interior gaps detected"};
  std::set<std::pair<int, long>> seen;
  std::string detail;
  bool ok = true;
  for (const auto& g : gaps) {
    const auto label = label_within(2.0 * g.ids_value, kGolden, 20, 1e-2);
    if (!label) {
      ok = false;
      detail += fmt::format(" unmatched ids={:.5f};", g.ids_value);
      continue;
    }
    if (!seen.insert({label->k, label->j}).second) ok = false;
    if (!g.label) ok = false;
    detail += fmt::format(" ({},{})", label->k, label->j);
  }
  return {ok, fmt::format("{} interior gaps, labels (k,j):{}", gaps.size(), detail)};
}

// 6
Outcome phase_monotonicity() {
  Rng rng(77);
  double worst_rise = -1e300;
  for (int s = 0; s < 20; ++s) {
    const int m = uniform_int(rng, 1, 3);
    const OperatorModel model = random_model(rng, m);
    const int n = uniform_int(rng, 1, 12);
    const double b = model.operator_bound() + 1.0;
    std::vector<double> es;
    for (int i = 0; i < 200; ++i) es.push_back(-b + 2.0 * b * i / 199);
    const PhaseCurves pc = phase_curves(model, point(uniform(rng, 0.0, 1.0)), n, es);
    for (std::size_t i = 0; i + 1 < es.size(); ++i)
      for (int j = 0; j < m; ++j) worst_rise = std::max(worst_rise, pc.phases[i + 1][j] - pc.phases[i][j]);
  }
  double worst_fd = 0.0;
  for (int s = 0; s < 20; ++s) {
    const int m = uniform_int(rng, 1, 3);
    const OperatorModel model = random_model(rng, m);
    const int n = uniform_int(rng, 1, 12);
    const BasePoint theta = point(uniform(rng, 0.0, 1.0));
    const double e = uniform(rng, -model.operator_bound(), model.operator_bound());
    const Mat start = random_lagrangian_stack(rng, m);
    const EnergyDerivative d = energy_derivative(model, e, theta, n, LagrangianFrame::from_stack(start));
    const long double h = 1e-4L;
    auto w = [&](long double x) { return cayley_w_extended(model, e + x, theta, n, start); };
    const Mat fd = (w(-2 * h) - 8.0 * w(-h) + 8.0 * w(h) - w(2 * h)) / static_cast<double>(12 * h);
    const Mat exact = std::complex<double>(0.0, 1.0) * d.w * d.omega;
    worst_fd = std::max(worst_fd, (fd - exact).norm() / exact.norm());
  }
  return {worst_rise <= 1e-9 && worst_fd < 1e-4,
          fmt::format("largest branch increase {:.3g}, max FD relative error {:.3g}", worst_rise, worst_fd)};
}

// 7
Outcome frame_independence() {
  Rng rng(4242);
  double worst = -1e300;
  for (int s = 0; s < 20; ++s) {
    const int m = uniform_int(rng, 1, 3);
    const OperatorModel model = random_model(rng, m);
    const double e = uniform(rng, -model.operator_bound(), model.operator_bound());
    const BasePoint theta = point(uniform(rng, 0.0, 1.0));
    const auto f1 = LagrangianFrame::from_stack(random_lagrangian_stack(rng, m));
    const auto f2 = LagrangianFrame::from_stack(random_lagrangian_stack(rng, m));
    for (int n : {10, 100, 1000}) {
      const double r1 = rot_number(model, e, theta, f1, n).estimate;
      const double r2 = rot_number(model, e, theta, f2, n).estimate;
      worst = std::max(worst, n * std::abs(r1 - r2) - m);
    }
  }
  return {worst <= 1e-3, fmt::format("max N|rot - rot'| - m = {:.4f}", worst)};
}

// 8
Outcome bridge() {
  Rng rng(99);
  double worst = -1e300;
  for (int s = 0; s < 50; ++s) {
    const int m = uniform_int(rng, 1, 3);
    const OperatorModel model = random_model(rng, m);
    const int n = uniform_int(rng, 1, 15);
    const BasePoint theta = point(uniform(rng, 0.0, 1.0));
    const Eigen::VectorXd ev = dense_eigenvalues(dense_h(model, sites(model, theta, n)));
    // Candidate energies: below, above, and between clusters separated by more than 1e-3.
    std::vector<double> candidates{ev(0) - 1.0, ev(ev.size() - 1) + 1.0};
    for (Eigen::Index i = 0; i + 1 < ev.size(); ++i)
      if (ev(i + 1) - ev(i) > 1e-3) candidates.push_back(0.5 * (ev(i) + ev(i + 1)));
    const double e = candidates[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1))];
    long above = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) above += ev(i) > e;
    const std::vector<double> grid{e};
    const double total = phase_curves(model, theta, n, grid).ledger_totals[0];
    worst = std::max({worst, above - total, total - (above + m)});
  }
  return {worst <= 1e-6, fmt::format("largest violation of l <= m x <= l + m: {:.3g}", worst)};
}

// 9
Outcome large_energy() {
  Rng rng(5);
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    const OperatorModel model = random_model(rng, uniform_int(rng, 1, 3));
    const double r = rot_number(model, 50.0, model.base().origin(), LagrangianFrame::horizontal(model.m()), 1000).estimate;
    worst = std::max(worst, std::abs(r));
  }
  return {worst < 1e-2, fmt::format("max |rot(50)| {:.3g}", worst)};
}

// 10
Outcome uh_vs_spectrum() {
  struct Case {
    std::string name;
    OperatorModel model;
    double lo, hi;
    std::function<double(double)> ids_oracle;
    int n;
  };
  // Level spacing of the truncations must be far below the membership window.
  constexpr int kOracleSites = 20000;
  const auto free_sites = std::vector<double>(kOracleSites, 0.0);
  const TrigPolynomial v = dual_amo_potential();
  const auto dual_sites = scalar_sites(v, 0.0, kOracleSites);
  std::vector<Case> cases;
  cases.push_back({"free", free_laplacian(), -3.0, 3.0,
                   [&](double e) { return static_cast<double>(sturm_count(free_sites, e)) / kOracleSites; }, kOracleSites});
  // IDS of the dual block operator equals that of the scalar operator.
  cases.push_back({"dual d=2", build_dual(v), -6.0, 6.0,
                   [&](double e) { return static_cast<double>(sturm_count(dual_sites, e)) / kOracleSites; }, kOracleSites});
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const double h = (c.hi - c.lo) / 199;
    // E is in the spectrum when the IDS grows within a window well inside the grid cell;
    // a few eigenvalues are tolerated as boundary states of the truncation.
    std::vector<bool> in_spectrum(200);
    for (int i = 0; i < 200; ++i) {
      const double e = c.lo + h * i;
      in_spectrum[static_cast<std::size_t>(i)] = c.ids_oracle(e + h / 10) - c.ids_oracle(e - h / 10) > 3.0 / c.n;
    }
    int disagreements = 0, uh_count = 0, interior = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      const bool uh = uh_test(c.model, c.lo + h * static_cast<double>(i)).is_uh;
      uh_count += uh;
      if (uh != in_spectrum[i]) continue;
      ++disagreements;
      // An edge point has both flat and growing IDS within one grid step, seen through a finer window.
      const double e = c.lo + h * static_cast<double>(i);
      bool flat = false, growing = false;
      for (int t = -40; t <= 40; ++t) {
        const double x = e + h * t / 40.0;
        (c.ids_oracle(x + h / 80) - c.ids_oracle(x - h / 80) > 3.0 / c.n ? growing : flat) = true;
      }
      interior += !(flat && growing);
    }
    ok = ok && interior == 0;
    ok = ok && disagreements <= 2;
    detail += fmt::format(" {}: {} UH points, {} disagreements ({} away from an edge);", c.name, uh_count, disagreements, interior);
  }
  return {ok, detail.substr(1)};
}

// Dual recurrence step on (u_{n+d-1}, ..., u_{n-d}).
Mat companion(const TrigPolynomial& v, double e, double theta) {
  const int d = v.degree();
  Mat l = Mat::Zero(2 * d, 2 * d);
  for (int k = d - 1; k >= -d; --k) l(0, d - 1 - k) = -v.coeff(k);
  l(0, d - 1) += e - 2.0 * std::cos(kTwoPi * theta);
  l.row(0) /= v.coeff(d);
  for (int r = 1; r < 2 * d; ++r) l(r, r - 1) = 1.0;
  return l;
}

// 11
Outcome duality() {
  Rng rng(31337);
  double worst_oracle = 0.0, worst_lib = 0.0, worst_ids = 0.0, worst_ids_oracle = 0.0;
  for (int d = 1; d <= 3; ++d) {
    std::vector<std::complex<double>> coeffs{uniform(rng, -1.0, 1.0)};
    for (int k = 1; k <= d; ++k)
      coeffs.push_back(std::polar(k == d ? uniform(rng, 0.7, 1.2) : uniform(rng, 0.0, 1.0), uniform(rng, 0.0, kTwoPi)));
    const TrigPolynomial v(coeffs, kGolden);
    const OperatorModel dual = build_dual(v);
    for (int s = 0; s < 100; ++s) {
      const double e = uniform(rng, -5.0, 5.0), theta = uniform(rng, 0.0, 1.0);
      Mat prod = Mat::Identity(2 * d, 2 * d);
      for (int j = 0; j < d; ++j) prod = companion(v, e, theta + j * kGolden) * prod;
      const Mat ci = dual.c().inverse();
      Mat a_hat = Mat::Zero(2 * d, 2 * d);
      a_hat.topLeftCorner(d, d) = ci * (e * Mat::Identity(d, d) - dual.f(point(theta)));
      a_hat.topRightCorner(d, d) = -ci * dual.c().adjoint();
      a_hat.bottomLeftCorner(d, d) = Mat::Identity(d, d);
      worst_oracle = std::max(worst_oracle, (prod - a_hat).norm() / a_hat.norm());
      worst_lib = std::max(worst_lib, check_factorization(v, e, theta));
    }
    double bound = 3.0;
    for (const auto& c : coeffs) bound += 2.0 * std::abs(c);
    std::vector<double> es;
    for (int i = 0; i < 50; ++i) es.push_back(-bound + 2.0 * bound * i / 49);
    const IdsDualityReport rep = check_ids_duality(v, es, 2000);
    worst_ids = std::max(worst_ids, rep.max_difference);
    const auto scalar = scalar_sites(v, 0.0, 2000);
    for (std::size_t i = 0; i < es.size(); ++i)
      worst_ids_oracle = std::max(worst_ids_oracle,
                                  std::abs(rep.ids_dual[i] - static_cast<double>(sturm_count(scalar, es[i])) / 2000.0));
  }
  return {worst_oracle < 1e-12 && worst_lib < 1e-12 && worst_ids < 3e-2 && worst_ids_oracle < 3e-2,
          fmt::format("factorization residual {:.3g} (library check {:.3g}), IDS sup-difference {:.3g} (vs Sturm {:.3g})",
                      worst_oracle, worst_lib, worst_ids, worst_ids_oracle)};
}

// 12
Outcome bigstar() {
  auto set = [](std::vector<Interval> v) { return SpectralSet(std::move(v)); };
  const bool exact = star(set({{0, 2}}), set({{0, 0}, {1, 1}})) == set({{0, 3}}) &&
                     star(set({{0, 1}}), set({{0, 0}, {3, 3}})) == set({{0, 1}, {3, 4}}) &&
                     star(set({{-2, 2}}), set({{0, 0}, {5, 5}})) == set({{-2, 2}, {3, 7}});
  const OperatorModel free = free_laplacian();
  const RandomDiagonalLaw law({0.0, 5.0}, 42);
  const BigstarReport rep = check_bigstar(free, law, 400, 500);
  // Brute-force metrics against the closed form [-2, 2] u [3, 7].
  const MonteCarloResult mc = monte_carlo_sigma1(free, law, 400, 500);
  const SpectralSet predicted = set({{-2, 2}, {3, 7}});
  double violation = 0.0;
  for (double p : mc.points) violation = std::max(violation, predicted.distance(p));
  double coverage = 0.0;
  for (const Interval& iv : predicted.intervals())
    for (int i = 0; i <= 2000; ++i) {
      const double y = iv.lo + (iv.hi - iv.lo) * i / 2000;
      const auto it = std::lower_bound(mc.points.begin(), mc.points.end(), y);
      double gap = 1e300;
      if (it != mc.points.end()) gap = *it - y;
      if (it != mc.points.begin()) gap = std::min(gap, y - *std::prev(it));
      coverage = std::max(coverage, gap);
    }
  return {exact && rep.subset_violation < 5e-2 && rep.coverage_gap < 1e-1 && violation < 5e-2 && coverage < 1e-1,
          fmt::format("exact examples {}, subset_violation {:.3g}, coverage_gap {:.3g} (brute force {:.3g}, {:.3g})",
                      exact ? "ok" : "wrong", rep.subset_violation, rep.coverage_gap, violation, coverage)};
}

// 13
Outcome conjugation() {
  const OperatorModel free = free_laplacian();
  const OperatorModel dual = build_dual(dual_amo_potential());
  double worst = 0.0;
  std::string detail;
  for (const auto* model : {&free, &dual}) {
    const double alpha = model->base().alpha()(0);
    for (int r1 : {1, 2}) {
      const std::vector<int> r{r1};
      const double shift = conjugation_shift(*model, model == &free ? 0.3 : -0.5, r, 2000);
      double expected = -r1 * alpha / 2.0;
      expected -= std::floor(expected);
      const double d = circular_distance(shift, expected);
      worst = std::max(worst, d);
      detail += fmt::format(" {:.5f}/{:.5f}", shift, expected);
    }
  }
  return {worst < 5e-3, fmt::format("shift/expected:{}; max distance {:.3g}", detail, worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 14
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / fmt::format("gaplabel_acceptance_{}", ::getpid());
  fs::create_directories(root);
  const std::map<std::string, std::string> configs{
      {"free.json",
       R"({"m": 1, "potential": {"type": "free"}, "base": {"type": "torus", "alpha": [0.6180339887498949]},
           "scan": {"E_min": -3, "E_max": 3, "points": 60, "N": 400}, "seed": 11,
           "perturb": {"support": [0, 5], "realizations": 40}})"},
      {"amo.json",
       R"({"m": 1, "potential": {"type": "amo_dual", "amplitude": 3}, "base": {"type": "torus", "alpha": [0.6180339887498949]},
           "scan": {"E_min": -8, "E_max": 8, "points": 60, "N": 400}, "seed": 3})"},
      {"dual.json",
       R"({"dual_of": {"coeffs": [0, 1, 1], "alpha": 0.6180339887498949},
           "scan": {"E_min": -6, "E_max": 6, "points": 60, "N": 400}, "seed": 5})"},
  };
  for (const auto& [name, text] : configs) std::ofstream(root / name) << text;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"ids", "amo.json"}, {"rot", "amo.json"}, {"gaps", "free.json"}, {"uh", "dual.json"},
      {"duality", "dual.json"}, {"perturb", "free.json"}, {"star", "free.json"}};
  int compared = 0;
  std::string bad;
  for (const auto& [cmd, cfg] : runs) {
    std::map<int, std::map<std::string, std::string>> files;
    for (int workers : {1, 8}) {
      const fs::path out = root / fmt::format("{}_{}", cmd, workers);
      const int code = cli::run({"-q", cmd, (root / cfg).string(), "-o", out.string(), "-j", std::to_string(workers)});
      if (code != 0) bad += fmt::format(" {} exit {};", cmd, code);
      if (fs::exists(out))
        for (const auto& entry : fs::directory_iterator(out)) files[workers][entry.path().filename().string()] = slurp(entry.path());
    }
    if (files[1].empty() || files[1] != files[8]) bad += fmt::format(" {} differs;", cmd);
    compared += static_cast<int>(files[1].size());
  }
  fs::remove_all(root);
  return {bad.empty(), bad.empty() ? fmt::format("{} files byte-identical for 1 and 8 workers", compared) : bad};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"characteristic polynomial oracle", charpoly},
      {"structure preservation", structure},
      {"free operator closed form", free_closed_form},
      {"ids/rotation identity mod Z alpha + Z", ids_rot_identity},
      {"gap labelling", gap_labels},
      {"phase monotonicity and dW/dE", phase_monotonicity},
      {"frame independence", frame_independence},
      {"bridge inequality", bridge},
      {"large-energy limit", large_energy},
      {"uniform hyperbolicity vs spectrum", uh_vs_spectrum},
      {"duality factorization", duality},
      {"star product", bigstar},
      {"conjugation shift", conjugation},
      {"determinism", determinism},
  };
  // Optional arguments select criteria by number.
  std::set<std::size_t> only;
  for (int a = 1; a < argc; ++a) only.insert(static_cast<std::size_t>(std::stoul(argv[a])));
  int failed = 0;
  std::size_t ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(ran) - failed, ran);
  return failed ? 1 : 0;
}
