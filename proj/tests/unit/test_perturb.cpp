#include <doctest.h>

#include <algorithm>

#include <set>

#include "gaplabel/error.hpp"
#include "gaplabel/perturb.hpp"
#include "support/oracles.hpp"

using namespace gaplabel;
using namespace gaplabel::testing;

namespace {

SpectralSet set(std::vector<Interval> v) { return SpectralSet(std::move(v)); }

SpectralSet random_set(Rng& rng, double lo, double diameter) {
  std::vector<Interval> v{{lo, lo}, {lo + diameter, lo + diameter}};
  const int extra = uniform_int(rng, 0, 4);
  for (int i = 0; i < extra; ++i) {
    const double a = uniform(rng, lo, lo + diameter);
    v.push_back({a, std::min(lo + diameter, a + uniform(rng, 0.0, 0.3 * diameter))});
  }
  return SpectralSet(v);
}

}  // namespace

TEST_CASE("spectral sets merge, sum and measure distances") {
  const SpectralSet a({{3, 4}, {0, 1}, {1, 2}});
  CHECK(a.intervals() == std::vector<Interval>{{0, 2}, {3, 4}});
  CHECK(SpectralSet({{0, 1}, {1.05, 2}}, 0.1).intervals() == std::vector<Interval>{{0, 2}});
  CHECK(a.diameter() == 4.0);
  CHECK(a.hull() == set({{0, 4}}));
  CHECK(a.distance(2.5) == doctest::Approx(0.5));
  CHECK(a.contains(3.5));
  CHECK(a.minkowski_sum(set({{0, 0}, {10, 10}})) == set({{0, 2}, {3, 4}, {10, 12}, {13, 14}}));
  CHECK(a.unite(set({{2, 3}})) == set({{0, 4}}));
  const std::vector<Interval> gaps{{1, 2}};
  CHECK(SpectralSet::complement_of(gaps, 0, 3) == set({{0, 1}, {2, 3}}));
  CHECK(a.hausdorff(set({{0, 4}})) == doctest::Approx(0.5));
  const std::vector<double> pts{0.0, 0.08, 1.0};
  const SpectralSet near = SpectralSet::from_points(pts, 0.05);
  REQUIRE(near.intervals().size() == 2);
  CHECK(near.lo() == doctest::Approx(-0.05));
  CHECK(near.intervals()[0].hi == doctest::Approx(0.13));
  CHECK(near.hi() == doctest::Approx(1.05));
  CHECK_THROWS_AS(SpectralSet().diameter(), Error);
}

TEST_CASE("star product examples") {
  CHECK(star(set({{0, 2}}), set({{0, 0}, {1, 1}})) == set({{0, 3}}));
  CHECK(star(set({{0, 1}}), set({{0, 0}, {3, 3}})) == set({{0, 1}, {3, 4}}));
  CHECK(star(set({{-2, 2}}), set({{0, 0}, {5, 5}})) == set({{-2, 2}, {3, 7}}));
  CHECK_THROWS_AS(star(SpectralSet(), set({{0, 1}})), Error);
}

TEST_CASE("star product is symmetric, also at equal diameters") {
  Rng rng(801);
  for (int s = 0; s < 200; ++s) {
    const double da = uniform(rng, 0.1, 3.0);
    const double db = s % 2 ? da : uniform(rng, 0.1, 3.0);
    const SpectralSet a = random_set(rng, uniform(rng, -3, 3), da);
    const SpectralSet b = random_set(rng, uniform(rng, -3, 3), db);
    const SpectralSet ab = star(a, b), ba = star(b, a);
    CHECK(ab.hausdorff(ba) < 1e-12);
    CHECK(ab.intervals().size() == ba.intervals().size());
  }
}

TEST_CASE("random laws and realizations") {
  CHECK_THROWS_AS(RandomDiagonalLaw({1.0}, 1), Error);
  CHECK_THROWS_AS(RandomDiagonalLaw({0.0, std::nan("")}, 1), Error);
  const RandomDiagonalLaw law({0.0, 5.0, 7.0}, 42);
  // Constant realizations first, then the two-sided ones, then i.i.d.
  for (int r = 0; r < 3; ++r)
    for (double x : realization(law, r, 10, 2)) CHECK(x == law.support()[static_cast<std::size_t>(r)]);
  std::set<std::pair<double, double>> pairs;
  for (int r = 3; r < 9; ++r) {
    const auto w = realization(law, r, 10, 1);
    CHECK(std::all_of(w.begin(), w.begin() + 5, [&](double x) { return x == w.front(); }));
    CHECK(std::all_of(w.begin() + 5, w.end(), [&](double x) { return x == w.back(); }));
    CHECK(w.front() != w.back());
    pairs.insert({w.front(), w.back()});
  }
  CHECK(pairs.size() == 6);
  CHECK(realization(law, 20, 50, 2) == realization(law, 20, 50, 2));
  CHECK(realization(law, 20, 50, 2) != realization(law, 21, 50, 2));
}

TEST_CASE("constant shift moves every eigenvalue") {
  Rng rng(802);
  const OperatorModel model = random_model(rng, 2);
  const BasePoint theta = point(0.2);
  const std::vector<double> zero(20, 0.0), shift(20, 1.5);
  const auto a = perturbed_eigenvalues(model, theta, 10, zero);
  const auto b = perturbed_eigenvalues(model, theta, 10, shift);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i] + 1.5).epsilon(1e-10));
  CHECK_THROWS_AS(perturbed_eigenvalues(model, theta, 10, std::vector<double>(5, 0.0)), Error);
}

TEST_CASE("Monte Carlo union grows with the realization count and stays in ch(S) + sigma0") {
  const OperatorModel free = free_laplacian();
  const RandomDiagonalLaw law({0.0, 0.5}, 7);
  MonteCarloOptions opts;
  opts.merge_radius = 0.0;
  const MonteCarloResult few = monte_carlo_sigma1(free, law, 60, 10, opts);
  const MonteCarloResult many = monte_carlo_sigma1(free, law, 60, 25, opts);
  for (double x : few.points) CHECK(many.sigma1.contains(x, 1e-12));
  const SpectralSet bound = set({{-2.0, 2.5}});
  for (double x : many.points) CHECK(bound.contains(x, 1e-9));
}

TEST_CASE("constant potential with far-apart support: no subset violation") {
  HermitianMatrix c(Mat::Constant(1, 1, 0.5));
  const OperatorModel model(Mat::Identity(1, 1), Potential::constant(c), BaseDynamics::torus_rotation({kGolden}));
  const RandomDiagonalLaw law({0.0, 10.0}, 3);
  const BigstarReport report = check_bigstar(model, law, 200, 30);
  CHECK(report.subset_violation < 1e-6);
}
