#include <benchmark/benchmark.h>

#include <vector>

#include "gaplabel/hyperbolicity.hpp"
#include "gaplabel/model.hpp"
#include "gaplabel/rotation.hpp"

using namespace gaplabel;

namespace {

constexpr double kGolden = 0.6180339887498949;

OperatorModel block_model(int m) {
  return OperatorModel(ComplexMatrix::Identity(m, m), Potential::amo_dual(m, 1.5), BaseDynamics::torus_rotation({kGolden}));
}

BasePoint origin() {
  BasePoint p(1);
  p(0) = 0.1;
  return p;
}

std::vector<double> grid(int points) {
  std::vector<double> e;
  for (int i = 0; i < points; ++i) e.push_back(-4.0 + 8.0 * i / (points - 1));
  return e;
}

void BM_IdsScan(benchmark::State& state) {
  const OperatorModel model = block_model(2);
  const auto energies = grid(64);
  IdsOptions opts;
  opts.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ids(model, origin(), 2000, energies, opts));
}
BENCHMARK(BM_IdsScan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_RotNumber(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const OperatorModel model = block_model(m);
  const LagrangianFrame start = LagrangianFrame::horizontal(m);
  for (auto _ : state) benchmark::DoNotOptimize(rot_number(model, 0.7, origin(), start, 1000));
}
BENCHMARK(BM_RotNumber)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_UhTest(benchmark::State& state) {
  const OperatorModel model = block_model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(uh_test(model, 6.0));
}
BENCHMARK(BM_UhTest)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
