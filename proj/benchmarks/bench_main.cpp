// Microbenchmarks for the hot paths: the counter-based generator, the normal
// draw, analytic kernels, and full path simulation for each strategy family.

#include <benchmark/benchmark.h>

#include <array>
#include <cstdint>

#include "aclab/analytics.hpp"
#include "aclab/experiments.hpp"
#include "aclab/rng.hpp"
#include "aclab/sde.hpp"
#include "aclab/strategy.hpp"

namespace {

using namespace aclab;

void BM_PhiloxBlock(benchmark::State& state) {
  std::array<std::uint32_t, 4> ctr{0, 0, 0, 0};
  for (auto _ : state) {
    ctr[0]++;
    benchmark::DoNotOptimize(philox4x32(ctr, 0xdeadbeefu, 0xcafef00du));
  }
  state.SetItemsProcessed(state.iterations() * 4);  // 32-bit words per block
}
BENCHMARK(BM_PhiloxBlock);

void BM_NormalDraw(benchmark::State& state) {
  NoiseSource noise(42, 0);
  std::uint64_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(noise.normal_at(k++));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NormalDraw);

void BM_NormalQuantile(benchmark::State& state) {
  double u = 0.0;
  for (auto _ : state) {
    u += 1e-9;
    if (u >= 1.0) u -= 1.0 - 1e-12;
    benchmark::DoNotOptimize(normal_quantile(u));
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_Kappa(benchmark::State& state) {
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-6;
    if (t > 1.0) t = 1e-6;
    benchmark::DoNotOptimize(kappa(t, 2.0, 3.0));
  }
}
BENCHMARK(BM_Kappa);

void BM_EcostOpt(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(ecost_opt(3.0, -2.0, 1.0, 1.0));
  }
}
BENCHMARK(BM_EcostOpt);

void BM_ReflectionSupProb(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(reflection_sup_prob(1.0, 1.0, 1.0));
  }
}
BENCHMARK(BM_ReflectionSupProb);

// Full path at dt = 5e-4 over T = 1 (about 2000 exact-transition steps).
// items processed = grid steps, so the report reads as steps per second.
void BM_PathConstantGain(benchmark::State& state) {
  const ProblemDynamics dyn{1.0, 1.0, 1.0, 1.0};
  const StrategyBlueprint bp = make_constant_gain(1.0, 1.0, 1.0, 1.0);
  const SimGrid grid{5e-4, 5e-4, 1.0};
  std::uint64_t path = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_path_cost(dyn, bp, grid, NoiseSource(42, path++)));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_PathConstantGain);

void BM_PathBoundedRegret(benchmark::State& state) {
  const ProblemDynamics dyn{10.0, 1.0, 1.0, 1.0};
  const StrategyBlueprint bp = make_br(10.0, 1.0, 1.0);
  const double tau = std::get<BRLaw>(bp.law).params.tau;
  const SimGrid grid{5e-4, tau / 64.0, 1.0};
  std::uint64_t path = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_path_cost(dyn, bp, grid, NoiseSource(42, path++)));
  }
}
BENCHMARK(BM_PathBoundedRegret);

void BM_EstimateExpectedCost(benchmark::State& state) {
  const ProblemDynamics dyn{0.0, 1.0, 1.0, 1.0};
  const StrategyBlueprint bp = make_optimal_known(1.0, 0.0, 1.0, 1.0);
  McConfig mc;
  mc.n_paths = state.range(0);
  mc.seed = 42;
  mc.grid = SimGrid{1e-3, 1e-3, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_expected_cost(dyn, bp, mc));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_EstimateExpectedCost)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
