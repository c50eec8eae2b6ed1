#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bequest/analysis.hpp"
#include "bequest/solver.hpp"
#include "bequest/verify.hpp"

namespace {

using namespace bequest;

MarketParams regime_params(int index) {
  const MarketParams p{0.03, 0.06, 0.20, 0.04, 0.05, 1.0, 0.0};
  switch (index) {
    case 1:
      return p.with_h(0.02).with_c(0.02);
    case 2:
      return p.with_c(0.02);
    case 3:
      return p.with_c(0.07);
    case 4:
      return p.with_c(0.05);
    default:
      return p;
  }
}

void label(benchmark::State& state, int index) {
  state.SetLabel(std::string(to_string(solve(regime_params(index)).regime)));
}

static void BM_DeriveConstants(benchmark::State& state) {
  const MarketParams p = regime_params(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(derive_constants(p));
  label(state, static_cast<int>(state.range(0)));
}
BENCHMARK(BM_DeriveConstants)->DenseRange(0, 4);

static void BM_Solve(benchmark::State& state) {
  const MarketParams p = regime_params(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
  label(state, static_cast<int>(state.range(0)));
}
BENCHMARK(BM_Solve)->DenseRange(0, 4);

// Evaluation over a 1000-point grid; dual-branch regimes pay for inversion.
static void BM_EvalGrid(benchmark::State& state) {
  const Solution s = solve(regime_params(static_cast<int>(state.range(0))));
  const std::vector<double> grid = interior_grid(s, 1000);
  for (auto _ : state) {
    double acc = 0.0;
    for (double w : grid) acc += eval(s, w).pi_star;
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
  label(state, static_cast<int>(state.range(0)));
}
BENCHMARK(BM_EvalGrid)->DenseRange(0, 4);

static void BM_HjbResidualGrid(benchmark::State& state) {
  const Solution s = solve(regime_params(2));
  const std::vector<double> grid = interior_grid(s, 1000);
  for (auto _ : state) {
    double worst = 0.0;
    for (double w : grid) worst = std::max(worst, std::abs(hjb_residual(s, w)));
    benchmark::DoNotOptimize(worst);
  }
}
BENCHMARK(BM_HjbResidualGrid);

static void BM_FdSolve(benchmark::State& state) {
  const MarketParams p = regime_params(2);
  FdConfig cfg;
  cfg.n_grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fd_solve(p, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FdSolve)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_MonteCarlo(benchmark::State& state) {
  const Solution s = solve(regime_params(2));
  const FeedbackStrategy strategy = FeedbackStrategy::optimal(s);
  McConfig cfg;
  cfg.n_paths = static_cast<std::uint64_t>(state.range(0));
  cfg.dt = 1.0 / 500.0;
  cfg.w0 = 0.5 * s.w_s();
  cfg.threads = 1;
  std::uint64_t steps = 0;
  for (auto _ : state) {
    const McResult r = mc_estimate(s.params, strategy, cfg);
    steps += static_cast<std::uint64_t>(r.mean_steps * static_cast<double>(r.n_paths));
    benchmark::DoNotOptimize(r);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_MonteCarlo)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_ConsumptionSweep(benchmark::State& state) {
  const std::vector<double> grid = reference_consumption_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_consumption(reference_base(), grid));
}
BENCHMARK(BM_ConsumptionSweep);

static void BM_ReproduceTables(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reproduce_tables());
}
BENCHMARK(BM_ReproduceTables)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
