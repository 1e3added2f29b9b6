// Serial vs OpenMP timings for the column sweep, the repetition sweep and
// the sub-problem solver.

#include <benchmark/benchmark.h>

#include "nsslope/estimator.hpp"
#include "nsslope/experiment.hpp"
#include "nsslope/lambda_seq.hpp"
#include "nsslope/slope_solver.hpp"
#include "nsslope/synth.hpp"

using namespace nsslope;

namespace {

Dataset block_data(Eigen::Index p, Eigen::Index n) {
  return sample_mvn(make_block_model(p, 4, 1.0, 0.3), n, 11);
}

void fit(benchmark::State& state, SweepMode mode) {
  const Dataset data = block_data(state.range(0), 2 * state.range(0));
  FitConfig cfg;
  cfg.mode = mode;
  for (auto _ : state) benchmark::DoNotOptimize(fit_nsslope(data, cfg).theta.data());
  state.counters["p"] = static_cast<double>(state.range(0));
}

void BM_FitSequential(benchmark::State& state) { fit(state, SweepMode::Sequential); }
void BM_FitParallel(benchmark::State& state) { fit(state, SweepMode::JacobiParallel); }

BENCHMARK(BM_FitSequential)->Arg(40)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitParallel)->Arg(40)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RepetitionSweep(benchmark::State& state) {
  SweepGrid grid;
  grid.base.p = 40;
  grid.base.repetitions = 8;
  grid.n_values = {100, 400};
  grid.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(grid).rows.size());
}
BENCHMARK(BM_RepetitionSweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Subproblem(benchmark::State& state) {
  const Dataset data = block_data(state.range(0), 2 * state.range(0));
  const ColumnProblem cp = column_problem(data, 0, 1.0, adjusted_sequence(data.p() - 1, 0.05, data.n()), true);
  for (auto _ : state) benchmark::DoNotOptimize(solve_slope(cp.problem).beta.data());
}
BENCHMARK(BM_Subproblem)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
