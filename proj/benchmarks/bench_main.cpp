/*
 Copyright 2026 The anticip_smp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "anticip/examples.hpp"
#include "anticip/grid.hpp"
#include "anticip/iabsde.hpp"
#include "anticip/isdde.hpp"
#include "anticip/smp.hpp"

using namespace anticip;

static void BM_BrownianIncrements(benchmark::State& state) {
  const TimeGrid g = make_grid(1.0, 200, {}, 0.0, 0.0);
  const auto paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brownian_increments(g, paths, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_BrownianIncrements)->Arg(1000)->Arg(10000);

static void BM_EulerMaruyamaLq(benchmark::State& state) {
  const double lags[] = {0.25};
  const TimeGrid g = make_grid(1.0, 200, lags, 0.25, 0.0);
  const DelayKernel k = discretize_measure({DiracMeasure{0.25}, {}}, g);
  const auto fp = ForwardProblem::scalar(
      [](double, double x, double xd) { return 0.1 * x + 0.2 * xd; },
      [](double, double x, double xd) { return 0.3 * x + 0.1 * xd; }, k, {}, -1.0);
  const IncrementEnsemble incs = brownian_increments(g, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(euler_maruyama(fp, g, incs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_EulerMaruyamaLq)->Arg(1000)->Arg(10000);

static void BM_LqSegments(benchmark::State& state) {
  const double lags[] = {0.25};
  const TimeGrid g = make_grid(1.0, 200, lags, 0.25, 0.0);
  const LqCoefficients coef{[](double) { return 0.1; }, [](double) { return 0.2; },
                            [](double) { return 0.3; }, [](double) { return 0.1; }};
  const IncrementEnsemble incs = brownian_increments(g, 10000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(lq_adjoint_segments(coef, 0.25, g, incs));
}
BENCHMARK(BM_LqSegments);

static void BM_PicardConsumption(benchmark::State& state) {
  const ExampleSetup ex = consumption_problem({}, static_cast<std::size_t>(state.range(0)));
  const BackwardProblem bp = state_problem(ex.problem, ex.u_star);
  const IncrementEnsemble incs = brownian_increments(ex.problem.grid, 1, 0);
  const auto det = ConditionalEstimator::deterministic();
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(bp, incs, det, 1e-12, 60));
}
BENCHMARK(BM_PicardConsumption)->Arg(100)->Arg(400);

static void BM_EvaluateSmpClimate(benchmark::State& state) {
  const ExampleSetup ex = climate_problem({}, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_smp(ex.problem, ex.u_star, {}));
}
BENCHMARK(BM_EvaluateSmpClimate)->Arg(100)->Arg(200);

static void BM_RegressionProjection(benchmark::State& state) {
  const TimeGrid g = make_grid(1.0, 50, {}, 0.0, 0.0);
  const IncrementEnsemble incs = brownian_increments(g, static_cast<std::size_t>(state.range(0)), 1);
  const auto est = ConditionalEstimator::poly_regression(3);
  const auto values = incs.step_levels(30);
  for (auto _ : state) benchmark::DoNotOptimize(est.project(incs, 20, values));
}
BENCHMARK(BM_RegressionProjection)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
