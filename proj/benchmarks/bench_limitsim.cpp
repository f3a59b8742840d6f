#include <benchmark/benchmark.h>

#include "breakdate/limitsim.hpp"

namespace bd = breakdate;

namespace {

void BM_SimulateStationary(benchmark::State& state) {
  bd::PluginParams params;
  params.rho = 1.0;
  params.vartheta = 1.0;
  params.lambda_hat = 0.5;
  params.sample_size = 100;
  params.t_hat = 50;
  bd::LimitSimConfig cfg;
  cfg.n_draws = static_cast<int>(state.range(0));
  cfg.n_grid = 2000;
  cfg.seed = 11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bd::simulate_stationary(params, cfg));
  }
}
BENCHMARK(BM_SimulateStationary)->Arg(1000)->Arg(10000);

}  // namespace
