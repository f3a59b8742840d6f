#include <benchmark/benchmark.h>

#include "breakdate/breakscan.hpp"
#include "breakdate/dgp.hpp"

namespace bd = breakdate;

namespace {

bd::TimeSeriesDataset make_sample(int T) {
  bd::DgpSpec spec;
  spec.model = bd::DgpModel::M4;
  spec.T = T;
  spec.delta0 = 1.0;
  spec.seed = 7;
  return bd::generate(spec).data;
}

void BM_ScanFast(benchmark::State& state) {
  bd::TimeSeriesDataset data = make_sample(static_cast<int>(state.range(0)));
  bd::ModelSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bd::scan_break(data, spec));
  }
}
BENCHMARK(BM_ScanFast)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ScanBruteForce(benchmark::State& state) {
  bd::TimeSeriesDataset data = make_sample(static_cast<int>(state.range(0)));
  bd::ModelSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bd::scan_break(data, spec, bd::ScanMethod::brute_force));
  }
}
BENCHMARK(BM_ScanBruteForce)->Arg(100)->Arg(1000);

void BM_TwoStepScan(benchmark::State& state) {
  bd::DgpSpec spec;
  spec.model = bd::DgpModel::M7;
  spec.T = static_cast<int>(state.range(0));
  spec.delta0 = 2.0;
  spec.beta0 = 0.0;
  spec.seed = 7;
  bd::TimeSeriesDataset data = bd::generate(spec).data;
  bd::ModelSpec mspec;
  mspec.has_predictable = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bd::two_step_predictable(data, mspec));
  }
}
BENCHMARK(BM_TwoStepScan)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
