#include <benchmark/benchmark.h>

#include "rangevol/detection.hpp"
#include "rangevol/figarch.hpp"
#include "rangevol/ged.hpp"
#include "rangevol/range_vol.hpp"
#include "rangevol/simulation.hpp"

using namespace rangevol;

namespace {

const FigarchParams kParams{0.0, 1e-4, 0.4, 0.2, 0.3, 1.5};

void BM_GedQuantile(benchmark::State& state) {
  const double nu = static_cast<double>(state.range(0)) / 10.0;
  double p = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ged_quantile(p, nu));
    p = p < 0.998 ? p + 0.001 : 0.001;
  }
}
BENCHMARK(BM_GedQuantile)->Arg(8)->Arg(15)->Arg(20)->Arg(30);

void BM_Filter(benchmark::State& state) {
  const auto path = simulate_figarch(kParams, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(filter(path.returns, kParams).loglik);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Filter)->Arg(300)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto path = simulate_figarch(kParams, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(fit(path.returns).loglik);
}
BENCHMARK(BM_Fit)->Arg(600)->Unit(benchmark::kMillisecond)->Iterations(2)->UseRealTime();

void BM_EstimateAll(benchmark::State& state) {
  GbmSettings g;
  g.periods = static_cast<std::size_t>(state.range(0));
  g.steps_per_period = 64;
  const auto series = simulate_gbm_ohlc(g);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_all(series, {}).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateAll)->Arg(120)->Arg(1200)->Arg(12000);

void BM_Detection(benchmark::State& state) {
  GbmSettings g;
  g.periods = static_cast<std::size_t>(state.range(0));
  g.steps_per_period = 64;
  const auto vol = yang_zhang(simulate_gbm_ohlc(g));
  for (auto _ : state) benchmark::DoNotOptimize(flag_months(vol).flagged_count());
}
BENCHMARK(BM_Detection)->Arg(1200);

void BM_GbmBars(benchmark::State& state) {
  GbmSettings g;
  g.periods = 120;
  g.steps_per_period = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_gbm_ohlc(g).size());
    ++g.seed;
  }
  state.SetItemsProcessed(state.iterations() * 120);
}
BENCHMARK(BM_GbmBars)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
