#include <benchmark/benchmark.h>

#include "twinphoton/counting.hpp"
#include "twinphoton/rates.hpp"
#include "twinphoton/source.hpp"
#include "twinphoton/tomography.hpp"

using namespace twinphoton;

namespace {

std::vector<CountRecord> typical_records(std::uint64_t seed) {
  return simulate_counts(model_density_matrix({0.5, 0.5, 0.375}), projector_set_16(),
                         expected_rates(RateBudget{}), 600.0, seed);
}

void BM_Concurrence(benchmark::State& state) {
  const DensityMatrix rho = mix_with_white_noise(model_density_matrix({0.5, 0.5, 0.375}), 0.95);
  for (auto _ : state) benchmark::DoNotOptimize(concurrence(rho));
}
BENCHMARK(BM_Concurrence);

void BM_ChshMax(benchmark::State& state) {
  const DensityMatrix rho = mix_with_white_noise(model_density_matrix({0.5, 0.5, 0.375}), 0.95);
  for (auto _ : state) benchmark::DoNotOptimize(chsh_max(rho));
}
BENCHMARK(BM_ChshMax);

void BM_Mle(benchmark::State& state) {
  const auto records = typical_records(1);
  for (auto _ : state) benchmark::DoNotOptimize(mle_reconstruct(records));
}
BENCHMARK(BM_Mle)->Unit(benchmark::kMicrosecond);

void BM_Reconstruct(benchmark::State& state) {
  const auto records = typical_records(1);
  TomographyOptions opts;
  opts.mc_samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(records, opts));
}
BENCHMARK(BM_Reconstruct)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_OverlapBeta(benchmark::State& state) {
  const auto disp = DispersionModel::paper_default();
  PumpGeometry g;
  g.theta_deg = degeneracy_angle(disp, g.lambda_p_nm);
  g.delta_z_mm = 0.3 * g.waist_mm;
  for (auto _ : state) benchmark::DoNotOptimize(overlap_beta(g, disp));
}
BENCHMARK(BM_OverlapBeta)->Unit(benchmark::kMicrosecond);

void BM_TuningCurves(benchmark::State& state) {
  const auto disp = DispersionModel::paper_default();
  for (auto _ : state) benchmark::DoNotOptimize(tuning_curves(disp, 759.0, -0.7, 0.7, 281));
}
BENCHMARK(BM_TuningCurves)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
