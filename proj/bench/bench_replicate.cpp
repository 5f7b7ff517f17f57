// Serial vs OpenMP replication, SSA vs Euler-Maruyama cost, and the KMT
// transform at growing noise lengths.
//
//   ./crnapprox_bench --benchmark_filter=Basin
//   OMP_NUM_THREADS=4 ./crnapprox_bench

#include <benchmark/benchmark.h>

#include <vector>

#include "crnapprox/continuum.hpp"
#include "crnapprox/kmt.hpp"
#include "crnapprox/model_io.hpp"
#include "crnapprox/rng.hpp"
#include "crnapprox/ssa.hpp"
#include "crnapprox/studies.hpp"

namespace {

crn::SimConfig bistable_config() {
  crn::SimConfig cfg;
  cfg.volume = 100.0;
  cfg.x0 = {2.0, 0.5};
  cfg.horizon = 20.0;
  cfg.seed = 1;
  cfg.boundary_policy = crn::BoundaryPolicy::absorb;
  return cfg;
}

const std::vector<std::vector<double>> kEquilibria = {{0.0, 0.0}, {6.0, 4.5}};

void BasinFraction(benchmark::State& state, crn::Method method, crn::Execution execution) {
  const auto net = crn::make_bistable();
  const auto cfg = bistable_config();
  const auto reps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto estimate = crn::basin_fraction(net, cfg, method, kEquilibria, reps, execution);
    benchmark::DoNotOptimize(estimate);
  }
  state.counters["threads"] = execution == crn::Execution::parallel ? crn::parallel_threads() : 1;
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(BasinFraction, ssa_serial, crn::Method::ssa, crn::Execution::serial)
    ->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BasinFraction, ssa_parallel, crn::Method::ssa, crn::Execution::parallel)
    ->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BasinFraction, em_serial, crn::Method::em, crn::Execution::serial)
    ->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BasinFraction, em_parallel, crn::Method::em, crn::Execution::parallel)
    ->Arg(64)->Unit(benchmark::kMillisecond);

void SsaMetabolism(benchmark::State& state) {
  const auto net = crn::make_metabolism(3);
  crn::SimConfig cfg;
  cfg.volume = static_cast<double>(state.range(0));
  cfg.x0 = {1.0, 1.0};
  cfg.horizon = 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(crn::simulate_ssa_final(net, cfg));
}
BENCHMARK(SsaMetabolism)->Arg(100)->Arg(600)->Arg(3600)->Unit(benchmark::kMillisecond);

void EmMetabolism(benchmark::State& state) {
  const auto net = crn::make_metabolism(3);
  crn::SimConfig cfg;
  cfg.volume = static_cast<double>(state.range(0));
  cfg.x0 = {1.0, 1.0};
  cfg.horizon = 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(crn::simulate_em_final(net, cfg));
}
BENCHMARK(EmMetabolism)->Arg(100)->Arg(600)->Arg(3600)->Unit(benchmark::kMillisecond);

void KmtTransform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  crn::Rng rng(5);
  std::vector<double> normals(n);
  for (double& w : normals) w = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(crn::kmt_increment_counts(normals, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(KmtTransform)->RangeMultiplier(16)->Range(1 << 8, 1 << 20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
