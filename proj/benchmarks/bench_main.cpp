#include <benchmark/benchmark.h>

#include <vector>

#include "digitfor/benford.hpp"
#include "digitfor/rng.hpp"
#include "digitfor/scatter_sim.hpp"
#include "digitfor/stat_tests.hpp"

namespace {

std::vector<std::int64_t> synthetic_totals(std::size_t n) {
  digitfor::Rng rng(2009);
  std::vector<std::int64_t> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = static_cast<std::int64_t>(
        std::pow(10.0, 4.0 + 1.6 * rng.uniform01()));
  return v;
}

void bm_first_digit(benchmark::State& state) {
  digitfor::Rng rng(1);
  std::vector<std::uint64_t> vals(4096);
  for (auto& v : vals) v = 1 + rng.next() % 999999999ull;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(digitfor::first_digit(vals[i++ & 4095]));
  }
}
BENCHMARK(bm_first_digit);

void bm_poisson_tail(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(digitfor::poisson_tail(41, 22.0));
}
BENCHMARK(bm_poisson_tail);

void bm_simulate_realization(benchmark::State& state) {
  std::vector<std::int64_t> totals = synthetic_totals(366);
  digitfor::Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        digitfor::simulate_realization(totals, 0.00838, state.range(0) * 0.1,
                                       rng));
  }
}
BENCHMARK(bm_simulate_realization)->Arg(0)->Arg(4)->Arg(15);

void bm_run_simulation_block(benchmark::State& state) {
  digitfor::SimulationConfig cfg;
  cfg.totals = synthetic_totals(366);
  cfg.mean_fraction = 0.00838;
  cfg.sigmas = {0.4};
  cfg.realizations = 10000;
  cfg.seed = 11;
  cfg.conditions = {{7, 41}, {1, 127}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(digitfor::run_simulation(cfg, state.range(0)));
  }
}
BENCHMARK(bm_run_simulation_block)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void bm_ks_exact(benchmark::State& state) {
  std::vector<double> a = {0.600, 0.609, 0.669, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<double> b = {0.497, 0.537, 0.433, 0.15, 0.25, 0.35, 0.45, 0.55,
                           0.65, 0.75};
  for (auto _ : state)
    benchmark::DoNotOptimize(digitfor::ks_two_sample_exact(a, b));
}
BENCHMARK(bm_ks_exact);

}  // namespace

BENCHMARK_MAIN();
