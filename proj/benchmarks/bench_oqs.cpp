// bench_oqs.cpp — hot-path timings: Wick sums, Dyson weights, Monte Carlo orders, oracle traces

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "oqs/dyson.hpp"
#include "oqs/oracle.hpp"
#include "oqs/pairings.hpp"
#include "oqs/sampling.hpp"

using namespace oqs;

namespace {

const BathSpec kBath{{{1.0, 0.2}}, 2.0};
constexpr double kT = 1.0;

std::vector<double> sorted_times(int m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> s(static_cast<std::size_t>(m));
  draw_ordered(gen, 0.0, 2.0 * kT, s);
  return s;
}

void BM_WickSum(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const CorrelationFn b = CorrelationFn::discrete_modes(kBath, kT);
  const auto s = sorted_times(m, 1);
  for (auto _ : state) benchmark::DoNotOptimize(wick_sum(std::span<const double>(s), b));
}
BENCHMARK(BM_WickSum)->DenseRange(2, 12, 2);

void BM_DysonWeight(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ContourSystem sys(spin_boson_system(1.0, 0.3, SpinObservable::sigma_x, SpinState::plus), kT);
  const auto s = sorted_times(m, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sys.dyson_weight(std::span<const double>(s)));
}
BENCHMARK(BM_DysonWeight)->DenseRange(2, 8, 2);

void BM_MonteCarloOrder(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ContourSystem sys(spin_boson_system(1.0, 0.0, SpinObservable::sigma_x, SpinState::plus), kT);
  const CorrelationFn b = CorrelationFn::discrete_modes(kBath, kT);
  DysonConfig cfg;
  cfg.t = kT;
  cfg.max_order = m;
  cfg.integrator = Integrator::monte_carlo;
  cfg.samples_per_order = 1 << 14;
  cfg.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_order(m, sys, b, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.samples_per_order));
}
BENCHMARK(BM_MonteCarloOrder)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_OracleTraceURing(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  FockTruncation trunc;
  trunc.n_max = 12;
  const CompositeModel model(spin_boson_system(1.0, 0.0, SpinObservable::sigma_x, SpinState::plus), kBath, trunc);
  const auto s = sorted_times(m, 3);
  for (auto _ : state) benchmark::DoNotOptimize(model.trace_u_ring(std::span<const double>(s), kT));
}
BENCHMARK(BM_OracleTraceURing)->DenseRange(2, 6, 2);

void BM_OracleObservable(benchmark::State& state) {
  FockTruncation trunc;
  trunc.n_max = static_cast<int>(state.range(0));
  const SystemSpec sys = spin_boson_system(1.0, 0.0, SpinObservable::sigma_x, SpinState::plus);
  for (auto _ : state) benchmark::DoNotOptimize(exact_observable(sys, kBath, trunc, kT));
}
BENCHMARK(BM_OracleObservable)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
