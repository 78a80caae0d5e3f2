// Serial reference runner against the OpenMP runner on the two experiment
// workloads. Worker count is the benchmark argument.

#include <benchmark/benchmark.h>

#include "spuct/harness.hpp"
#include "spuct/parallel.hpp"

namespace {

using namespace spuct;

const SyntheticTree& bench_tree() {
  static const auto tree = build_synthetic_tree({4, 3, 0.5, 0.2, 1});
  return *tree;
}

double synthetic_trial(std::size_t i) {
  const SyntheticTree& tree = bench_tree();
  const AlgorithmConfig cfg = make_algorithm_config(algorithm_preset("stochastic_power_uct", 2.0, 0.25), 3, 1.0, 3);
  Rng rng(derive_seed(0, 2, i));
  return plan(tree, cfg, 2048, rng).root_value;
}

double control_episode(std::size_t i) {
  static const auto lake = build_frozenlake(FrozenLakeSize::k4x4);
  const AlgorithmConfig cfg = make_algorithm_config(algorithm_preset("stochastic_power_uct", 2.0, 1.0), 100, 0.99, 100);
  return evaluate_episode(*lake, cfg, 64, derive_seed(0, 3, i));
}

constexpr std::size_t kItems = 32;

void BM_SyntheticSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_indexed_serial<double>(kItems, synthetic_trial));
}

void BM_SyntheticParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_indexed_parallel<double>(kItems, workers, synthetic_trial));
}

void BM_ControlSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_indexed_serial<double>(kItems, control_episode));
}

void BM_ControlParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_indexed_parallel<double>(kItems, workers, control_episode));
}

}  // namespace

BENCHMARK(BM_SyntheticSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SyntheticParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ControlSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ControlParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
