// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <random>

#include "miret/dataset.hpp"
#include "miret/forest.hpp"
#include "miret/te_metrics.hpp"

namespace {

miret::Dataset synthetic(std::size_t n, std::size_t j) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n * j);
  std::vector<miret::Label> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < j; ++k) {
      x[i * j + k] = u(rng);
      s += (k % 2 == 0 ? 1.0 : -0.5) * x[i * j + k];
    }
    y[i] = s + 0.2 * (u(rng) - 0.5) > 0.25 * static_cast<double>(j) ? 1 : -1;
  }
  return miret::make_dataset(std::move(x), std::move(y), {});
}

const miret::Dataset& data() {
  static const auto d = synthetic(800, 12);
  return d;
}

const miret::Forest& forest() {
  static const auto f = miret::train_forest(data(), {4, 100, 1, 0});
  return f;
}

void BM_TrainForestSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(miret::reference::train_forest(data(), {4, 100, 1, 0}));
}
void BM_TrainForestParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(miret::train_forest(data(), {4, 100, 1, 0}));
}
void BM_LeavesSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(miret::reference::leaf_assignments(forest(), data()));
}
void BM_LeavesParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(miret::leaf_assignments(forest(), data()));
}
void BM_ProximitySerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(miret::reference::proximity(forest(), data()));
}
void BM_ProximityParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(miret::proximity(forest(), data()));
}

}  // namespace

BENCHMARK(BM_TrainForestSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainForestParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeavesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeavesParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProximitySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProximityParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
