#include <benchmark/benchmark.h>

#include "cppdd/harness.hpp"
#include "cppdd/simnet.hpp"

using namespace cppdd;

namespace {

harness::Instance bench_instance(std::uint32_t n, std::uint32_t d) {
  harness::ExperimentConfig cfg;
  cfg.experiment = "scalability";
  cfg.dim = d;
  return harness::make_instance(cfg, n, 12345);
}

}  // namespace

static void BM_Setup(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const auto d = static_cast<std::uint32_t>(state.range(1));
  auto inst = bench_instance(n, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        coordinator::setup(inst.params, inst.cci, inst.priorities, 12345));
  }
}
BENCHMARK(BM_Setup)->Args({10, 784})->Args({100, 784});

static void BM_FullRun(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const auto d = static_cast<std::uint32_t>(state.range(1));
  auto inst = bench_instance(n, d);
  auto setup = coordinator::setup(inst.params, inst.cci, inst.priorities, 12345);
  Simulation sim(SimConfig{.collect_recovered = false});
  for (auto _ : state) {
    auto t = sim.run(setup, FaultPlan{});
    benchmark::DoNotOptimize(t);
  }
  state.SetItemsProcessed(state.iterations() * n * d);
}
BENCHMARK(BM_FullRun)->Args({10, 784})->Args({100, 784});

BENCHMARK_MAIN();
