#include <benchmark/benchmark.h>

#include "cppdd/field.hpp"
#include "cppdd/rng.hpp"

using namespace cppdd;

static void BM_FieldMul(benchmark::State& state) {
  Sha3CtrRng rng(1, "bench/mul");
  FieldElement a = sample_element(rng, true);
  FieldElement b = sample_element(rng, true);
  for (auto _ : state) {
    a = a * b;
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_FieldMul);

static void BM_FieldInverse(benchmark::State& state) {
  Sha3CtrRng rng(2, "bench/inv");
  FieldElement a = sample_element(rng, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(a.inverse());
  }
}
BENCHMARK(BM_FieldInverse);

static void BM_VecApply(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Sha3CtrRng rng(3, "bench/vec");
  FieldVector v = sample_vector(rng, d);
  FieldVector k = sample_vector(rng, d, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vec_apply(v, k, OpCode::Mul));
  }
  state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_VecApply)->Arg(8)->Arg(784)->Arg(4096);
