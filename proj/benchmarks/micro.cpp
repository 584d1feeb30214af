// Wall-clock microbenchmarks of the simulator itself (the simulator's own
// virtual-cycle measurements live in the harness, not here).
#include <benchmark/benchmark.h>

#include "specvm/suites.hpp"

using namespace specvm;

namespace {

std::vector<Value> hash_args(int64_t length) {
  return {Value::from_bytes(make_input_bytes(42, 0, length))};
}

void BM_InterpretHashBaseline(benchmark::State& state) {
  Program p = suite_hashcode().program;
  CostModel model;
  auto args = hash_args(state.range(0));
  for (auto _ : state) {
    VmInstance vm(p, model);
    benchmark::DoNotOptimize(vm.invoke(0, args));
  }
}
BENCHMARK(BM_InterpretHashBaseline)->Arg(8)->Arg(64);

void BM_CompiledHashFt32(benchmark::State& state) {
  Program p = suite_hashcode().program;
  CostModel model;
  VmInstance vm(p, model);
  auto args = hash_args(state.range(0));
  for (int i = 0; i < 200; ++i) vm.invoke(1, args);  // reach compiled tier
  for (auto _ : state) benchmark::DoNotOptimize(vm.invoke(1, args));
}
BENCHMARK(BM_CompiledHashFt32)->Arg(8)->Arg(32);

void BM_CompileFt32(benchmark::State& state) {
  Program p = suite_hashcode().program;
  CostModel model;
  VmInstance seed(p, model);
  auto args = hash_args(8);
  for (int i = 0; i < 200; ++i) seed.invoke(1, args);
  AssumptionBlacklist none;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        compile(p, 1, seed.profiles(), none, model, 1));
  }
}
BENCHMARK(BM_CompileFt32);

void BM_RunBenchmarkSmall(benchmark::State& state) {
  SuiteDefinition suite = suite_hashcode();
  BenchmarkSpec spec = suite.spec_for("baseline", Strategy::do_nothing());
  spec.parameterValues = {8};
  spec.forks = 1;
  spec.warmupIterations = 1;
  spec.measureIterations = 2;
  spec.opsPerIteration = 200;
  for (auto _ : state) benchmark::DoNotOptimize(run_benchmark(spec));
}
BENCHMARK(BM_RunBenchmarkSmall);

}  // namespace

BENCHMARK_MAIN();
