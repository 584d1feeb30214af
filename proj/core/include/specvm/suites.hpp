#ifndef SPECVM_SUITES_HPP
#define SPECVM_SUITES_HPP

#include "specvm/config.hpp"
#include "specvm/harness.hpp"

namespace specvm {

struct BenchmarkDef {
  std::string name;
  FunctionId targetFunctionId = -1;
  std::vector<int64_t> parameterValues;
  std::vector<Strategy::Kind> strategies;
  InputGenerator inputGenerator;
};

struct SuiteDefinition {
  std::string name;
  Program program;
  std::vector<BenchmarkDef> benchmarks;
  HarnessConfig defaults;
  FunctionId polluteSetupId = -1;  // -1: suite has no pollute setup
  // Zero-parameter workload functions usable with record_trace.
  std::vector<std::pair<std::string, FunctionId>> traceWorkloads;

  const BenchmarkDef* find_benchmark(const std::string& benchmark) const;

  // Builds a ready-to-run spec for one benchmark. The returned spec points at
  // this SuiteDefinition's program, which must outlive it. TraceReplay runs
  // use the single placeholder parameter 0 (inputs come from the trace).
  BenchmarkSpec spec_for(const std::string& benchmark, Strategy strategy) const;
};

// Polynomial hash: baseline loop vs. length-switch variant, pollute setup
// covering lengths 0..33, and three trace workloads (short-skewed, uniform
// with a forced mode, bimodal around 8 and 48).
SuiteDefinition suite_hashcode();

// map/filter/reduce library functions dispatching per element through a
// FuncRef, six query pipelines with distinct operators, and a pollute setup
// making every library call site megamorphic.
SuiteDefinition suite_stream();

// Linear-probe hash map/set over ByteArray storage, structurally identical
// clone functions, an init phase exercising only the stdlib versions, and
// POPULATE/CONTAINS/COPY/ITERATE benchmark targets for both variants.
SuiteDefinition suite_collections();

SuiteDefinition make_suite(const std::string& name);
std::vector<std::string> suite_names();

// Host-side reference model of the collections tables. Mirrors the guest
// layout bit for bit: map slots are 4 bytes [hi, lo, val, 0] with byte index
// (key*4) & (len-4); set slots are 2 bytes [hi, lo] with (key*2) & (len-2);
// key = hi*128 + lo, hi >= 1 marks an occupied slot.
namespace collections_ref {
ByteArray build_map(int64_t elements);
ByteArray build_set(int64_t elements);
void map_put(ByteArray& table, int hi, int lo, int val);
int64_t map_get(const ByteArray& table, int hi, int lo);  // val or -1
void set_add(ByteArray& table, int hi, int lo);
bool set_contains(const ByteArray& table, int hi, int lo);
// n interleaved (hi, lo) digit pairs, alternating present and absent keys
// for a table built by build_map/build_set with the same element count.
ByteArray contains_queries(int64_t elements);
}  // namespace collections_ref

}  // namespace specvm

#endif
