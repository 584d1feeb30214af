#ifndef SPECVM_HARNESS_HPP
#define SPECVM_HARNESS_HPP

#include <functional>
#include <iosfwd>

#include "specvm/vm.hpp"

namespace specvm {

struct HarnessError {
  std::string message;
};

// One argument descriptor per recorded call: Int arguments contribute their
// value, ByteArray arguments their length (FuncRefs are skipped).
struct Trace {
  std::string targetFunctionName;
  std::vector<std::vector<int64_t>> records;
};

struct Strategy {
  enum class Kind { DoNothing, ManualPollute, TraceReplay };
  Kind kind = Kind::DoNothing;
  FunctionId setupFunctionId = -1;  // ManualPollute
  Trace trace;                      // TraceReplay

  static Strategy do_nothing() { return {}; }
  static Strategy manual_pollute(FunctionId setup) {
    return {Kind::ManualPollute, setup, {}};
  }
  static Strategy trace_replay(Trace t) {
    return {Kind::TraceReplay, -1, std::move(t)};
  }
};

const char* strategy_name(Strategy::Kind k);

// Deterministic argument generator: (parameter, op index, seed) -> args.
// Under TraceReplay the parameter is taken from the trace record instead.
using InputGenerator =
    std::function<std::vector<Value>(int64_t param, int64_t opIndex,
                                     uint64_t seed)>;

struct BenchmarkSpec {
  const Program* program = nullptr;
  FunctionId targetFunctionId = -1;
  InputGenerator inputGenerator;
  std::vector<int64_t> parameterValues;
  Strategy strategy;
  int forks = 5;
  int warmupIterations = 5;
  int measureIterations = 5;
  int64_t opsPerIteration = 2000;
  bool withInit = false;
  CostModel model;
  uint64_t seed = 0;
};

struct IterationRecord {
  int64_t param = 0;
  int fork = 0;
  int iteration = 0;  // index within its phase
  bool warmup = false;
  uint64_t virtualCycles = 0;
  int64_t ops = 0;
  double throughput = 0.0;  // ops / virtualCycles
  uint64_t deopts = 0;      // ledger delta for this iteration
  uint64_t compiles = 0;
};

struct RunResult {
  std::vector<int64_t> parameterValues;
  std::vector<IterationRecord> rows;

  std::vector<double> measure_throughputs(int64_t param) const;
  std::vector<uint64_t> measure_cycles(int64_t param) const;
  double mean_measure_throughput(int64_t param) const;
  uint64_t total_measure_cycles(int64_t param) const;
};

struct StatsSummary {
  size_t n = 0;
  double mean = 0, stdev = 0, ci95 = 0, min = 0, max = 0;
};

// Sample stdev (n-1), ci95 = 1.96*stdev/sqrt(n). Requires n >= 2.
StatsSummary summarize(const std::vector<double>& values);

struct SpeedupTable {
  std::vector<std::pair<int64_t, double>> perParameter;  // param, ratio a/b
  double min = 0, max = 0, geomean = 0;
};

// Per-parameter ratio of measure-phase mean throughputs, a over b.
// Requires identical parameterValues.
SpeedupTable speedup_table(const RunResult& a, const RunResult& b);

// Pinned input bytes: (seed + i*17 + j) mod 251 - 125 for op i, element j.
int8_t input_byte(uint64_t seed, int64_t opIndex, int64_t j);
std::shared_ptr<ByteArray> make_input_bytes(uint64_t seed, int64_t opIndex,
                                            int64_t length);

RunResult run_benchmark(const BenchmarkSpec& spec);

// Runs the zero-parameter workload on a fresh profiling VM and records every
// call into the target, in invocation order.
Trace record_trace(const Program& program, FunctionId workloadFunctionId,
                   FunctionId targetFunctionId, const CostModel& model);

void write_trace(const Trace& t, std::ostream& out);
Trace read_trace(std::istream& in);

// Header: suite,benchmark,param,strategy,fork,iteration,phase,virtual_cycles,
// ops,throughput,deopts,compiles
void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const std::string& suite,
                    const std::string& benchmark, const std::string& strategy,
                    const RunResult& result);

struct CsvRow {
  std::string suite, benchmark, strategy, phase;
  int64_t param = 0;
  int fork = 0, iteration = 0;
  uint64_t virtualCycles = 0;
  int64_t ops = 0;
  double throughput = 0.0;
  uint64_t deopts = 0, compiles = 0;
};

std::vector<CsvRow> read_csv(std::istream& in);

}  // namespace specvm

#endif
