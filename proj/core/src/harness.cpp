#include "specvm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace specvm {

const char* strategy_name(Strategy::Kind k) {
  switch (k) {
    case Strategy::Kind::DoNothing: return "do-nothing";
    case Strategy::Kind::ManualPollute: return "manual-pollute";
    case Strategy::Kind::TraceReplay: return "trace";
  }
  return "?";
}

std::vector<double> RunResult::measure_throughputs(int64_t param) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (!r.warmup && r.param == param) out.push_back(r.throughput);
  return out;
}

std::vector<uint64_t> RunResult::measure_cycles(int64_t param) const {
  std::vector<uint64_t> out;
  for (const auto& r : rows)
    if (!r.warmup && r.param == param) out.push_back(r.virtualCycles);
  return out;
}

double RunResult::mean_measure_throughput(int64_t param) const {
  double sum = 0;
  size_t n = 0;
  for (const auto& r : rows)
    if (!r.warmup && r.param == param) sum += r.throughput, ++n;
  if (n == 0) throw HarnessError{"no measure rows for parameter " +
                                 std::to_string(param)};
  return sum / (double)n;
}

uint64_t RunResult::total_measure_cycles(int64_t param) const {
  uint64_t sum = 0;
  for (const auto& r : rows)
    if (!r.warmup && r.param == param) sum += r.virtualCycles;
  return sum;
}

StatsSummary summarize(const std::vector<double>& values) {
  if (values.size() < 2) throw HarnessError{"summarize requires n >= 2"};
  StatsSummary s;
  s.n = values.size();
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / (double)s.n;
  double sq = 0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stdev = std::sqrt(sq / (double)(s.n - 1));
  s.ci95 = 1.96 * s.stdev / std::sqrt((double)s.n);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

SpeedupTable speedup_table(const RunResult& a, const RunResult& b) {
  if (a.parameterValues != b.parameterValues)
    throw HarnessError{"speedup_table: parameter values differ"};
  SpeedupTable t;
  double lnSum = 0;
  for (int64_t p : a.parameterValues) {
    double ratio = a.mean_measure_throughput(p) / b.mean_measure_throughput(p);
    t.perParameter.push_back({p, ratio});
    lnSum += std::log(ratio);
  }
  if (t.perParameter.empty()) throw HarnessError{"speedup_table: no parameters"};
  t.min = t.max = t.perParameter.front().second;
  for (const auto& [_, r] : t.perParameter) {
    t.min = std::min(t.min, r);
    t.max = std::max(t.max, r);
  }
  t.geomean = std::exp(lnSum / (double)t.perParameter.size());
  return t;
}

int8_t input_byte(uint64_t seed, int64_t opIndex, int64_t j) {
  uint64_t v = (seed + (uint64_t)opIndex * 17u + (uint64_t)j) % 251u;
  return (int8_t)((int64_t)v - 125);
}

std::shared_ptr<ByteArray> make_input_bytes(uint64_t seed, int64_t opIndex,
                                            int64_t length) {
  auto arr = std::make_shared<ByteArray>((size_t)length);
  for (int64_t j = 0; j < length; ++j) (*arr)[j] = input_byte(seed, opIndex, j);
  return arr;
}

static void validate_spec(const BenchmarkSpec& spec) {
  if (!spec.program) throw HarnessError{"spec has no program"};
  if (spec.forks < 1 || spec.warmupIterations < 0 ||
      spec.measureIterations < 1 || spec.opsPerIteration < 1)
    throw HarnessError{"spec counts must be positive"};
  if (!spec.program->find(spec.targetFunctionId))
    throw HarnessError{"target function not in program"};
  if (spec.strategy.kind == Strategy::Kind::ManualPollute) {
    const Function* setup = spec.program->find(spec.strategy.setupFunctionId);
    if (!setup || setup->paramCount != 0)
      throw HarnessError{"pollute setup must be a zero-parameter function"};
  }
  if (spec.strategy.kind == Strategy::Kind::TraceReplay &&
      spec.strategy.trace.records.empty())
    throw HarnessError{"empty trace"};
  if (spec.parameterValues.empty()) throw HarnessError{"no parameter values"};
  if (!spec.inputGenerator) throw HarnessError{"spec has no input generator"};
}

RunResult run_benchmark(const BenchmarkSpec& spec) {
  validate_spec(spec);
  RunResult result;
  result.parameterValues = spec.parameterValues;
  const auto& traceRecords = spec.strategy.trace.records;

  for (int64_t param : spec.parameterValues) {
    for (int fork = 0; fork < spec.forks; ++fork) {
      VmInstance vm = make_fork(*spec.program, spec.model, spec.withInit);
      if (spec.strategy.kind == Strategy::Kind::ManualPollute) {
        try {
          vm.invoke(spec.strategy.setupFunctionId, {});
        } catch (const GuestError& e) {
          throw HarnessError{"pollute setup failed in fork " +
                             std::to_string(fork) + ": " + e.message};
        }
      }
      int64_t opCounter = 0;
      int total = spec.warmupIterations + spec.measureIterations;
      for (int it = 0; it < total; ++it) {
        bool warmup = it < spec.warmupIterations;
        uint64_t c0 = vm.ledger().totalCycles;
        uint64_t d0 = vm.ledger().deoptEvents;
        uint64_t k0 = vm.ledger().compileEvents;
        for (int64_t op = 0; op < spec.opsPerIteration; ++op) {
          int64_t p = param;
          if (spec.strategy.kind == Strategy::Kind::TraceReplay) {
            const auto& rec = traceRecords[opCounter % (int64_t)traceRecords.size()];
            p = rec.empty() ? 0 : rec[0];
          }
          vm.invoke(spec.targetFunctionId,
                    spec.inputGenerator(p, opCounter, spec.seed));
          ++opCounter;
        }
        IterationRecord r;
        r.param = param;
        r.fork = fork;
        r.iteration = warmup ? it : it - spec.warmupIterations;
        r.warmup = warmup;
        r.virtualCycles = vm.ledger().totalCycles - c0;
        r.ops = spec.opsPerIteration;
        r.throughput = (double)r.ops / (double)r.virtualCycles;
        r.deopts = vm.ledger().deoptEvents - d0;
        r.compiles = vm.ledger().compileEvents - k0;
        result.rows.push_back(r);
      }
    }
  }
  return result;
}

Trace record_trace(const Program& program, FunctionId workloadFunctionId,
                   FunctionId targetFunctionId, const CostModel& model) {
  const Function* workload = program.find(workloadFunctionId);
  const Function* target = program.find(targetFunctionId);
  if (!workload || workload->paramCount != 0)
    throw HarnessError{"workload must be a zero-parameter function"};
  if (!target) throw HarnessError{"target function not in program"};
  Trace t;
  t.targetFunctionName = target->name;
  VmInstance vm(program, model);
  vm.record_calls_into(targetFunctionId, &t.records);
  vm.invoke(workloadFunctionId, {});
  if (t.records.empty()) throw HarnessError{"empty trace"};
  return t;
}

void write_trace(const Trace& t, std::ostream& out) {
  out << "#specvm-trace v1\n";
  out << "target=" << t.targetFunctionName << "\n";
  for (const auto& rec : t.records) {
    for (size_t i = 0; i < rec.size(); ++i) {
      if (i) out << " ";
      out << rec[i];
    }
    out << "\n";
  }
}

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  if (!std::getline(in, line) || line != "#specvm-trace v1")
    throw HarnessError{"malformed trace: bad header"};
  if (!std::getline(in, line) || line.rfind("target=", 0) != 0)
    throw HarnessError{"malformed trace: missing target line"};
  t.targetFunctionName = line.substr(7);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<int64_t> rec;
    int64_t v;
    while (ls >> v) rec.push_back(v);
    if (!ls.eof()) throw HarnessError{"malformed trace: non-integer record"};
    t.records.push_back(std::move(rec));
  }
  if (t.records.empty()) throw HarnessError{"empty trace"};
  return t;
}

static const char* kCsvHeader =
    "suite,benchmark,param,strategy,fork,iteration,phase,virtual_cycles,ops,"
    "throughput,deopts,compiles";

static std::string format_throughput(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << "\n"; }

void write_csv_rows(std::ostream& out, const std::string& suite,
                    const std::string& benchmark, const std::string& strategy,
                    const RunResult& result) {
  for (const auto& r : result.rows) {
    out << suite << "," << benchmark << "," << r.param << "," << strategy
        << "," << r.fork << "," << r.iteration << ","
        << (r.warmup ? "warmup" : "measure") << "," << r.virtualCycles << ","
        << r.ops << "," << format_throughput(r.throughput) << "," << r.deopts
        << "," << r.compiles << "\n";
  }
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw HarnessError{"malformed CSV: bad header"};
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 12) throw HarnessError{"malformed CSV row: " + line};
    try {
      CsvRow r;
      r.suite = f[0];
      r.benchmark = f[1];
      r.param = std::stoll(f[2]);
      r.strategy = f[3];
      r.fork = std::stoi(f[4]);
      r.iteration = std::stoi(f[5]);
      r.phase = f[6];
      r.virtualCycles = std::stoull(f[7]);
      r.ops = std::stoll(f[8]);
      r.throughput = std::stod(f[9]);
      r.deopts = std::stoull(f[10]);
      r.compiles = std::stoull(f[11]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw HarnessError{"malformed CSV row: " + line};
    }
  }
  return rows;
}

}  // namespace specvm
