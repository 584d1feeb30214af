#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "specvm/report.hpp"
#include "specvm/suites.hpp"
#include "specvm/text.hpp"

namespace {

using namespace specvm;

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

std::optional<Strategy::Kind> parse_strategy(const std::string& s) {
  if (s == "do-nothing") return Strategy::Kind::DoNothing;
  if (s == "manual-pollute") return Strategy::Kind::ManualPollute;
  if (s == "trace") return Strategy::Kind::TraceReplay;
  return std::nullopt;
}

bool known_suite(const std::string& s) {
  for (const auto& n : suite_names())
    if (n == s) return true;
  return false;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError{"cannot open trace file " + path};
  return read_trace(in);
}

std::vector<CsvRow> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError{"cannot open CSV file " + path};
  return read_csv(in);
}

// Runs every benchmark of the suite that supports the strategy and writes
// one combined CSV.
int run_bench(const std::string& suiteName, Strategy::Kind kind,
              const std::string& tracePath, const std::string& configPath,
              std::optional<uint64_t> seed, const std::string& outPath) {
  SuiteDefinition suite = make_suite(suiteName);
  HarnessConfig cfg = suite.defaults;
  if (!configPath.empty()) cfg = parse_config_file(configPath, cfg);
  if (seed) cfg.seed = *seed;

  Strategy strategy;
  strategy.kind = kind;
  if (kind == Strategy::Kind::TraceReplay) {
    if (tracePath.empty()) throw HarnessError{"--trace is required"};
    strategy.trace = load_trace(tracePath);
  }

  std::ostringstream csv;
  write_csv_header(csv);
  bool any = false;
  for (const auto& bd : suite.benchmarks) {
    bool supported = false;
    for (auto k : bd.strategies)
      if (k == kind) supported = true;
    if (!supported) continue;
    any = true;
    BenchmarkSpec spec = suite.spec_for(bd.name, strategy);
    apply_config(cfg, spec);
    RunResult result = run_benchmark(spec);
    write_csv_rows(csv, suite.name, bd.name, strategy_name(kind), result);
  }
  if (!any)
    throw HarnessError{std::string("no benchmark in suite ") + suiteName +
                       " supports strategy " + strategy_name(kind)};

  if (outPath.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(outPath);
    if (!out) throw HarnessError{"cannot write " + outPath};
    out << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic tiered-JIT simulator and benchmark harness"};
  app.require_subcommand(1);

  std::string suiteName, strategyStr, tracePath, configPath, outPath, logSpec;
  std::string workloadName, targetName, aPath, bPath, programPath;
  std::optional<uint64_t> seed;

  auto* bench = app.add_subcommand("bench", "run a suite and write CSV");
  bench->add_option("--suite", suiteName)->required();
  bench->add_option("--strategy", strategyStr)->required();
  bench->add_option("--trace", tracePath);
  bench->add_option("--config", configPath);
  bench->add_option("--seed", seed);
  bench->add_option("--out", outPath);
  bench->add_option("--log", logSpec);

  auto* record = app.add_subcommand("record", "record a call trace");
  record->add_option("--suite", suiteName)->required();
  record->add_option("--workload", workloadName)->required();
  record->add_option("--target", targetName)->required();
  record->add_option("--out", outPath)->required();

  auto* replay = app.add_subcommand("replay", "replay a recorded trace");
  replay->add_option("--suite", suiteName)->required();
  replay->add_option("--trace", tracePath)->required();
  replay->add_option("--config", configPath);
  replay->add_option("--seed", seed);
  replay->add_option("--out", outPath);
  replay->add_option("--log", logSpec);

  auto* report = app.add_subcommand("report", "summarize one or two CSVs");
  report->add_option("--a", aPath)->required();
  report->add_option("--b", bPath);

  auto* validateCmd = app.add_subcommand("validate", "parse and check a program");
  validateCmd->add_option("--program", programPath)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (!logSpec.empty()) setenv("SPECVM_LOG", logSpec.c_str(), 1);

    if (bench->parsed() || replay->parsed()) {
      if (!known_suite(suiteName)) return usage_error("unknown suite '" + suiteName + "'");
      Strategy::Kind kind = Strategy::Kind::TraceReplay;
      if (bench->parsed()) {
        auto k = parse_strategy(strategyStr);
        if (!k) return usage_error("unknown strategy '" + strategyStr + "'");
        kind = *k;
      }
      return run_bench(suiteName, kind, tracePath, configPath, seed, outPath);
    }

    if (record->parsed()) {
      if (!known_suite(suiteName)) return usage_error("unknown suite '" + suiteName + "'");
      SuiteDefinition suite = make_suite(suiteName);
      const Function* workload = suite.program.find(workloadName);
      const Function* target = suite.program.find(targetName);
      if (!workload) return usage_error("unknown function '" + workloadName + "'");
      if (!target) return usage_error("unknown function '" + targetName + "'");
      Trace t = record_trace(suite.program, workload->id, target->id,
                             suite.defaults.model);
      std::ofstream out(outPath);
      if (!out) throw HarnessError{"cannot write " + outPath};
      write_trace(t, out);
      return 0;
    }

    if (report->parsed()) {
      ReportTable table = bPath.empty()
                              ? report_single(load_csv(aPath))
                              : report_compare(load_csv(aPath), load_csv(bPath));
      std::cout << format_report(table);
      return 0;
    }

    if (validateCmd->parsed()) {
      std::ifstream in(programPath);
      if (!in) throw HarnessError{"cannot open program file " + programPath};
      std::stringstream buf;
      buf << in.rdbuf();
      Program p = parse_program(buf.str());
      ValidationReport r = specvm::validate(p);
      if (!r.ok()) {
        for (const auto& v : r.violations)
          std::cerr << "function " << v.function << ": " << v.rule << "\n";
        return 2;
      }
      std::cout << "ok: " << p.functions.size() << " functions\n";
      return 0;
    }
  } catch (const HarnessError& e) {
    std::cerr << "error: " << e.message << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error (line " << e.line << "): " << e.message << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const GuestError& e) {
    std::cerr << "guest error: " << e.message << " (function " << e.function
              << ", site " << e.site << ")\n";
    return 2;
  }
  return 1;
}
