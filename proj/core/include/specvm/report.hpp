#ifndef SPECVM_REPORT_HPP
#define SPECVM_REPORT_HPP

#include "specvm/harness.hpp"

namespace specvm {

struct ReportRow {
  std::string benchmark;
  std::string strategies;  // "a" or "a vs b"
  double min = 0, max = 0, geomean = 0;
};

struct ReportTable {
  std::vector<ReportRow> rows;
};

// Per-benchmark speedup statistics: mean measure-phase throughput of `a`
// over `b` per parameter, then min/max/geomean across parameters. Both CSVs
// must cover the same benchmarks and parameters.
ReportTable report_compare(const std::vector<CsvRow>& a,
                           const std::vector<CsvRow>& b);

// Single-CSV summary: per-benchmark min/max/geomean of the per-parameter
// mean measure-phase throughputs.
ReportTable report_single(const std::vector<CsvRow>& a);

std::string format_report(const ReportTable& t);

}  // namespace specvm

#endif
