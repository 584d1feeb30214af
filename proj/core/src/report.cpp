#include "specvm/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace specvm {

namespace {

// benchmark -> param -> mean measure throughput
using Means = std::map<std::string, std::map<int64_t, double>>;

Means measure_means(const std::vector<CsvRow>& rows) {
  std::map<std::string, std::map<int64_t, std::pair<double, int64_t>>> acc;
  for (const auto& r : rows) {
    if (r.phase != "measure") continue;
    auto& [sum, n] = acc[r.benchmark][r.param];
    sum += r.throughput;
    ++n;
  }
  Means m;
  for (auto& [bench, byParam] : acc)
    for (auto& [param, sn] : byParam)
      m[bench][param] = sn.first / (double)sn.second;
  return m;
}

std::string strategy_of(const std::vector<CsvRow>& rows) {
  return rows.empty() ? std::string("?") : rows.front().strategy;
}

ReportRow stats_row(const std::string& bench, const std::string& strategies,
                    const std::vector<double>& values) {
  ReportRow row;
  row.benchmark = bench;
  row.strategies = strategies;
  double lnSum = 0;
  row.min = row.max = values.front();
  for (double v : values) {
    row.min = std::min(row.min, v);
    row.max = std::max(row.max, v);
    lnSum += std::log(v);
  }
  row.geomean = std::exp(lnSum / (double)values.size());
  return row;
}

}  // namespace

ReportTable report_compare(const std::vector<CsvRow>& a,
                           const std::vector<CsvRow>& b) {
  Means ma = measure_means(a);
  Means mb = measure_means(b);
  if (ma.empty() || mb.empty())
    throw HarnessError{"report: CSV has no measure rows"};
  std::string label = strategy_of(a) + " vs " + strategy_of(b);
  ReportTable t;
  for (const auto& [bench, byParam] : ma) {
    auto itb = mb.find(bench);
    if (itb == mb.end())
      throw HarnessError{"report: benchmark '" + bench +
                         "' missing from second CSV"};
    std::vector<double> ratios;
    for (const auto& [param, meanA] : byParam) {
      auto itp = itb->second.find(param);
      if (itp == itb->second.end())
        throw HarnessError{"report: parameter " + std::to_string(param) +
                           " of '" + bench + "' missing from second CSV"};
      ratios.push_back(meanA / itp->second);
    }
    t.rows.push_back(stats_row(bench, label, ratios));
  }
  return t;
}

ReportTable report_single(const std::vector<CsvRow>& a) {
  Means ma = measure_means(a);
  if (ma.empty()) throw HarnessError{"report: CSV has no measure rows"};
  ReportTable t;
  for (const auto& [bench, byParam] : ma) {
    std::vector<double> values;
    for (const auto& [_, mean] : byParam) values.push_back(mean);
    t.rows.push_back(stats_row(bench, strategy_of(a), values));
  }
  return t;
}

std::string format_report(const ReportTable& t) {
  size_t w = 9;  // "benchmark"
  for (const auto& r : t.rows) w = std::max(w, r.benchmark.size());
  size_t ws = 10;  // "strategies"
  for (const auto& r : t.rows) ws = std::max(ws, r.strategies.size());

  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s  %-*s  %9s  %9s  %9s\n", (int)w,
                "benchmark", (int)ws, "strategies", "min", "max", "geomean");
  out << buf;
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-*s  %8.4fx  %8.4fx  %8.4fx\n",
                  (int)w, r.benchmark.c_str(), (int)ws, r.strategies.c_str(),
                  r.min, r.max, r.geomean);
    out << buf;
  }
  return out.str();
}

}  // namespace specvm
