#ifndef SPECVM_CONFIG_HPP
#define SPECVM_CONFIG_HPP

#include <iosfwd>

#include "specvm/harness.hpp"

namespace specvm {

struct ConfigError {
  std::string message;
  int line = 0;
};

// Harness knobs settable from a config file. Program, target, strategy and
// parameter values come from the suite, not from here.
struct HarnessConfig {
  CostModel model;
  int forks = 5;
  int warmupIterations = 5;
  int measureIterations = 5;
  int64_t opsPerIteration = 2000;
  bool withInit = false;
  uint64_t seed = 0;
};

// `key = value` lines; blank lines and lines starting with `#` are skipped.
// Keys are the CostModel and BenchmarkSpec field names; unknown keys and
// unparsable values are errors.
HarnessConfig parse_config(std::istream& in, HarnessConfig base = {});
HarnessConfig parse_config_file(const std::string& path,
                                HarnessConfig base = {});

void apply_config(const HarnessConfig& c, BenchmarkSpec& spec);

}  // namespace specvm

#endif
