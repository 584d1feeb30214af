#include "specvm/config.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace specvm {

static std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

static int64_t parse_int(const std::string& v, int line) {
  try {
    size_t pos = 0;
    int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError{"bad integer value '" + v + "'", line};
  }
}

static bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError{"bad boolean value '" + v + "'", line};
}

HarnessConfig parse_config(std::istream& in, HarnessConfig base) {
  HarnessConfig c = base;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError{"expected 'key = value'", lineNo};
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError{"expected 'key = value'", lineNo};

    if (key == "interpNodeCost") c.model.interpNodeCost = (uint64_t)parse_int(val, lineNo);
    else if (key == "compiledNodeCost") c.model.compiledNodeCost = (uint64_t)parse_int(val, lineNo);
    else if (key == "guardCost") c.model.guardCost = (uint64_t)parse_int(val, lineNo);
    else if (key == "callOverheadInterp") c.model.callOverheadInterp = (uint64_t)parse_int(val, lineNo);
    else if (key == "callOverheadCompiled") c.model.callOverheadCompiled = (uint64_t)parse_int(val, lineNo);
    else if (key == "deoptPenalty") c.model.deoptPenalty = (uint64_t)parse_int(val, lineNo);
    else if (key == "compileThreshold") c.model.compileThreshold = (uint64_t)parse_int(val, lineNo);
    else if (key == "minProfileSamples") c.model.minProfileSamples = (uint64_t)parse_int(val, lineNo);
    else if (key == "maxInlineeSize") c.model.maxInlineeSize = parse_int(val, lineNo);
    else if (key == "maxCompiledSize") c.model.maxCompiledSize = parse_int(val, lineNo);
    else if (key == "maxInlineTargets") c.model.maxInlineTargets = parse_int(val, lineNo);
    else if (key == "forks") c.forks = (int)parse_int(val, lineNo);
    else if (key == "warmupIterations") c.warmupIterations = (int)parse_int(val, lineNo);
    else if (key == "measureIterations") c.measureIterations = (int)parse_int(val, lineNo);
    else if (key == "opsPerIteration") c.opsPerIteration = parse_int(val, lineNo);
    else if (key == "withInit") c.withInit = parse_bool(val, lineNo);
    else if (key == "seed") c.seed = (uint64_t)parse_int(val, lineNo);
    else throw ConfigError{"unknown key '" + key + "'", lineNo};
  }
  return c;
}

HarnessConfig parse_config_file(const std::string& path, HarnessConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError{"cannot open config file " + path, 0};
  return parse_config(in, base);
}

void apply_config(const HarnessConfig& c, BenchmarkSpec& spec) {
  spec.model = c.model;
  spec.forks = c.forks;
  spec.warmupIterations = c.warmupIterations;
  spec.measureIterations = c.measureIterations;
  spec.opsPerIteration = c.opsPerIteration;
  spec.withInit = c.withInit;
  spec.seed = c.seed;
}

}  // namespace specvm
