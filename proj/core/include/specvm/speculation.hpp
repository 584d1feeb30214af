#ifndef SPECVM_SPECULATION_HPP
#define SPECVM_SPECULATION_HPP

#include <set>
#include <tuple>
#include <vector>

#include "specvm/ir.hpp"

namespace specvm {

enum class SpeculationKind : uint8_t {
  BranchAlwaysTaken,
  BranchNeverTaken,
  SwitchSingleCase,
  SwitchPrunedCases,
  CalleeIs,
};

const char* speculation_kind_name(SpeculationKind k);

// An assumption baked into compiled code, protected by a Guard node.
struct Speculation {
  int32_t guardId = -1;
  FunctionId function = -1;
  int32_t site = -1;
  SpeculationKind kind = SpeculationKind::BranchAlwaysTaken;
  int64_t caseValue = 0;               // SwitchSingleCase
  std::vector<int64_t> values;         // retained entry cases / callee ids
  bool allowDefault = false;           // SwitchPrunedCases: default observed
  std::vector<int64_t> originalCases;  // SwitchPrunedCases: full case set
};

struct CompiledMethod {
  FunctionId sourceFunctionId = -1;
  int version = 0;
  Expr body;
  std::vector<Speculation> speculations;
  int64_t codeSize = 0;
  std::vector<FunctionId> inlinedFunctions;
  int paramCount = 0;
  int localCount = 0;
};

int64_t code_size(const CompiledMethod& m);

// (function, site, kind) triples disabled for future compilations. Entries
// are only ever added within one VM lifetime.
class AssumptionBlacklist {
 public:
  void add(FunctionId fn, int32_t site, SpeculationKind kind) {
    entries_.insert({fn, site, kind});
  }
  bool contains(FunctionId fn, int32_t site, SpeculationKind kind) const {
    return entries_.count({fn, site, kind}) > 0;
  }
  size_t size() const { return entries_.size(); }

 private:
  std::set<std::tuple<FunctionId, int32_t, SpeculationKind>> entries_;
};

}  // namespace specvm

#endif
