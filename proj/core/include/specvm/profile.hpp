#ifndef SPECVM_PROFILE_HPP
#define SPECVM_PROFILE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specvm/ir.hpp"

namespace specvm {

// Virtual-cycle prices and compilation thresholds. Everything here is
// overridable through the harness config file.
struct CostModel {
  uint64_t interpNodeCost = 10;
  uint64_t compiledNodeCost = 1;
  uint64_t guardCost = 1;
  uint64_t callOverheadInterp = 20;
  uint64_t callOverheadCompiled = 10;
  uint64_t deoptPenalty = 1000;
  uint64_t compileThreshold = 100;   // invocations + back-edges
  uint64_t minProfileSamples = 16;
  int64_t maxInlineeSize = 60;
  int64_t maxCompiledSize = 1200;
  int64_t maxInlineTargets = 2;
};

struct CostLedger {
  uint64_t totalCycles = 0;
  uint64_t deoptEvents = 0;
  uint64_t compileEvents = 0;
};

struct BranchProfile {
  uint64_t takenCount = 0;
  uint64_t notTakenCount = 0;
  uint64_t samples() const { return takenCount + notTakenCount; }
};

struct SwitchProfile {
  // Ordered map keeps profile dumps and compilation decisions deterministic.
  std::map<int64_t, uint64_t> entryCountPerCaseValue;
  uint64_t defaultCount = 0;
  uint64_t samples() const {
    uint64_t n = defaultCount;
    for (const auto& [_, c] : entryCountPerCaseValue) n += c;
    return n;
  }
};

struct CallTargetProfile {
  std::map<FunctionId, uint64_t> countPerCalleeId;
  uint64_t samples() const {
    uint64_t n = 0;
    for (const auto& [_, c] : countPerCalleeId) n += c;
    return n;
  }
};

enum class SiteKind : uint8_t { None, Branch, Switch, Call };

struct SiteProfile {
  SiteKind kind = SiteKind::None;
  BranchProfile branch;
  SwitchProfile sw;
  CallTargetProfile call;
};

struct FunctionProfile {
  uint64_t invocationCount = 0;
  uint64_t backEdgeCount = 0;
  std::vector<SiteProfile> sites;
};

class ProfileStore {
 public:
  explicit ProfileStore(const Program& p) {
    functions_.resize(p.functions.size());
    for (size_t i = 0; i < p.functions.size(); ++i)
      functions_[i].sites.resize(p.functions[i].siteCount);
  }

  FunctionProfile& fn(FunctionId id) { return functions_.at(id); }
  const FunctionProfile& fn(FunctionId id) const { return functions_.at(id); }
  SiteProfile& site(FunctionId f, int32_t s) { return functions_.at(f).sites.at(s); }
  const SiteProfile& site(FunctionId f, int32_t s) const {
    return functions_.at(f).sites.at(s);
  }
  size_t functionCount() const { return functions_.size(); }

  uint64_t hotness(FunctionId id) const {
    const auto& f = functions_.at(id);
    return f.invocationCount + f.backEdgeCount;
  }

 private:
  std::vector<FunctionProfile> functions_;
};

// taken / (taken + notTaken); empty when the site has no samples.
// Throws GuestError for a site that is not a branch site.
std::optional<double> branch_probability(const ProfileStore& profiles,
                                         FunctionId fn, int32_t site);

struct CallMorphism {
  enum class Kind { NoData, Monomorphic, Polymorphic, Megamorphic };
  Kind kind = Kind::NoData;
  // Distinct callees in descending observed frequency (ties by id).
  // Populated for Monomorphic and Polymorphic.
  std::vector<FunctionId> callees;
};

CallMorphism call_site_morphism(const ProfileStore& profiles, FunctionId fn,
                                int32_t site, const CostModel& model);

// Debug dump: one `<fn>.<site> kind=... <histogram>` line per profiled site,
// ordered by (function id, site id).
std::string format_profiles(const ProfileStore& profiles, const Program& p);

}  // namespace specvm

#endif
