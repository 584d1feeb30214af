#include "specvm/profile.hpp"

#include <algorithm>
#include <sstream>

namespace specvm {

std::optional<double> branch_probability(const ProfileStore& profiles,
                                         FunctionId fn, int32_t site) {
  const SiteProfile& sp = profiles.site(fn, site);
  if (sp.kind != SiteKind::Branch)
    throw GuestError{"site is not a branch site", fn, site};
  uint64_t total = sp.branch.samples();
  if (total == 0) return std::nullopt;
  return (double)sp.branch.takenCount / (double)total;
}

CallMorphism call_site_morphism(const ProfileStore& profiles, FunctionId fn,
                                int32_t site, const CostModel& model) {
  const SiteProfile& sp = profiles.site(fn, site);
  if (sp.kind != SiteKind::Call)
    throw GuestError{"site is not a call site", fn, site};
  const auto& counts = sp.call.countPerCalleeId;
  CallMorphism m;
  if (counts.empty()) {
    m.kind = CallMorphism::Kind::NoData;
    return m;
  }
  if ((int64_t)counts.size() > model.maxInlineTargets) {
    m.kind = CallMorphism::Kind::Megamorphic;
    return m;
  }
  std::vector<std::pair<FunctionId, uint64_t>> order(counts.begin(), counts.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  for (const auto& [id, _] : order) m.callees.push_back(id);
  m.kind = counts.size() == 1 ? CallMorphism::Kind::Monomorphic
                              : CallMorphism::Kind::Polymorphic;
  return m;
}

std::string format_profiles(const ProfileStore& profiles, const Program& p) {
  std::ostringstream os;
  for (const auto& f : p.functions) {
    const FunctionProfile& fp = profiles.fn(f.id);
    for (int32_t s = 0; s < (int32_t)fp.sites.size(); ++s) {
      const SiteProfile& sp = fp.sites[s];
      if (sp.kind == SiteKind::None) continue;
      os << f.name << "." << s;
      switch (sp.kind) {
        case SiteKind::Branch:
          os << " kind=branch taken=" << sp.branch.takenCount
             << " not_taken=" << sp.branch.notTakenCount;
          break;
        case SiteKind::Switch:
          os << " kind=switch";
          for (const auto& [cv, c] : sp.sw.entryCountPerCaseValue)
            os << " " << cv << ":" << c;
          os << " default:" << sp.sw.defaultCount;
          break;
        case SiteKind::Call:
          os << " kind=call";
          for (const auto& [id, c] : sp.call.countPerCalleeId) {
            const Function* callee = p.find(id);
            os << " " << (callee ? callee->name : std::to_string(id)) << ":" << c;
          }
          break;
        default:
          break;
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace specvm
