#include "specvm/jit.hpp"

#include <algorithm>

namespace specvm {

const char* speculation_kind_name(SpeculationKind k) {
  switch (k) {
    case SpeculationKind::BranchAlwaysTaken: return "branch-always";
    case SpeculationKind::BranchNeverTaken: return "branch-never";
    case SpeculationKind::SwitchSingleCase: return "switch-single";
    case SpeculationKind::SwitchPrunedCases: return "switch-pruned";
    case SpeculationKind::CalleeIs: return "callee-is";
  }
  return "?";
}

int64_t code_size(const CompiledMethod& m) { return node_count(m.body); }

namespace {

bool always_returns(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Return:
      return true;
    case ExprKind::Seq:
      for (const auto& c : e.children)
        if (always_returns(c)) return true;
      return false;
    case ExprKind::If:
      return always_returns(e.children[1]) && always_returns(e.children[2]);
    default:
      return false;
  }
}

class Compiler {
 public:
  Compiler(const Program& program, const Function& fn,
           const ProfileStore& profiles, const AssumptionBlacklist& blacklist,
           const CostModel& model)
      : program_(program),
        fn_(fn),
        profiles_(profiles),
        blacklist_(blacklist),
        model_(model) {}

  CompiledMethod run(int version) {
    CompiledMethod m;
    m.sourceFunctionId = fn_.id;
    m.version = version;
    m.paramCount = fn_.paramCount;
    m.localCount = fn_.localCount;
    m.body = transform(fn_.body);
    m.speculations = std::move(specs_);
    m.inlinedFunctions = std::move(inlined_);
    m.codeSize = node_count(m.body);
    return m;
  }

 private:
  Expr transform(const Expr& e) {
    switch (e.kind) {
      case ExprKind::If:
        return transform_if(e);
      case ExprKind::Switch:
        return transform_switch(e);
      case ExprKind::CallDirect:
        return transform_call_direct(e);
      case ExprKind::CallIndirect:
        return transform_call_indirect(e);
      default: {
        Expr out = e;
        out.children.clear();
        out.children.reserve(e.children.size());
        for (const auto& c : e.children) out.children.push_back(transform(c));
        return out;
      }
    }
  }

  Expr generic(const Expr& e) {
    Expr out = e;
    out.children.clear();
    out.children.reserve(e.children.size());
    for (const auto& c : e.children) out.children.push_back(transform(c));
    return out;
  }

  Expr make_guard(SpeculationKind kind, int32_t site, Expr operand) {
    Speculation s;
    s.guardId = (int32_t)specs_.size();
    s.function = fn_.id;
    s.site = site;
    s.kind = kind;
    specs_.push_back(std::move(s));
    Expr g;
    g.kind = ExprKind::Guard;
    g.guardId = specs_.back().guardId;
    g.site = site;
    g.children.push_back(std::move(operand));
    return g;
  }

  Expr transform_if(const Expr& e) {
    const SiteProfile& sp = profiles_.site(fn_.id, e.site);
    if (sp.kind == SiteKind::Branch &&
        sp.branch.samples() >= model_.minProfileSamples) {
      bool oneSidedTaken = sp.branch.notTakenCount == 0;
      bool oneSidedNotTaken = sp.branch.takenCount == 0;
      SpeculationKind kind = oneSidedTaken ? SpeculationKind::BranchAlwaysTaken
                                           : SpeculationKind::BranchNeverTaken;
      if ((oneSidedTaken || oneSidedNotTaken) &&
          !blacklist_.contains(fn_.id, e.site, kind)) {
        Expr g = make_guard(kind, e.site, transform(e.children[0]));
        Expr survivor = transform(e.children[oneSidedTaken ? 1 : 2]);
        Expr out;
        out.kind = ExprKind::Seq;
        out.children.push_back(std::move(g));
        out.children.push_back(std::move(survivor));
        return out;
      }
    }
    return generic(e);
  }

  Expr transform_switch(const Expr& e) {
    const SiteProfile& sp = profiles_.site(fn_.id, e.site);
    size_t armCount = e.caseValues.size();
    if (sp.kind != SiteKind::Switch ||
        sp.sw.samples() < model_.minProfileSamples || armCount == 0)
      return generic(e);

    std::vector<int64_t> observed;  // declared arm order
    for (int64_t cv : e.caseValues) {
      auto it = sp.sw.entryCountPerCaseValue.find(cv);
      if (it != sp.sw.entryCountPerCaseValue.end() && it->second > 0)
        observed.push_back(cv);
    }
    bool defaultObserved = sp.sw.defaultCount > 0;

    if (observed.size() == 1 && !defaultObserved &&
        !blacklist_.contains(fn_.id, e.site, SpeculationKind::SwitchSingleCase)) {
      int64_t cv = observed[0];
      Expr g = make_guard(SpeculationKind::SwitchSingleCase, e.site,
                          transform(e.children[0]));
      specs_.back().caseValue = cv;
      size_t armIdx = 0;
      while (e.caseValues[armIdx] != cv) ++armIdx;
      Expr out;
      out.kind = ExprKind::Seq;
      out.children.push_back(std::move(g));
      if (!e.fallThrough) {
        out.children.push_back(transform(e.children[1 + armIdx]));
      } else {
        // Straight-line expansion: matched arm plus everything it falls
        // through into, cut after the first body that must return.
        for (size_t j = armIdx; j < armCount; ++j) {
          out.children.push_back(transform(e.children[1 + j]));
          if (always_returns(e.children[1 + j])) break;
        }
      }
      return out;
    }

    bool fullyGeneric = observed.size() == armCount && defaultObserved;
    if (!fullyGeneric && !observed.empty() &&
        !blacklist_.contains(fn_.id, e.site,
                             SpeculationKind::SwitchPrunedCases)) {
      Expr g = make_guard(SpeculationKind::SwitchPrunedCases, e.site,
                          transform(e.children[0]));
      specs_.back().values = observed;
      specs_.back().allowDefault = defaultObserved;
      specs_.back().originalCases = e.caseValues;

      Expr sw = e;
      sw.children.clear();
      sw.caseValues.clear();
      sw.testedValues = observed;
      sw.hasDefault = defaultObserved;
      sw.children.push_back(transform(e.children[0]));
      if (e.fallThrough) {
        // Keep the fall-through chain from the first retained entry onward.
        size_t first = 0;
        while (e.caseValues[first] != observed[0]) ++first;
        for (size_t j = first; j < armCount; ++j) {
          sw.caseValues.push_back(e.caseValues[j]);
          sw.children.push_back(transform(e.children[1 + j]));
        }
      } else {
        for (size_t j = 0; j < armCount; ++j) {
          if (std::find(observed.begin(), observed.end(), e.caseValues[j]) ==
              observed.end())
            continue;
          sw.caseValues.push_back(e.caseValues[j]);
          sw.children.push_back(transform(e.children[1 + j]));
        }
      }
      if (defaultObserved) sw.children.push_back(transform(e.children.back()));

      Expr out;
      out.kind = ExprKind::Seq;
      out.children.push_back(std::move(g));
      out.children.push_back(std::move(sw));
      return out;
    }
    // Also handles the prune-everything shape (only the default observed):
    // observed.empty() falls through to here only when no arm was entered,
    // in which case pruning all arms still needs the guard.
    if (!fullyGeneric && observed.empty() && defaultObserved &&
        !blacklist_.contains(fn_.id, e.site,
                             SpeculationKind::SwitchPrunedCases)) {
      Expr g = make_guard(SpeculationKind::SwitchPrunedCases, e.site,
                          transform(e.children[0]));
      specs_.back().allowDefault = true;
      specs_.back().originalCases = e.caseValues;
      Expr out;
      out.kind = ExprKind::Seq;
      out.children.push_back(std::move(g));
      out.children.push_back(transform(e.children.back()));
      return out;
    }
    return generic(e);
  }

  bool inline_fits(const Function& callee) {
    if (callee.size > model_.maxInlineeSize) return false;
    return fn_.size + inlineUsed_ + callee.size <= model_.maxCompiledSize;
  }

  void note_inlined(FunctionId id, int64_t size) {
    inlineUsed_ += size;
    if (std::find(inlined_.begin(), inlined_.end(), id) == inlined_.end())
      inlined_.push_back(id);
  }

  Expr transform_call_direct(const Expr& e) {
    const Function* callee = program_.find(e.value);
    if (callee && inline_fits(*callee)) {
      Expr out;
      out.kind = ExprKind::InlinedCall;
      out.site = e.site;
      out.value = (int64_t)e.children.size();
      out.ints = {callee->id};
      for (const auto& a : e.children) out.children.push_back(transform(a));
      out.children.push_back(callee->body);  // embedded generically
      note_inlined(callee->id, callee->size);
      return out;
    }
    return generic(e);
  }

  Expr transform_call_indirect(const Expr& e) {
    const SiteProfile& sp = profiles_.site(fn_.id, e.site);
    if (sp.kind == SiteKind::Call &&
        sp.call.samples() >= model_.minProfileSamples &&
        !blacklist_.contains(fn_.id, e.site, SpeculationKind::CalleeIs)) {
      CallMorphism m = call_site_morphism(profiles_, fn_.id, e.site, model_);
      if (m.kind == CallMorphism::Kind::Monomorphic ||
          m.kind == CallMorphism::Kind::Polymorphic) {
        std::vector<const Function*> callees;
        int64_t total = 0;
        bool ok = true;
        for (FunctionId id : m.callees) {
          const Function* c = program_.find(id);
          if (!c || c->size > model_.maxInlineeSize) {
            ok = false;
            break;
          }
          callees.push_back(c);
          total += c->size;
        }
        if (ok && fn_.size + inlineUsed_ + total <= model_.maxCompiledSize) {
          Speculation s;
          s.guardId = (int32_t)specs_.size();
          s.function = fn_.id;
          s.site = e.site;
          s.kind = SpeculationKind::CalleeIs;
          for (FunctionId id : m.callees) s.values.push_back(id);
          specs_.push_back(std::move(s));

          Expr out;
          out.kind = ExprKind::InlinedCall;
          out.site = e.site;
          out.guardId = specs_.back().guardId;
          out.value = (int64_t)e.children.size() - 1;
          out.ints = m.callees;
          for (const auto& c : e.children) out.children.push_back(transform(c));
          for (const Function* c : callees) {
            out.children.push_back(c->body);
            note_inlined(c->id, c->size);
          }
          return out;
        }
      }
    }
    return generic(e);
  }

  const Program& program_;
  const Function& fn_;
  const ProfileStore& profiles_;
  const AssumptionBlacklist& blacklist_;
  const CostModel& model_;
  std::vector<Speculation> specs_;
  std::vector<FunctionId> inlined_;
  int64_t inlineUsed_ = 0;
};

Value interpret_unprofiled(const Program& program, FunctionId fn,
                           std::vector<Value> args, CostLedger& ledger,
                           const CostModel& model) {
  const Function* f = program.find(fn);
  if (!f) throw GuestError{"unknown function " + std::to_string(fn), fn, -1};
  ExecPrices prices{model.interpNodeCost, model.callOverheadInterp,
                    model.guardCost};
  Evaluator ev(program, ledger, prices, nullptr, nullptr,
               [&](FunctionId callee, std::vector<Value>&& cargs) {
                 return interpret_unprofiled(program, callee, std::move(cargs),
                                             ledger, model);
               });
  return ev.run(fn, f->body, f->paramCount, f->localCount, std::move(args));
}

}  // namespace

CompiledMethod compile(const Program& program, FunctionId fn,
                       const ProfileStore& profiles,
                       const AssumptionBlacklist& blacklist,
                       const CostModel& model, int version) {
  const Function* f = program.find(fn);
  if (!f) throw GuestError{"unknown function " + std::to_string(fn), fn, -1};
  Compiler c(program, *f, profiles, blacklist, model);
  return c.run(version);
}

CompiledResult execute_compiled(const Program& program,
                                const CompiledMethod& method,
                                std::vector<Value> args, CostLedger& ledger,
                                const CostModel& model, CallHook hook) {
  ExecPrices prices{model.compiledNodeCost, model.callOverheadCompiled,
                    model.guardCost};
  if (!hook) {
    hook = [&program, &ledger, &model](FunctionId callee,
                                       std::vector<Value>&& cargs) {
      return interpret_unprofiled(program, callee, std::move(cargs), ledger,
                                  model);
    };
  }
  Evaluator ev(program, ledger, prices, nullptr, &method.speculations,
               std::move(hook));
  try {
    return ev.run(method.sourceFunctionId, method.body, method.paramCount,
                  method.localCount, std::move(args));
  } catch (const DeoptSignal& d) {
    return DeoptRequest{d.guardId, d.site};
  }
}

}  // namespace specvm
