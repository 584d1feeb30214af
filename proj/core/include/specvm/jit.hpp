#ifndef SPECVM_JIT_HPP
#define SPECVM_JIT_HPP

#include <variant>

#include "specvm/eval.hpp"

namespace specvm {

// A guard failed: compiled execution stopped without completing the function.
struct DeoptRequest {
  int32_t guardId = -1;
  int32_t site = -1;
};

using CompiledResult = std::variant<Value, DeoptRequest>;

// Profile-driven speculative compilation of one function:
//   - one-sided If sites become Guard + the surviving branch,
//   - Switch sites with a single observed entry case become Guard + the
//     straight-line fall-through expansion of that arm,
//   - Switch sites with several observed entries keep only the reachable
//     arms, guarded against the pruned entry cases,
//   - mono-/polymorphic indirect call sites become guard-dispatched inlined
//     bodies, direct calls are inlined purely by size,
// all subject to minProfileSamples, the blacklist, and the size budgets.
// Hotness gating is the runtime's job; compile itself does not check it.
CompiledMethod compile(const Program& program, FunctionId fn,
                       const ProfileStore& profiles,
                       const AssumptionBlacklist& blacklist,
                       const CostModel& model, int version);

// Runs a compiled method. Charges compiledNodeCost per node, guardCost per
// guard, callOverheadCompiled per non-inlined call and nothing for inlined
// calls. Outgoing calls go through `hook`; when absent, callees are executed
// by a non-profiling interpreter.
CompiledResult execute_compiled(const Program& program,
                                const CompiledMethod& method,
                                std::vector<Value> args, CostLedger& ledger,
                                const CostModel& model, CallHook hook = {});

}  // namespace specvm

#endif
