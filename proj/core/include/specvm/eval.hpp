#ifndef SPECVM_EVAL_HPP
#define SPECVM_EVAL_HPP

#include <functional>

#include "specvm/ir.hpp"
#include "specvm/profile.hpp"
#include "specvm/speculation.hpp"

namespace specvm {

// Thrown by a failing Guard; caught by the runtime, never by guest code.
struct DeoptSignal {
  int32_t guardId;
  int32_t site;
};

// Virtual-cycle prices for one execution tier.
struct ExecPrices {
  uint64_t node = 1;
  uint64_t call = 0;
  uint64_t guard = 0;
};

// Structural charging constants shared by both tiers. A switch is priced as a
// naive eq-chain lowering: every tested arm costs a scrutinee reload, a
// constant, a compare, and a conditional branch; falling through into the
// next arm costs one jump. A two-way branch costs a test plus a jump, while a
// guard collapses to a single trapping check (its price is CostModel.guardCost).
inline constexpr uint64_t kSwitchArmTestNodes = 5;
inline constexpr uint64_t kSwitchFallThroughNodes = 1;
inline constexpr uint64_t kBranchNodes = 2;

// How outgoing calls are performed; lets interpreted frames call into
// compiled callees (and back) through the runtime's tier dispatch.
using CallHook = std::function<Value(FunctionId, std::vector<Value>&&)>;

class Evaluator {
 public:
  // profiles == nullptr disables profile recording (compiled tier).
  // speculations backs Guard/InlinedCall nodes; null for source IR.
  Evaluator(const Program& program, CostLedger& ledger, ExecPrices prices,
            ProfileStore* profiles, const std::vector<Speculation>* speculations,
            CallHook hook)
      : program_(program),
        ledger_(ledger),
        prices_(prices),
        profiles_(profiles),
        speculations_(speculations),
        hook_(std::move(hook)) {}

  // Runs `body` in a fresh frame of `localCount` locals with `args` in the
  // first slots. `owner` names the function for diagnostics and profiling.
  Value run(FunctionId owner, const Expr& body, int paramCount, int localCount,
            std::vector<Value> args);

 private:
  struct Frame {
    FunctionId fn;
    std::vector<Value> locals;
    Value retval;
    bool returned = false;
  };

  Value eval(const Expr& e, Frame& f);
  Value eval_switch(const Expr& e, Frame& f);
  Value eval_guard(const Expr& e, Frame& f);
  Value eval_inlined(const Expr& e, Frame& f);
  Value call_function(FunctionId callee, std::vector<Value>&& args, Frame& f,
                      int32_t site);

  void charge(uint64_t nodes) { ledger_.totalCycles += nodes * prices_.node; }
  int64_t as_int(const Value& v, const Frame& f, const char* what) const;
  const ByteArray& as_bytes(const Value& v, const Frame& f, const char* what) const;

  const Program& program_;
  CostLedger& ledger_;
  ExecPrices prices_;
  ProfileStore* profiles_;
  const std::vector<Speculation>* speculations_;
  CallHook hook_;
};

}  // namespace specvm

#endif
