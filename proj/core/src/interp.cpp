#include "specvm/interp.hpp"

namespace specvm {

Value interpret(const Program& program, FunctionId fn, std::vector<Value> args,
                ProfileStore& profiles, CostLedger& ledger,
                const CostModel& model) {
  const Function* f = program.find(fn);
  if (!f) throw GuestError{"unknown function " + std::to_string(fn), fn, -1};
  ++profiles.fn(fn).invocationCount;
  ExecPrices prices{model.interpNodeCost, model.callOverheadInterp,
                    model.guardCost};
  Evaluator ev(program, ledger, prices, &profiles, nullptr,
               [&](FunctionId callee, std::vector<Value>&& cargs) {
                 return interpret(program, callee, std::move(cargs), profiles,
                                  ledger, model);
               });
  return ev.run(fn, f->body, f->paramCount, f->localCount, std::move(args));
}

int64_t poly_hash_oracle(const ByteArray& bytes) {
  uint32_t h = 0;
  for (int8_t b : bytes) h = 31u * h + (uint32_t)(int32_t)b;
  return (int64_t)(int32_t)h;
}

}  // namespace specvm
