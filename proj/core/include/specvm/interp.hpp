#ifndef SPECVM_INTERP_HPP
#define SPECVM_INTERP_HPP

#include "specvm/eval.hpp"

namespace specvm {

// Profiling interpretation of one function call. Nested calls are also
// interpreted. Charges interpNodeCost per evaluated node and
// callOverheadInterp per call; increments the callee's invocation count.
Value interpret(const Program& program, FunctionId fn, std::vector<Value> args,
                ProfileStore& profiles, CostLedger& ledger,
                const CostModel& model);

// Closed-form Eq-style polynomial rolling hash (p = 31, mod 2^32), computed
// host-side so it is independent of the guest IR path it checks.
int64_t poly_hash_oracle(const ByteArray& bytes);

}  // namespace specvm

#endif
