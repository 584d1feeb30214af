#ifndef SPECVM_BUILDERS_HPP
#define SPECVM_BUILDERS_HPP

#include <initializer_list>

#include "specvm/ir.hpp"

namespace specvm {

// Terse constructors for hand-built guest functions. Site ids are assigned
// later by finalize_function, so these can be combined freely.
namespace build {

Expr cst(int64_t v);
Expr get(int64_t slot);
Expr set(int64_t slot, Expr rhs);
Expr len(Expr arr);
Expr aget(Expr arr, Expr index);
Expr aset(Expr arr, Expr index, Expr val);
Expr anew(Expr length);
Expr bin(BinOp op, Expr lhs, Expr rhs);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr shl(Expr a, Expr b);
Expr band(Expr a, Expr b);
Expr lt(Expr a, Expr b);
Expr eq(Expr a, Expr b);
Expr seq(std::vector<Expr> exprs);
Expr ifx(Expr cond, Expr thenB, Expr elseB);
Expr loop(Expr cond, Expr body);
Expr call(FunctionId callee, std::vector<Expr> args);
Expr calli(Expr callee, std::vector<Expr> args);
Expr fref(FunctionId f);
Expr ret(Expr e);

struct Arm {
  int64_t caseValue;
  Expr body;
};
Expr swtch(Expr scrutinee, std::vector<Arm> arms, Expr defaultBody,
           bool fallThrough);
Expr swtch_nodefault(Expr scrutinee, std::vector<Arm> arms, bool fallThrough);

// h' = 31*h + b reduced to a signed 32-bit value, written into slot `dst`
// using `tmp` as scratch. Matches Java int overflow semantics on a 64-bit Int.
Expr hash_step(int64_t dst, int64_t tmp, Expr h, Expr byteExpr);

Function function(std::string name, int paramCount, int localCount, Expr body);

}  // namespace build

// Fig-style baseline: one loop accumulating 31*h + b per element.
// Signature: (bytes) -> int32 hash, sign-extended.
Function build_hash_baseline();

// Fall-through switch over the array length with arms for 32..0 and the
// baseline loop as default. Equivalent to build_hash_baseline on all inputs.
Function build_hash_ft32();

int64_t function_size(const Function& f);

}  // namespace specvm

#endif
