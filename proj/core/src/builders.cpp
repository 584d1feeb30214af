#include "specvm/builders.hpp"

#include <utility>

namespace specvm {
namespace build {

namespace {
Expr node(ExprKind k, std::vector<Expr> children = {}) {
  Expr e;
  e.kind = k;
  e.children = std::move(children);
  return e;
}
}  // namespace

Expr cst(int64_t v) {
  Expr e = node(ExprKind::ConstInt);
  e.value = v;
  return e;
}

Expr get(int64_t slot) {
  Expr e = node(ExprKind::LocalGet);
  e.value = slot;
  return e;
}

Expr set(int64_t slot, Expr rhs) {
  Expr e = node(ExprKind::LocalSet, {std::move(rhs)});
  e.value = slot;
  return e;
}

Expr len(Expr arr) { return node(ExprKind::ArrayLen, {std::move(arr)}); }

Expr aget(Expr arr, Expr index) {
  return node(ExprKind::ArrayGet, {std::move(arr), std::move(index)});
}

Expr aset(Expr arr, Expr index, Expr val) {
  return node(ExprKind::ArraySet,
              {std::move(arr), std::move(index), std::move(val)});
}

Expr anew(Expr length) { return node(ExprKind::ArrayNew, {std::move(length)}); }

Expr bin(BinOp op, Expr lhs, Expr rhs) {
  Expr e = node(ExprKind::Bin, {std::move(lhs), std::move(rhs)});
  e.op = op;
  return e;
}

Expr add(Expr a, Expr b) { return bin(BinOp::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return bin(BinOp::Sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return bin(BinOp::Mul, std::move(a), std::move(b)); }
Expr shl(Expr a, Expr b) { return bin(BinOp::Shl, std::move(a), std::move(b)); }
Expr band(Expr a, Expr b) { return bin(BinOp::And, std::move(a), std::move(b)); }
Expr lt(Expr a, Expr b) { return bin(BinOp::CmpLt, std::move(a), std::move(b)); }
Expr eq(Expr a, Expr b) { return bin(BinOp::CmpEq, std::move(a), std::move(b)); }

Expr seq(std::vector<Expr> exprs) { return node(ExprKind::Seq, std::move(exprs)); }

Expr ifx(Expr cond, Expr thenB, Expr elseB) {
  return node(ExprKind::If,
              {std::move(cond), std::move(thenB), std::move(elseB)});
}

Expr loop(Expr cond, Expr body) {
  return node(ExprKind::Loop, {std::move(cond), std::move(body)});
}

Expr call(FunctionId callee, std::vector<Expr> args) {
  Expr e = node(ExprKind::CallDirect, std::move(args));
  e.value = callee;
  return e;
}

Expr calli(Expr callee, std::vector<Expr> args) {
  std::vector<Expr> children;
  children.reserve(args.size() + 1);
  children.push_back(std::move(callee));
  for (auto& a : args) children.push_back(std::move(a));
  return node(ExprKind::CallIndirect, std::move(children));
}

Expr fref(FunctionId f) {
  Expr e = node(ExprKind::FuncRef);
  e.value = f;
  return e;
}

Expr ret(Expr e) { return node(ExprKind::Return, {std::move(e)}); }

Expr swtch(Expr scrutinee, std::vector<Arm> arms, Expr defaultBody,
           bool fallThrough) {
  Expr e = node(ExprKind::Switch);
  e.fallThrough = fallThrough;
  e.hasDefault = true;
  e.children.push_back(std::move(scrutinee));
  for (auto& a : arms) {
    e.caseValues.push_back(a.caseValue);
    e.children.push_back(std::move(a.body));
  }
  e.children.push_back(std::move(defaultBody));
  e.testedValues = e.caseValues;
  return e;
}

Expr swtch_nodefault(Expr scrutinee, std::vector<Arm> arms, bool fallThrough) {
  Expr e = node(ExprKind::Switch);
  e.fallThrough = fallThrough;
  e.hasDefault = false;
  e.children.push_back(std::move(scrutinee));
  for (auto& a : arms) {
    e.caseValues.push_back(a.caseValue);
    e.children.push_back(std::move(a.body));
  }
  e.testedValues = e.caseValues;
  return e;
}

Expr hash_step(int64_t dst, int64_t tmp, Expr h, Expr byteExpr) {
  // t = 31*h + b; h = (t & 0xffffffff) - ((t & 0x80000000) << 1)
  return seq({
      set(tmp, add(mul(cst(31), std::move(h)), std::move(byteExpr))),
      set(dst, sub(band(get(tmp), cst(0xffffffffLL)),
                   shl(band(get(tmp), cst(0x80000000LL)), cst(1)))),
  });
}

Function function(std::string name, int paramCount, int localCount, Expr body) {
  Function f;
  f.name = std::move(name);
  f.paramCount = paramCount;
  f.localCount = localCount;
  f.body = std::move(body);
  finalize_function(f);
  return f;
}

}  // namespace build

using namespace build;

namespace {

// locals: 0 = input array, 1 = h, 2 = i, 3 = n, 4 = scratch
Expr hash_loop_body() {
  return seq({
      set(3, len(get(0))),
      loop(lt(get(2), get(3)),
           seq({
               hash_step(1, 4, get(1), aget(get(0), get(2))),
               set(2, add(get(2), cst(1))),
           })),
      ret(get(1)),
  });
}

}  // namespace

Function build_hash_baseline() {
  Expr body = seq({
      set(1, cst(0)),
      set(2, cst(0)),
      hash_loop_body(),
  });
  return function("hash_baseline", 1, 5, std::move(body));
}

Function build_hash_ft32() {
  std::vector<Arm> arms;
  for (int k = 32; k >= 2; --k) {
    arms.push_back({k, seq({
                           hash_step(1, 4, get(1), aget(get(0), get(2))),
                           set(2, add(get(2), cst(1))),
                       })});
  }
  arms.push_back({1, seq({
                         hash_step(1, 4, get(1), aget(get(0), get(2))),
                         ret(get(1)),
                     })});
  arms.push_back({0, ret(cst(0))});
  Expr body = seq({
      set(1, cst(0)),
      set(2, cst(0)),
      swtch(len(get(0)), std::move(arms), hash_loop_body(), true),
  });
  return function("hash_ft32", 1, 5, std::move(body));
}

int64_t function_size(const Function& f) { return node_count(f.body); }

}  // namespace specvm
