#include "specvm/eval.hpp"

namespace specvm {

int64_t Evaluator::as_int(const Value& v, const Frame& f, const char* what) const {
  if (!v.is_int())
    throw GuestError{std::string(what) + ": integer expected", f.fn, -1};
  return v.i;
}

const ByteArray& Evaluator::as_bytes(const Value& v, const Frame& f,
                                     const char* what) const {
  if (!v.is_bytes() || !v.bytes)
    throw GuestError{std::string(what) + ": byte array expected", f.fn, -1};
  return *v.bytes;
}

Value Evaluator::run(FunctionId owner, const Expr& body, int paramCount,
                     int localCount, std::vector<Value> args) {
  if ((int)args.size() != paramCount)
    throw GuestError{"arity mismatch: got " + std::to_string(args.size()) +
                         " args, want " + std::to_string(paramCount),
                     owner, -1};
  Frame f;
  f.fn = owner;
  f.locals.resize(localCount);
  for (size_t i = 0; i < args.size(); ++i) f.locals[i] = std::move(args[i]);
  Value v = eval(body, f);
  return f.returned ? f.retval : v;
}

Value Evaluator::call_function(FunctionId callee, std::vector<Value>&& args,
                               Frame& f, int32_t site) {
  ledger_.totalCycles += prices_.call;
  if (!hook_)
    throw GuestError{"call with no dispatcher installed", f.fn, site};
  return hook_(callee, std::move(args));
}

Value Evaluator::eval_switch(const Expr& e, Frame& f) {
  charge(1);
  Value sv = eval(e.children[0], f);
  if (f.returned) return sv;
  int64_t v = as_int(sv, f, "switch scrutinee");

  size_t armCount = e.caseValues.size();
  int64_t matched = -1;
  uint64_t tested = 0;
  for (int64_t tv : e.testedValues) {
    ++tested;
    if (tv == v) {
      matched = tv;
      break;
    }
  }
  charge(tested * kSwitchArmTestNodes);

  if (profiles_) {
    SiteProfile& sp = profiles_->site(f.fn, e.site);
    sp.kind = SiteKind::Switch;
    if (matched >= 0)
      ++sp.sw.entryCountPerCaseValue[matched];
    else
      ++sp.sw.defaultCount;
  }

  if (matched < 0) {
    if (!e.hasDefault)
      throw GuestError{"switch has no arm for " + std::to_string(v), f.fn, e.site};
    return eval(e.children[1 + armCount], f);
  }

  size_t armIdx = 0;
  while (armIdx < armCount && e.caseValues[armIdx] != matched) ++armIdx;

  if (!e.fallThrough) return eval(e.children[1 + armIdx], f);

  Value last = Value::from_int(0);
  for (size_t j = armIdx; j < armCount; ++j) {
    if (j > armIdx) charge(kSwitchFallThroughNodes);
    last = eval(e.children[1 + j], f);
    if (f.returned) return last;
  }
  return last;
}

Value Evaluator::eval_guard(const Expr& e, Frame& f) {
  ledger_.totalCycles += prices_.guard;
  Value v = eval(e.children[0], f);
  if (f.returned) return v;
  const Speculation& spec = (*speculations_)[e.guardId];
  bool ok = false;
  switch (spec.kind) {
    case SpeculationKind::BranchAlwaysTaken:
      ok = v.truthy();
      break;
    case SpeculationKind::BranchNeverTaken:
      ok = !v.truthy();
      break;
    case SpeculationKind::SwitchSingleCase:
      ok = v.is_int() && v.i == spec.caseValue;
      break;
    case SpeculationKind::SwitchPrunedCases: {
      int64_t s = as_int(v, f, "guard scrutinee");
      for (int64_t r : spec.values)
        if (r == s) {
          ok = true;
          break;
        }
      if (!ok && spec.allowDefault) {
        ok = true;
        for (int64_t c : spec.originalCases)
          if (c == s) {
            ok = false;
            break;
          }
      }
      break;
    }
    case SpeculationKind::CalleeIs:
      // Handled inline in InlinedCall dispatch.
      ok = true;
      break;
  }
  if (!ok) throw DeoptSignal{e.guardId, spec.site};
  return v;
}

Value Evaluator::eval_inlined(const Expr& e, Frame& f) {
  charge(1);
  int argCount = (int)e.value;
  bool indirect = e.guardId >= 0;
  size_t argBase = indirect ? 1 : 0;

  FunctionId target = e.ints[0];
  size_t bodyIdx = argBase + argCount;
  if (indirect) {
    Value cv = eval(e.children[0], f);
    if (f.returned) return cv;
    if (!cv.is_func())
      throw GuestError{"indirect call to a non-function value", f.fn, e.site};
    bool found = false;
    for (size_t k = 0; k < e.ints.size(); ++k) {
      ledger_.totalCycles += prices_.guard;
      if (e.ints[k] == cv.i) {
        target = e.ints[k];
        bodyIdx = argBase + argCount + k;
        found = true;
        break;
      }
    }
    if (!found) throw DeoptSignal{e.guardId, e.site};
  }

  std::vector<Value> args;
  args.reserve(argCount);
  for (int i = 0; i < argCount; ++i) {
    args.push_back(eval(e.children[argBase + i], f));
    if (f.returned) return args.back();
  }

  const Function* callee = program_.find(target);
  if (!callee) throw GuestError{"unknown inlined callee", f.fn, e.site};
  // Inlined body runs in a sub-frame at the caller's prices, with no call
  // overhead charged.
  Frame sub;
  sub.fn = target;
  sub.locals.resize(callee->localCount);
  if ((int)args.size() != callee->paramCount)
    throw GuestError{"arity mismatch at inlined call", f.fn, e.site};
  for (size_t i = 0; i < args.size(); ++i) sub.locals[i] = std::move(args[i]);
  Value v = eval(e.children[bodyIdx], sub);
  return sub.returned ? sub.retval : v;
}

Value Evaluator::eval(const Expr& e, Frame& f) {
  switch (e.kind) {
    case ExprKind::ConstInt:
      charge(1);
      return Value::from_int(e.value);
    case ExprKind::LocalGet:
      charge(1);
      return f.locals[e.value];
    case ExprKind::LocalSet: {
      charge(1);
      Value v = eval(e.children[0], f);
      if (f.returned) return v;
      f.locals[e.value] = v;
      return v;
    }
    case ExprKind::ArrayLen: {
      charge(1);
      Value a = eval(e.children[0], f);
      if (f.returned) return a;
      return Value::from_int((int64_t)as_bytes(a, f, "len").size());
    }
    case ExprKind::ArrayGet: {
      charge(1);
      Value a = eval(e.children[0], f);
      if (f.returned) return a;
      Value idx = eval(e.children[1], f);
      if (f.returned) return idx;
      const ByteArray& arr = as_bytes(a, f, "aget");
      int64_t i = as_int(idx, f, "aget index");
      if (i < 0 || i >= (int64_t)arr.size())
        throw GuestError{"array index " + std::to_string(i) +
                             " out of bounds for length " +
                             std::to_string(arr.size()),
                         f.fn, -1};
      return Value::from_int(arr[i]);
    }
    case ExprKind::ArraySet: {
      charge(1);
      Value a = eval(e.children[0], f);
      if (f.returned) return a;
      Value idx = eval(e.children[1], f);
      if (f.returned) return idx;
      Value v = eval(e.children[2], f);
      if (f.returned) return v;
      const ByteArray& arr = as_bytes(a, f, "aset");
      int64_t i = as_int(idx, f, "aset index");
      if (i < 0 || i >= (int64_t)arr.size())
        throw GuestError{"array index " + std::to_string(i) +
                             " out of bounds for length " +
                             std::to_string(arr.size()),
                         f.fn, -1};
      int64_t b = as_int(v, f, "aset value");
      (*a.bytes)[i] = (int8_t)b;
      return v;
    }
    case ExprKind::ArrayNew: {
      charge(1);
      Value n = eval(e.children[0], f);
      if (f.returned) return n;
      int64_t sz = as_int(n, f, "anew length");
      if (sz < 0) throw GuestError{"negative array length", f.fn, -1};
      return Value::from_bytes(std::make_shared<ByteArray>(sz, 0));
    }
    case ExprKind::Bin: {
      charge(1);
      Value l = eval(e.children[0], f);
      if (f.returned) return l;
      Value r = eval(e.children[1], f);
      if (f.returned) return r;
      int64_t a = as_int(l, f, "binop lhs");
      int64_t b = as_int(r, f, "binop rhs");
      switch (e.op) {
        case BinOp::Add: return Value::from_int((int64_t)((uint64_t)a + (uint64_t)b));
        case BinOp::Sub: return Value::from_int((int64_t)((uint64_t)a - (uint64_t)b));
        case BinOp::Mul: return Value::from_int((int64_t)((uint64_t)a * (uint64_t)b));
        case BinOp::Shl: return Value::from_int((int64_t)((uint64_t)a << ((uint64_t)b & 63)));
        case BinOp::And: return Value::from_int(a & b);
        case BinOp::CmpLt: return Value::from_int(a < b ? 1 : 0);
        case BinOp::CmpEq: return Value::from_int(a == b ? 1 : 0);
      }
      return Value::from_int(0);
    }
    case ExprKind::Seq: {
      charge(1);
      Value last = Value::from_int(0);
      for (const auto& c : e.children) {
        last = eval(c, f);
        if (f.returned) return last;
      }
      return last;
    }
    case ExprKind::If: {
      charge(kBranchNodes);
      Value c = eval(e.children[0], f);
      if (f.returned) return c;
      bool taken = c.truthy();
      if (profiles_) {
        SiteProfile& sp = profiles_->site(f.fn, e.site);
        sp.kind = SiteKind::Branch;
        if (taken)
          ++sp.branch.takenCount;
        else
          ++sp.branch.notTakenCount;
      }
      return eval(e.children[taken ? 1 : 2], f);
    }
    case ExprKind::Switch:
      return eval_switch(e, f);
    case ExprKind::Loop: {
      Value last = Value::from_int(0);
      for (;;) {
        charge(1);
        Value c = eval(e.children[0], f);
        if (f.returned) return c;
        bool taken = c.truthy();
        if (profiles_) {
          SiteProfile& sp = profiles_->site(f.fn, e.site);
          sp.kind = SiteKind::Branch;
          if (taken) {
            ++sp.branch.takenCount;
            ++profiles_->fn(f.fn).backEdgeCount;
          } else {
            ++sp.branch.notTakenCount;
          }
        }
        if (!taken) return last;
        last = eval(e.children[1], f);
        if (f.returned) return last;
      }
    }
    case ExprKind::CallDirect: {
      charge(1);
      std::vector<Value> args;
      args.reserve(e.children.size());
      for (const auto& c : e.children) {
        args.push_back(eval(c, f));
        if (f.returned) return args.back();
      }
      if (profiles_) {
        SiteProfile& sp = profiles_->site(f.fn, e.site);
        sp.kind = SiteKind::Call;
        ++sp.call.countPerCalleeId[e.value];
      }
      return call_function(e.value, std::move(args), f, e.site);
    }
    case ExprKind::CallIndirect: {
      charge(1);
      Value callee = eval(e.children[0], f);
      if (f.returned) return callee;
      if (!callee.is_func())
        throw GuestError{"calling a non-function value", f.fn, e.site};
      std::vector<Value> args;
      args.reserve(e.children.size() - 1);
      for (size_t i = 1; i < e.children.size(); ++i) {
        args.push_back(eval(e.children[i], f));
        if (f.returned) return args.back();
      }
      if (profiles_) {
        SiteProfile& sp = profiles_->site(f.fn, e.site);
        sp.kind = SiteKind::Call;
        ++sp.call.countPerCalleeId[callee.i];
      }
      return call_function(callee.i, std::move(args), f, e.site);
    }
    case ExprKind::FuncRef:
      charge(1);
      return Value::from_func(e.value);
    case ExprKind::Return: {
      charge(1);
      Value v = eval(e.children[0], f);
      if (f.returned) return v;
      f.retval = v;
      f.returned = true;
      return v;
    }
    case ExprKind::Guard:
      return eval_guard(e, f);
    case ExprKind::InlinedCall:
      return eval_inlined(e, f);
  }
  throw GuestError{"unreachable expression kind", f.fn, -1};
}

}  // namespace specvm
