#include "specvm/ir.hpp"

#include <set>
#include <unordered_set>

namespace specvm {

const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "add";
    case BinOp::Sub: return "sub";
    case BinOp::Mul: return "mul";
    case BinOp::Shl: return "shl";
    case BinOp::And: return "and";
    case BinOp::CmpLt: return "lt";
    case BinOp::CmpEq: return "eq";
  }
  return "?";
}

const Function* Program::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

int64_t node_count(const Expr& e) {
  int64_t n = 1;
  for (const auto& c : e.children) n += node_count(c);
  return n;
}

bool structural_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.op != b.op || a.fallThrough != b.fallThrough ||
      a.hasDefault != b.hasDefault || a.caseValues != b.caseValues ||
      a.children.size() != b.children.size())
    return false;
  // Callee ids differ between clones; compare constants for the other kinds.
  if (a.kind != ExprKind::CallDirect && a.kind != ExprKind::FuncRef &&
      a.value != b.value)
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!structural_equal(a.children[i], b.children[i])) return false;
  return true;
}

namespace {

bool has_site(ExprKind k) {
  switch (k) {
    case ExprKind::If:
    case ExprKind::Switch:
    case ExprKind::Loop:
    case ExprKind::CallDirect:
    case ExprKind::CallIndirect:
      return true;
    default:
      return false;
  }
}

void assign_sites(Expr& e, int32_t& next) {
  if (has_site(e.kind)) e.site = next++;
  for (auto& c : e.children) assign_sites(c, next);
}

}  // namespace

void finalize_function(Function& f) {
  int32_t next = 0;
  assign_sites(f.body, next);
  f.siteCount = next;
  f.size = node_count(f.body);
}

namespace {

struct Validator {
  const Program& program;
  ValidationReport report;

  void fail(FunctionId fn, std::string rule) {
    report.violations.push_back({fn, std::move(rule)});
  }

  void check_expr(const Function& f, const Expr& e,
                  std::unordered_set<int32_t>& sites) {
    if (has_site(e.kind)) {
      if (!sites.insert(e.site).second)
        fail(f.id, "duplicate site " + std::to_string(e.site));
    }
    switch (e.kind) {
      case ExprKind::LocalGet:
      case ExprKind::LocalSet:
        if (e.value < 0 || e.value >= f.localCount)
          fail(f.id, "slot " + std::to_string(e.value) + " out of range");
        break;
      case ExprKind::Switch: {
        std::set<int64_t> seen;
        for (int64_t cv : e.caseValues)
          if (!seen.insert(cv).second)
            fail(f.id, "duplicate case " + std::to_string(cv));
        break;
      }
      case ExprKind::CallDirect: {
        const Function* callee = program.find(e.value);
        if (!callee) {
          fail(f.id, "unknown callee " + std::to_string(e.value));
        } else if ((int64_t)e.children.size() != callee->paramCount) {
          fail(f.id, "arity mismatch calling " + callee->name + ": got " +
                         std::to_string(e.children.size()) + ", want " +
                         std::to_string(callee->paramCount));
        }
        break;
      }
      case ExprKind::FuncRef:
        if (!program.find(e.value))
          fail(f.id, "unresolved funcref " + std::to_string(e.value));
        break;
      case ExprKind::Guard:
      case ExprKind::InlinedCall:
        fail(f.id, "compiled-only node in source function");
        break;
      default:
        break;
    }
    for (const auto& c : e.children) check_expr(f, c, sites);
  }
};

}  // namespace

ValidationReport validate(const Program& p) {
  Validator v{p, {}};
  std::unordered_set<std::string> names;
  std::unordered_set<int64_t> ids;
  for (size_t i = 0; i < p.functions.size(); ++i) {
    const Function& f = p.functions[i];
    if (f.id != (int64_t)i) v.fail(f.id, "function id does not match position");
    if (!ids.insert(f.id).second) v.fail(f.id, "duplicate function id");
    if (!names.insert(f.name).second)
      v.fail(f.id, "duplicate function name " + f.name);
    if (f.paramCount > f.localCount)
      v.fail(f.id, "paramCount exceeds localCount");
    if (f.size != node_count(f.body)) v.fail(f.id, "stale size field");
    std::unordered_set<int32_t> sites;
    v.check_expr(f, f.body, sites);
  }
  if (p.initFunctionId) {
    const Function* init = p.find(*p.initFunctionId);
    if (!init)
      v.fail(*p.initFunctionId, "init function does not exist");
    else if (init->paramCount != 0)
      v.fail(init->id, "init function must take no parameters");
  }
  return v.report;
}

}  // namespace specvm
