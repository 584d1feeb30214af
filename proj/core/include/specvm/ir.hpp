#ifndef SPECVM_IR_HPP
#define SPECVM_IR_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace specvm {

using FunctionId = int64_t;
using ByteArray = std::vector<int8_t>;

// Runtime value of the guest language. ByteArray payloads have Java-like
// reference semantics: copies of a Value alias the same storage.
struct Value {
  enum class Kind : uint8_t { Int, Bytes, Func };

  Kind kind = Kind::Int;
  int64_t i = 0;
  std::shared_ptr<ByteArray> bytes;

  static Value from_int(int64_t v) { return Value{Kind::Int, v, nullptr}; }
  static Value from_bytes(std::shared_ptr<ByteArray> b) {
    return Value{Kind::Bytes, 0, std::move(b)};
  }
  static Value from_bytes(ByteArray b) {
    return Value{Kind::Bytes, 0, std::make_shared<ByteArray>(std::move(b))};
  }
  static Value from_func(FunctionId f) { return Value{Kind::Func, f, nullptr}; }

  bool is_int() const { return kind == Kind::Int; }
  bool is_bytes() const { return kind == Kind::Bytes; }
  bool is_func() const { return kind == Kind::Func; }
  bool truthy() const { return kind != Kind::Int || i != 0; }
};

enum class BinOp : uint8_t { Add, Sub, Mul, Shl, And, CmpLt, CmpEq };

const char* binop_name(BinOp op);

enum class ExprKind : uint8_t {
  ConstInt,
  LocalGet,
  LocalSet,
  ArrayLen,
  ArrayGet,
  ArraySet,
  ArrayNew,
  Bin,
  Seq,
  If,
  Switch,
  Loop,
  CallDirect,
  CallIndirect,
  FuncRef,
  Return,
  // Compiled-code-only nodes, produced by the optimizer. They never appear
  // in source functions, the textual format, or validated programs.
  Guard,
  InlinedCall,
};

// Expression tree node. Child layout by kind:
//   LocalSet      [rhs]                        value = slot
//   ArrayLen      [arr]
//   ArrayGet      [arr, index]
//   ArraySet      [arr, index, val]
//   ArrayNew      [len]
//   Bin           [lhs, rhs]                   op
//   Seq           [e...]
//   If            [cond, then, else]           site
//   Switch        [scrutinee, arm..., default?]  site, caseValues (one per
//                 arm), testedValues (entry cases checked at dispatch; equals
//                 caseValues for source switches), fallThrough, hasDefault
//   Loop          [cond, body]                 site
//   CallDirect    [arg...]                     value = callee id, site
//   CallIndirect  [callee, arg...]             site
//   Return        [e]
//   Guard         [operand]                    guardId, site
//   InlinedCall   direct:   [arg..., body]
//                 indirect: [callee, arg..., body...]   ints = callee ids
//                 value = arg count, site, guardId (-1 when unguarded)
struct Expr {
  ExprKind kind = ExprKind::ConstInt;
  BinOp op = BinOp::Add;
  int64_t value = 0;
  int32_t site = -1;
  int32_t guardId = -1;
  bool fallThrough = false;
  bool hasDefault = false;
  std::vector<int64_t> caseValues;
  std::vector<int64_t> testedValues;
  std::vector<int64_t> ints;
  std::vector<Expr> children;
};

struct Function {
  FunctionId id = -1;
  std::string name;
  int paramCount = 0;
  int localCount = 0;
  Expr body;
  int64_t size = 0;   // node count of body, maintained by finalize_function
  int32_t siteCount = 0;
};

struct Program {
  std::vector<Function> functions;
  std::optional<FunctionId> initFunctionId;

  const Function* find(FunctionId id) const {
    return id >= 0 && id < (int64_t)functions.size() ? &functions[id] : nullptr;
  }
  const Function* find(const std::string& name) const;
};

int64_t node_count(const Expr& e);

// Structural equality ignoring function ids (FuncRef/CallDirect callees are
// compared through the supplied id maps so clones compare equal).
bool structural_equal(const Expr& a, const Expr& b);

// Assigns site ids in preorder over If/Switch/Loop/Call nodes and recomputes
// size/siteCount. Every builder and the parser call this exactly once.
void finalize_function(Function& f);

struct Violation {
  FunctionId function = -1;
  std::string rule;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Program& p);

// Guest runtime failure (bad index, bad callee, arity mismatch). Aborts the
// current run with a diagnostic naming the function and site.
struct GuestError {
  std::string message;
  FunctionId function = -1;
  int32_t site = -1;
};

}  // namespace specvm

#endif
