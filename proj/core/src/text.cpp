#include "specvm/text.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>

#include "specvm/builders.hpp"

namespace specvm {

namespace {

struct Token {
  enum class Kind { LParen, RParen, Symbol, Int, String, End };
  Kind kind;
  std::string text;
  int64_t value = 0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    char c = src_[pos_];
    if (c == '(') {
      advance();
      t.kind = Token::Kind::LParen;
      return t;
    }
    if (c == ')') {
      advance();
      t.kind = Token::Kind::RParen;
      return t;
    }
    if (c == '"') {
      advance();
      std::string s;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        s.push_back(src_[pos_]);
        advance();
      }
      if (pos_ >= src_.size()) throw ParseError{"unterminated string", t.line, t.column};
      advance();
      t.kind = Token::Kind::String;
      t.text = std::move(s);
      return t;
    }
    std::string s;
    while (pos_ < src_.size() && !std::isspace((unsigned char)src_[pos_]) &&
           src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != ';') {
      s.push_back(src_[pos_]);
      advance();
    }
    if (s.empty()) throw ParseError{"unexpected character", t.line, t.column};
    bool numeric = (s[0] == '-' && s.size() > 1) || std::isdigit((unsigned char)s[0]);
    if (numeric) {
      for (size_t i = (s[0] == '-') ? 1 : 0; i < s.size(); ++i)
        if (!std::isdigit((unsigned char)s[i])) numeric = false;
    }
    if (numeric) {
      t.kind = Token::Kind::Int;
      t.value = std::stoll(s);
    } else {
      t.kind = Token::Kind::Symbol;
      t.text = std::move(s);
    }
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace((unsigned char)c)) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Generic s-expression node, converted to IR in a second pass once all
// function names are known.
struct SNode {
  bool isList = false;
  Token atom;
  std::vector<SNode> items;
  int line = 1;
  int column = 1;
};

SNode parse_snode(Lexer& lex, Token first) {
  SNode n;
  n.line = first.line;
  n.column = first.column;
  if (first.kind == Token::Kind::LParen) {
    n.isList = true;
    for (;;) {
      Token t = lex.next();
      if (t.kind == Token::Kind::RParen) break;
      if (t.kind == Token::Kind::End)
        throw ParseError{"unbalanced parenthesis", first.line, first.column};
      n.items.push_back(parse_snode(lex, t));
    }
  } else if (first.kind == Token::Kind::RParen) {
    throw ParseError{"unbalanced parenthesis", first.line, first.column};
  } else {
    n.atom = first;
  }
  return n;
}

class Converter {
 public:
  // All function headers are parsed before any body, so direct-call arity is
  // checkable right here.
  Converter(const std::unordered_map<std::string, FunctionId>& ids,
            const std::vector<Function>& fns)
      : ids_(ids), fns_(fns) {}

  Expr expr(const SNode& n) {
    if (!n.isList || n.items.empty() || n.items[0].isList ||
        n.items[0].atom.kind != Token::Kind::Symbol)
      throw ParseError{"expected expression form", n.line, n.column};
    const std::string& head = n.items[0].atom.text;
    auto arity = [&](size_t want) {
      if (n.items.size() - 1 != want)
        throw ParseError{"'" + head + "' expects " + std::to_string(want) +
                             " operands",
                         n.line, n.column};
    };
    using namespace build;
    if (head == "const") {
      arity(1);
      return cst(int_at(n, 1));
    }
    if (head == "get") {
      arity(1);
      return get(int_at(n, 1));
    }
    if (head == "set") {
      arity(2);
      return set(int_at(n, 1), expr(n.items[2]));
    }
    if (head == "len") {
      arity(1);
      return len(expr(n.items[1]));
    }
    if (head == "aget") {
      arity(2);
      return aget(expr(n.items[1]), expr(n.items[2]));
    }
    if (head == "aset") {
      arity(3);
      return aset(expr(n.items[1]), expr(n.items[2]), expr(n.items[3]));
    }
    if (head == "anew") {
      arity(1);
      return anew(expr(n.items[1]));
    }
    static const std::unordered_map<std::string, BinOp> kOps = {
        {"add", BinOp::Add}, {"sub", BinOp::Sub}, {"mul", BinOp::Mul},
        {"shl", BinOp::Shl}, {"and", BinOp::And}, {"lt", BinOp::CmpLt},
        {"eq", BinOp::CmpEq}};
    if (auto it = kOps.find(head); it != kOps.end()) {
      arity(2);
      return bin(it->second, expr(n.items[1]), expr(n.items[2]));
    }
    if (head == "seq") {
      std::vector<Expr> es;
      for (size_t i = 1; i < n.items.size(); ++i) es.push_back(expr(n.items[i]));
      return seq(std::move(es));
    }
    if (head == "if") {
      arity(3);
      return ifx(expr(n.items[1]), expr(n.items[2]), expr(n.items[3]));
    }
    if (head == "loop") {
      arity(2);
      return loop(expr(n.items[1]), expr(n.items[2]));
    }
    if (head == "switch") return switch_expr(n);
    if (head == "call") {
      if (n.items.size() < 2)
        throw ParseError{"'call' needs a function name", n.line, n.column};
      std::vector<Expr> args;
      for (size_t i = 2; i < n.items.size(); ++i) args.push_back(expr(n.items[i]));
      FunctionId callee = resolve(n.items[1]);
      if ((int)args.size() != fns_[callee].paramCount)
        throw ParseError{"call to '" + fns_[callee].name + "' passes " +
                             std::to_string(args.size()) +
                             " arguments, wants " +
                             std::to_string(fns_[callee].paramCount),
                         n.line, n.column};
      return call(callee, std::move(args));
    }
    if (head == "calli") {
      if (n.items.size() < 2)
        throw ParseError{"'calli' needs a callee expression", n.line, n.column};
      std::vector<Expr> args;
      for (size_t i = 2; i < n.items.size(); ++i) args.push_back(expr(n.items[i]));
      return calli(expr(n.items[1]), std::move(args));
    }
    if (head == "fref") {
      arity(1);
      return fref(resolve(n.items[1]));
    }
    if (head == "return") {
      arity(1);
      return ret(expr(n.items[1]));
    }
    throw ParseError{"unknown form '" + head + "'", n.line, n.column};
  }

 private:
  Expr switch_expr(const SNode& n) {
    if (n.items.size() < 2)
      throw ParseError{"'switch' needs a scrutinee", n.line, n.column};
    Expr scrut = expr(n.items[1]);
    std::vector<build::Arm> arms;
    Expr defaultBody;
    bool haveDefault = false;
    bool fallThrough = false;
    for (size_t i = 2; i < n.items.size(); ++i) {
      const SNode& c = n.items[i];
      if (!c.isList) {
        if (c.atom.kind == Token::Kind::Symbol && c.atom.text == ":fallthrough") {
          fallThrough = true;
          continue;
        }
        throw ParseError{"unexpected token in switch", c.line, c.column};
      }
      if (c.items.empty() || c.items[0].isList)
        throw ParseError{"expected (case ...) or (default ...)", c.line, c.column};
      const std::string& h = c.items[0].atom.text;
      if (h == "case") {
        if (c.items.size() != 3)
          throw ParseError{"'case' expects a value and a body", c.line, c.column};
        arms.push_back({int_of(c.items[1]), expr(c.items[2])});
      } else if (h == "default") {
        if (c.items.size() != 2)
          throw ParseError{"'default' expects one body", c.line, c.column};
        defaultBody = expr(c.items[1]);
        haveDefault = true;
      } else {
        throw ParseError{"expected (case ...) or (default ...)", c.line, c.column};
      }
    }
    if (!haveDefault)
      throw ParseError{"switch requires a default clause", n.line, n.column};
    return build::swtch(std::move(scrut), std::move(arms), std::move(defaultBody),
                        fallThrough);
  }

  FunctionId resolve(const SNode& n) {
    // Both the bare and the quoted spelling name a function.
    if (n.isList || (n.atom.kind != Token::Kind::Symbol &&
                     n.atom.kind != Token::Kind::String))
      throw ParseError{"expected a function name", n.line, n.column};
    auto it = ids_.find(n.atom.text);
    if (it == ids_.end())
      throw ParseError{"unknown function '" + n.atom.text + "'", n.line, n.column};
    return it->second;
  }

  int64_t int_at(const SNode& n, size_t i) { return int_of(n.items[i]); }
  int64_t int_of(const SNode& n) {
    if (n.isList || n.atom.kind != Token::Kind::Int)
      throw ParseError{"expected an integer", n.line, n.column};
    return n.atom.value;
  }

  const std::unordered_map<std::string, FunctionId>& ids_;
  const std::vector<Function>& fns_;
};

}  // namespace

Program parse_program(const std::string& text) {
  Lexer lex(text);
  Token first = lex.next();
  if (first.kind == Token::Kind::End)
    throw ParseError{"empty input", first.line, first.column};
  SNode top = parse_snode(lex, first);
  Token trailing = lex.next();
  if (trailing.kind != Token::Kind::End)
    throw ParseError{"trailing input after program", trailing.line, trailing.column};

  if (!top.isList || top.items.empty() || top.items[0].isList ||
      top.items[0].atom.text != "program")
    throw ParseError{"expected (program ...)", top.line, top.column};

  Program p;
  std::unordered_map<std::string, FunctionId> ids;
  std::string initName;
  std::vector<const SNode*> fnNodes;

  for (size_t i = 1; i < top.items.size(); ++i) {
    const SNode& c = top.items[i];
    if (!c.isList || c.items.empty() || c.items[0].isList)
      throw ParseError{"expected (init ...) or (fn ...)", c.line, c.column};
    const std::string& h = c.items[0].atom.text;
    if (h == "init") {
      if (c.items.size() != 2 || c.items[1].isList)
        throw ParseError{"'init' expects a function name", c.line, c.column};
      initName = c.items[1].atom.text;
    } else if (h == "fn") {
      // (fn [<id>] <name> <paramCount> <localCount> <body>); the optional id
      // symbol is accepted as an alias for call resolution.
      size_t at = 1;
      if (c.items.size() >= 2 && !c.items[at].isList &&
          c.items[at].atom.kind == Token::Kind::Symbol && at + 1 < c.items.size() &&
          !c.items[at + 1].isList &&
          c.items[at + 1].atom.kind == Token::Kind::String) {
        FunctionId id = (FunctionId)p.functions.size();
        ids.emplace(c.items[at].atom.text, id);
        ++at;
      }
      if (c.items.size() != at + 4)
        throw ParseError{"'fn' expects name, counts, and a body", c.line, c.column};
      const SNode& nameNode = c.items[at];
      if (nameNode.isList || nameNode.atom.kind == Token::Kind::Int)
        throw ParseError{"expected a function name", nameNode.line, nameNode.column};
      Function f;
      f.id = (FunctionId)p.functions.size();
      f.name = nameNode.atom.text;
      auto count_of = [&](const SNode& n) -> int {
        if (n.isList || n.atom.kind != Token::Kind::Int || n.atom.value < 0)
          throw ParseError{"expected a non-negative count", n.line, n.column};
        return (int)n.atom.value;
      };
      f.paramCount = count_of(c.items[at + 1]);
      f.localCount = count_of(c.items[at + 2]);
      if (!ids.emplace(f.name, f.id).second)
        throw ParseError{"duplicate function name '" + f.name + "'", c.line, c.column};
      p.functions.push_back(std::move(f));
      fnNodes.push_back(&c.items[at + 3]);
    } else {
      throw ParseError{"expected (init ...) or (fn ...)", c.line, c.column};
    }
  }

  Converter conv(ids, p.functions);
  for (size_t i = 0; i < p.functions.size(); ++i) {
    p.functions[i].body = conv.expr(*fnNodes[i]);
    finalize_function(p.functions[i]);
  }
  if (!initName.empty()) {
    auto it = ids.find(initName);
    if (it == ids.end())
      throw ParseError{"unknown init function '" + initName + "'", top.line, top.column};
    p.initFunctionId = it->second;
  }
  return p;
}

namespace {

void print_expr_rec(std::ostream& os, const Expr& e, const Program& p) {
  auto name_of = [&](FunctionId id) -> std::string {
    const Function* f = p.find(id);
    return f ? f->name : "#" + std::to_string(id);
  };
  switch (e.kind) {
    case ExprKind::ConstInt:
      os << "(const " << e.value << ")";
      break;
    case ExprKind::LocalGet:
      os << "(get " << e.value << ")";
      break;
    case ExprKind::LocalSet:
      os << "(set " << e.value << " ";
      print_expr_rec(os, e.children[0], p);
      os << ")";
      break;
    case ExprKind::ArrayLen:
      os << "(len ";
      print_expr_rec(os, e.children[0], p);
      os << ")";
      break;
    case ExprKind::ArrayGet:
    case ExprKind::ArraySet:
      os << (e.kind == ExprKind::ArrayGet ? "(aget" : "(aset");
      for (const auto& c : e.children) {
        os << " ";
        print_expr_rec(os, c, p);
      }
      os << ")";
      break;
    case ExprKind::ArrayNew:
      os << "(anew ";
      print_expr_rec(os, e.children[0], p);
      os << ")";
      break;
    case ExprKind::Bin:
      os << "(" << binop_name(e.op) << " ";
      print_expr_rec(os, e.children[0], p);
      os << " ";
      print_expr_rec(os, e.children[1], p);
      os << ")";
      break;
    case ExprKind::Seq:
      os << "(seq";
      for (const auto& c : e.children) {
        os << " ";
        print_expr_rec(os, c, p);
      }
      os << ")";
      break;
    case ExprKind::If:
      os << "(if ";
      print_expr_rec(os, e.children[0], p);
      os << " ";
      print_expr_rec(os, e.children[1], p);
      os << " ";
      print_expr_rec(os, e.children[2], p);
      os << ")";
      break;
    case ExprKind::Switch: {
      os << "(switch ";
      print_expr_rec(os, e.children[0], p);
      for (size_t i = 0; i < e.caseValues.size(); ++i) {
        os << " (case " << e.caseValues[i] << " ";
        print_expr_rec(os, e.children[1 + i], p);
        os << ")";
      }
      if (e.hasDefault) {
        os << " (default ";
        print_expr_rec(os, e.children.back(), p);
        os << ")";
      }
      if (e.fallThrough) os << " :fallthrough";
      os << ")";
      break;
    }
    case ExprKind::Loop:
      os << "(loop ";
      print_expr_rec(os, e.children[0], p);
      os << " ";
      print_expr_rec(os, e.children[1], p);
      os << ")";
      break;
    case ExprKind::CallDirect:
      os << "(call " << name_of(e.value);
      for (const auto& c : e.children) {
        os << " ";
        print_expr_rec(os, c, p);
      }
      os << ")";
      break;
    case ExprKind::CallIndirect:
      os << "(calli";
      for (const auto& c : e.children) {
        os << " ";
        print_expr_rec(os, c, p);
      }
      os << ")";
      break;
    case ExprKind::FuncRef:
      os << "(fref " << name_of(e.value) << ")";
      break;
    case ExprKind::Return:
      os << "(return ";
      print_expr_rec(os, e.children[0], p);
      os << ")";
      break;
    case ExprKind::Guard:
    case ExprKind::InlinedCall:
      os << "(<compiled>)";
      break;
  }
}

}  // namespace

std::string print_expr(const Expr& e, const Program& p) {
  std::ostringstream os;
  print_expr_rec(os, e, p);
  return os.str();
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  os << "(program";
  if (p.initFunctionId) {
    const Function* init = p.find(*p.initFunctionId);
    os << "\n  (init " << (init ? init->name : "?") << ")";
  }
  for (const auto& f : p.functions) {
    os << "\n  (fn " << f.name << " " << f.paramCount << " " << f.localCount
       << " ";
    print_expr_rec(os, f.body, p);
    os << ")";
  }
  os << ")\n";
  return os.str();
}

}  // namespace specvm
