#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specvm/builders.hpp"
#include "specvm/text.hpp"

using namespace specvm;
using namespace specvm::build;

TEST_CASE("node_count counts every node once") {
  CHECK(node_count(cst(1)) == 1);
  CHECK(node_count(add(cst(1), cst(2))) == 3);
  CHECK(node_count(ret(add(get(0), cst(1)))) == 4);
  Expr s = seq({set(0, cst(1)), set(1, cst(2)), ret(get(0))});
  CHECK(node_count(s) == 1 + 2 + 2 + 2);
}

TEST_CASE("finalize_function assigns preorder sites to control and calls") {
  // if(cond, loop(...), call) : sites must be 0 (if), 1 (loop), 2 (call),
  // with the call nested under the else branch visited last.
  Program p;
  p.functions.push_back(function("leaf", 0, 0, ret(cst(7))));
  p.functions[0].id = 0;
  Expr body = ifx(get(0), loop(lt(get(1), cst(3)), set(1, add(get(1), cst(1)))),
                  ret(call(0, {})));
  Function f = function("f", 1, 2, std::move(body));
  CHECK(f.body.site == 0);
  CHECK(f.body.children[1].site == 1);
  CHECK(f.body.children[2].children[0].site == 2);
  CHECK(f.siteCount == 3);
  CHECK(f.size == node_count(f.body));
}

TEST_CASE("validate flags broken programs") {
  Program p;
  p.functions.push_back(function("f", 1, 1, ret(get(3))));
  p.functions[0].id = 0;
  CHECK_FALSE(validate(p).ok());

  Program q;
  q.functions.push_back(function("g", 0, 0, ret(call(9, {}))));
  q.functions[0].id = 0;
  CHECK_FALSE(validate(q).ok());

  Program r;
  r.functions.push_back(function("h", 2, 1, ret(cst(0))));  // params > locals
  r.functions[0].id = 0;
  CHECK_FALSE(validate(r).ok());

  Program ok;
  ok.functions.push_back(function("f", 1, 2, ret(add(get(0), get(1)))));
  ok.functions[0].id = 0;
  CHECK(validate(ok).ok());
}

TEST_CASE("validate rejects arity mismatch and bad init") {
  Program p;
  p.functions.push_back(function("callee", 2, 2, ret(add(get(0), get(1)))));
  p.functions[0].id = 0;
  p.functions.push_back(function("caller", 0, 0, ret(call(0, {cst(1)}))));
  p.functions[1].id = 1;
  CHECK_FALSE(validate(p).ok());

  Program q;
  q.functions.push_back(function("init", 1, 1, ret(cst(0))));
  q.functions[0].id = 0;
  q.initFunctionId = 0;
  CHECK_FALSE(validate(q).ok());  // init must take no parameters
}

TEST_CASE("structural_equal ignores callee ids but nothing else") {
  Program p;
  p.functions.push_back(function("a", 1, 1, ret(add(get(0), cst(1)))));
  p.functions[0].id = 0;
  p.functions.push_back(function("b", 1, 1, ret(add(get(0), cst(1)))));
  p.functions[1].id = 1;

  Expr ca = ret(call(0, {cst(5)}));
  Expr cb = ret(call(1, {cst(5)}));
  CHECK(structural_equal(ca, cb));

  CHECK(structural_equal(fref(0), fref(1)));
  CHECK_FALSE(structural_equal(cst(1), cst(2)));
  CHECK_FALSE(structural_equal(get(0), set(0, cst(1))));
  CHECK_FALSE(structural_equal(add(cst(1), cst(2)), sub(cst(1), cst(2))));

  Expr sw1 = swtch(get(0), {{1, cst(10)}, {2, cst(20)}}, cst(0), false);
  Expr sw2 = swtch(get(0), {{1, cst(10)}, {3, cst(20)}}, cst(0), false);
  CHECK_FALSE(structural_equal(sw1, sw2));
  Expr sw3 = swtch(get(0), {{1, cst(10)}, {2, cst(20)}}, cst(0), true);
  CHECK_FALSE(structural_equal(sw1, sw3));
}

TEST_CASE("hash builders are structurally distinct but both valid") {
  Program p;
  p.functions.push_back(build_hash_baseline());
  p.functions[0].id = 0;
  p.functions.push_back(build_hash_ft32());
  p.functions[1].id = 1;
  finalize_function(p.functions[0]);
  finalize_function(p.functions[1]);
  CHECK(validate(p).ok());
  CHECK_FALSE(structural_equal(p.functions[0].body, p.functions[1].body));
  // ft32 has one switch site plus the default loop's sites.
  CHECK(p.functions[1].siteCount > p.functions[0].siteCount);
}

TEST_CASE("parse handles every expression form") {
  const char* text = R"((program
    (fn "leaf" 1 1 (return (add (get 0) (const 1))))
    (fn "main" 1 4 (seq
      (set 1 (anew (const 4)))
      (aset (get 1) (const 0) (const 300))
      (set 2 (aget (get 1) (const 0)))
      (set 3 (len (get 1)))
      (if (lt (get 2) (const 0))
          (set 2 (sub (const 0) (get 2)))
          (set 2 (mul (get 2) (const 1))))
      (loop (lt (get 3) (const 6)) (set 3 (add (get 3) (const 1))))
      (switch (and (get 0) (const 3))
        (case 0 (set 3 (shl (get 3) (const 1))))
        (case 1 (set 3 (call "leaf" (get 3))))
        (default (set 3 (calli (fref "leaf") (get 3)))))
      (return (eq (get 3) (const 12))))))
  )";
  Program p = parse_program(text);
  REQUIRE(p.functions.size() == 2);
  CHECK(p.functions[0].name == "leaf");
  CHECK(p.functions[1].paramCount == 1);
  CHECK(p.functions[1].localCount == 4);
  CHECK(validate(p).ok());
  CHECK_FALSE(p.initFunctionId.has_value());
}

TEST_CASE("parse resolves init function by name") {
  Program p = parse_program(
      "(program (init \"setup\")"
      " (fn \"setup\" 0 0 (return (const 1)))"
      " (fn \"f\" 0 0 (return (const 2))))");
  REQUIRE(p.initFunctionId.has_value());
  CHECK(*p.initFunctionId == 0);
  CHECK(validate(p).ok());
}

TEST_CASE("print then parse round-trips hand-built programs") {
  for (const char* which : {"hashcode"}) {
    (void)which;
    Program p;
    p.functions.push_back(build_hash_baseline());
    p.functions[0].id = 0;
    p.functions.push_back(build_hash_ft32());
    p.functions[1].id = 1;
    finalize_function(p.functions[0]);
    finalize_function(p.functions[1]);
    std::string once = print_program(p);
    Program q = parse_program(once);
    REQUIRE(q.functions.size() == p.functions.size());
    for (size_t i = 0; i < p.functions.size(); ++i) {
      CHECK(structural_equal(p.functions[i].body, q.functions[i].body));
      CHECK(q.functions[i].siteCount == p.functions[i].siteCount);
      CHECK(q.functions[i].size == p.functions[i].size);
    }
    CHECK(print_program(q) == once);  // printing is a fixed point
  }
}

TEST_CASE("round-trip preserves fallthrough switches") {
  Program p = parse_program(
      "(program (fn \"f\" 1 2 (seq"
      " (switch (get 0) :fallthrough"
      "  (case 2 (set 1 (add (get 1) (const 2))))"
      "  (case 1 (set 1 (add (get 1) (const 1))))"
      "  (default (set 1 (const -1))))"
      " (return (get 1)))))");
  const Expr& sw = p.functions[0].body.children[0];
  REQUIRE(sw.kind == ExprKind::Switch);
  CHECK(sw.fallThrough);
  CHECK(sw.hasDefault);
  CHECK(sw.caseValues == std::vector<int64_t>{2, 1});
  CHECK(sw.testedValues == std::vector<int64_t>{2, 1});
  std::string once = print_program(p);
  CHECK(print_program(parse_program(once)) == once);
}

TEST_CASE("parse errors carry position and message") {
  auto expect_error = [](const std::string& text) {
    try {
      parse_program(text);
      FAIL_CHECK("expected ParseError for: " << text);
    } catch (const ParseError& e) {
      CHECK(e.line >= 1);
      CHECK(!e.message.empty());
    }
  };
  expect_error("(program (fn \"f\" 0 0 (return (const 1))");  // unbalanced
  expect_error("(program (fn \"f\" 0 0 (return (bogus 1))))");
  expect_error("(program (fn \"f\" 0 0 (return (call \"nope\"))))");
  expect_error("(program (fn \"f\" 0 0 (switch (const 0) (case 1 (const 1)))))");
  expect_error("(program (init \"missing\") (fn \"f\" 0 0 (return (const 0))))");
  // arity mismatch on a direct call is a parse-time error
  expect_error(
      "(program (fn \"g\" 2 2 (return (get 0)))"
      " (fn \"f\" 0 0 (return (call \"g\" (const 1)))))");
}

TEST_CASE("parse reports line numbers past the first line") {
  try {
    parse_program("(program\n  (fn \"f\" 0 0\n    (return (nope))))\n");
    FAIL_CHECK("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}
