#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specvm/builders.hpp"
#include "specvm/interp.hpp"
#include "specvm/jit.hpp"

using namespace specvm;
using namespace specvm::build;

namespace {

Program one_fn(Function f) {
  Program p;
  f.id = 0;
  p.functions.push_back(std::move(f));
  return p;
}

// Interprets fn once per argument vector so the compiler sees real profiles.
ProfileStore warm(const Program& p, FunctionId fn,
                  const std::vector<std::vector<Value>>& calls) {
  ProfileStore profiles(p);
  CostLedger ledger;
  CostModel model;
  for (const auto& args : calls)
    interpret(p, fn, args, profiles, ledger, model);
  return profiles;
}

std::vector<std::vector<Value>> int_calls(const std::vector<int64_t>& vs) {
  std::vector<std::vector<Value>> out;
  for (int64_t v : vs) out.push_back({Value::from_int(v)});
  return out;
}

bool contains_kind(const Expr& e, ExprKind k) {
  if (e.kind == k) return true;
  for (const auto& c : e.children)
    if (contains_kind(c, k)) return true;
  return false;
}

Value expect_value(const CompiledResult& r) {
  REQUIRE(std::holds_alternative<Value>(r));
  return std::get<Value>(r);
}

DeoptRequest expect_deopt(const CompiledResult& r) {
  REQUIRE(std::holds_alternative<DeoptRequest>(r));
  return std::get<DeoptRequest>(r);
}

}  // namespace

TEST_CASE("one-sided branch compiles to a guard") {
  Program p = one_fn(function(
      "f", 1, 1, ret(ifx(lt(get(0), cst(100)), cst(1), cst(2)))));
  CostModel model;
  AssumptionBlacklist none;

  SUBCASE("always taken") {
    ProfileStore profiles = warm(p, 0, int_calls(std::vector<int64_t>(20, 5)));
    CompiledMethod m = compile(p, 0, profiles, none, model, 1);
    REQUIRE(m.speculations.size() == 1);
    CHECK(m.speculations[0].kind == SpeculationKind::BranchAlwaysTaken);
    CHECK(contains_kind(m.body, ExprKind::Guard));
    CHECK_FALSE(contains_kind(m.body, ExprKind::If));

    CostLedger ledger;
    CHECK(expect_value(execute_compiled(p, m, {Value::from_int(3)}, ledger,
                                        model)).i == 1);
    DeoptRequest d = expect_deopt(
        execute_compiled(p, m, {Value::from_int(200)}, ledger, model));
    CHECK(d.guardId == 0);
    CHECK(d.site == m.speculations[0].site);
  }

  SUBCASE("never taken") {
    ProfileStore profiles =
        warm(p, 0, int_calls(std::vector<int64_t>(20, 500)));
    CompiledMethod m = compile(p, 0, profiles, none, model, 1);
    REQUIRE(m.speculations.size() == 1);
    CHECK(m.speculations[0].kind == SpeculationKind::BranchNeverTaken);
    CostLedger ledger;
    CHECK(expect_value(execute_compiled(p, m, {Value::from_int(500)}, ledger,
                                        model)).i == 2);
    expect_deopt(execute_compiled(p, m, {Value::from_int(3)}, ledger, model));
  }

  SUBCASE("two-sided profile stays generic") {
    ProfileStore profiles = warm(p, 0, int_calls({5, 200, 5, 200, 5, 200, 5,
                                                  200, 5, 200, 5, 200, 5, 200,
                                                  5, 200}));
    CompiledMethod m = compile(p, 0, profiles, none, model, 1);
    CHECK(m.speculations.empty());
    CHECK(contains_kind(m.body, ExprKind::If));
  }

  SUBCASE("too few samples stays generic") {
    ProfileStore profiles = warm(p, 0, int_calls(std::vector<int64_t>(10, 5)));
    CompiledMethod m = compile(p, 0, profiles, none, model, 1);
    CHECK(m.speculations.empty());
  }

  SUBCASE("blacklisted speculation is not retried") {
    ProfileStore profiles = warm(p, 0, int_calls(std::vector<int64_t>(20, 5)));
    AssumptionBlacklist bl;
    bl.add(0, 0, SpeculationKind::BranchAlwaysTaken);
    CompiledMethod m = compile(p, 0, profiles, bl, model, 2);
    CHECK(m.speculations.empty());
    CHECK(contains_kind(m.body, ExprKind::If));
    CostLedger ledger;
    CHECK(expect_value(execute_compiled(p, m, {Value::from_int(200)}, ledger,
                                        model)).i == 2);
  }
}

TEST_CASE("single observed switch case flattens the arm") {
  Program p = one_fn(function(
      "f", 1, 1,
      ret(swtch(get(0), {{1, cst(10)}, {2, cst(20)}, {3, cst(30)}}, cst(0),
                false))));
  CostModel model;
  AssumptionBlacklist none;
  ProfileStore profiles = warm(p, 0, int_calls(std::vector<int64_t>(20, 2)));
  CompiledMethod m = compile(p, 0, profiles, none, model, 1);
  REQUIRE(m.speculations.size() == 1);
  CHECK(m.speculations[0].kind == SpeculationKind::SwitchSingleCase);
  CHECK(m.speculations[0].caseValue == 2);
  CHECK_FALSE(contains_kind(m.body, ExprKind::Switch));

  CostLedger ledger;
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(2)}, ledger,
                                      model)).i == 20);
  expect_deopt(execute_compiled(p, m, {Value::from_int(3)}, ledger, model));
  expect_deopt(execute_compiled(p, m, {Value::from_int(9)}, ledger, model));
}

TEST_CASE("single-case fall-through expands the chain up to a return") {
  // Arms fall through 3 -> 2 -> 1; arm 2's body returns, so flattening an
  // entry at 3 must keep arms 3 and 2 and drop arm 1.
  Program p = one_fn(function(
      "f", 2, 2,
      seq({swtch(get(0),
                 {{3, set(1, add(get(1), cst(3)))},
                  {2, ret(add(get(1), cst(2)))},
                  {1, set(1, add(get(1), cst(1)))}},
                 set(1, cst(-1)), true),
           ret(get(1))})));
  CostModel model;
  AssumptionBlacklist none;
  std::vector<std::vector<Value>> calls(
      20, {Value::from_int(3), Value::from_int(0)});
  ProfileStore profiles = warm(p, 0, calls);
  CompiledMethod m = compile(p, 0, profiles, none, model, 1);
  REQUIRE(m.speculations.size() == 1);
  CHECK(m.speculations[0].kind == SpeculationKind::SwitchSingleCase);
  CHECK_FALSE(contains_kind(m.body, ExprKind::Switch));

  CostLedger ledger;
  CHECK(expect_value(execute_compiled(
            p, m, {Value::from_int(3), Value::from_int(0)}, ledger, model))
            .i == 5);
}

TEST_CASE("partially observed switch keeps only reachable arms") {
  Program p = one_fn(function(
      "f", 1, 1,
      ret(swtch(get(0), {{1, cst(10)}, {2, cst(20)}, {3, cst(30)}}, cst(0),
                false))));
  CostModel model;
  AssumptionBlacklist none;
  ProfileStore profiles =
      warm(p, 0, int_calls({1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3}));
  CompiledMethod m = compile(p, 0, profiles, none, model, 1);
  REQUIRE(m.speculations.size() == 1);
  CHECK(m.speculations[0].kind == SpeculationKind::SwitchPrunedCases);
  CHECK(m.speculations[0].values == std::vector<int64_t>{1, 3});
  CHECK_FALSE(m.speculations[0].allowDefault);
  CHECK(m.speculations[0].originalCases == std::vector<int64_t>{1, 2, 3});

  CostLedger ledger;
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(1)}, ledger,
                                      model)).i == 10);
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(3)}, ledger,
                                      model)).i == 30);
  // Pruned entry case and unobserved default both fail the guard.
  expect_deopt(execute_compiled(p, m, {Value::from_int(2)}, ledger, model));
  expect_deopt(execute_compiled(p, m, {Value::from_int(42)}, ledger, model));
}

TEST_CASE("default plus one arm keeps the default path") {
  Program p = one_fn(function(
      "f", 1, 1,
      ret(swtch(get(0), {{1, cst(10)}, {2, cst(20)}}, cst(-1), false))));
  CostModel model;
  AssumptionBlacklist none;
  ProfileStore profiles =
      warm(p, 0, int_calls({1, 9, 1, 9, 1, 9, 1, 9, 1, 9, 1, 9, 1, 9, 1, 9}));
  CompiledMethod m = compile(p, 0, profiles, none, model, 1);
  REQUIRE(m.speculations.size() == 1);
  CHECK(m.speculations[0].kind == SpeculationKind::SwitchPrunedCases);
  CHECK(m.speculations[0].allowDefault);

  CostLedger ledger;
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(1)}, ledger,
                                      model)).i == 10);
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(9)}, ledger,
                                      model)).i == -1);
  // 2 is an original case that was pruned: default must not swallow it.
  expect_deopt(execute_compiled(p, m, {Value::from_int(2)}, ledger, model));
}

TEST_CASE("default-only profile drops every arm") {
  Program p = one_fn(function(
      "f", 1, 1,
      ret(swtch(get(0), {{1, cst(10)}, {2, cst(20)}}, cst(-1), false))));
  CostModel model;
  AssumptionBlacklist none;
  ProfileStore profiles = warm(p, 0, int_calls(std::vector<int64_t>(20, 7)));
  CompiledMethod m = compile(p, 0, profiles, none, model, 1);
  REQUIRE(m.speculations.size() == 1);
  CHECK(m.speculations[0].kind == SpeculationKind::SwitchPrunedCases);
  CHECK(m.speculations[0].values.empty());
  CHECK(m.speculations[0].allowDefault);
  CHECK_FALSE(contains_kind(m.body, ExprKind::Switch));

  CostLedger ledger;
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(8)}, ledger,
                                      model)).i == -1);
  expect_deopt(execute_compiled(p, m, {Value::from_int(1)}, ledger, model));
}

TEST_CASE("monomorphic indirect call inlines the callee") {
  Program p;
  p.functions.push_back(function("inc", 1, 1, ret(add(get(0), cst(1)))));
  p.functions[0].id = 0;
  p.functions.push_back(function("dbl", 1, 1, ret(mul(get(0), cst(2)))));
  p.functions[1].id = 1;
  p.functions.push_back(
      function("apply", 2, 2, ret(calli(get(0), {get(1)}))));
  p.functions[2].id = 2;
  CostModel model;
  AssumptionBlacklist none;

  std::vector<std::vector<Value>> calls(
      20, {Value::from_func(0), Value::from_int(5)});
  ProfileStore profiles = warm(p, 2, calls);
  CompiledMethod m = compile(p, 2, profiles, none, model, 1);
  REQUIRE(m.speculations.size() == 1);
  CHECK(m.speculations[0].kind == SpeculationKind::CalleeIs);
  CHECK(m.speculations[0].values == std::vector<int64_t>{0});
  CHECK(m.inlinedFunctions == std::vector<FunctionId>{0});
  CHECK(contains_kind(m.body, ExprKind::InlinedCall));

  CostLedger ledger;
  CHECK(expect_value(execute_compiled(
            p, m, {Value::from_func(0), Value::from_int(5)}, ledger, model))
            .i == 6);
  // Unexpected callee fails the dispatch guard.
  expect_deopt(execute_compiled(
      p, m, {Value::from_func(1), Value::from_int(5)}, ledger, model));
}

TEST_CASE("polymorphic call inlines both targets, megamorphic none") {
  Program p;
  p.functions.push_back(function("inc", 1, 1, ret(add(get(0), cst(1)))));
  p.functions[0].id = 0;
  p.functions.push_back(function("dbl", 1, 1, ret(mul(get(0), cst(2)))));
  p.functions[1].id = 1;
  p.functions.push_back(function("neg", 1, 1, ret(sub(cst(0), get(0)))));
  p.functions[2].id = 2;
  p.functions.push_back(
      function("apply", 2, 2, ret(calli(get(0), {get(1)}))));
  p.functions[3].id = 3;
  CostModel model;
  AssumptionBlacklist none;

  SUBCASE("two callees inline behind one guard chain") {
    std::vector<std::vector<Value>> calls;
    for (int i = 0; i < 20; ++i)
      calls.push_back({Value::from_func(i % 2), Value::from_int(5)});
    ProfileStore profiles = warm(p, 3, calls);
    CompiledMethod m = compile(p, 3, profiles, none, model, 1);
    REQUIRE(m.speculations.size() == 1);
    CHECK(m.speculations[0].values.size() == 2);
    CHECK(m.inlinedFunctions.size() == 2);
    CostLedger ledger;
    CHECK(expect_value(execute_compiled(
              p, m, {Value::from_func(0), Value::from_int(5)}, ledger, model))
              .i == 6);
    CHECK(expect_value(execute_compiled(
              p, m, {Value::from_func(1), Value::from_int(5)}, ledger, model))
              .i == 10);
    expect_deopt(execute_compiled(
        p, m, {Value::from_func(2), Value::from_int(5)}, ledger, model));
  }

  SUBCASE("three distinct callees exceed maxInlineTargets") {
    std::vector<std::vector<Value>> calls;
    for (int i = 0; i < 21; ++i)
      calls.push_back({Value::from_func(i % 3), Value::from_int(5)});
    ProfileStore profiles = warm(p, 3, calls);
    CompiledMethod m = compile(p, 3, profiles, none, model, 1);
    CHECK(m.speculations.empty());
    CHECK(m.inlinedFunctions.empty());
    CHECK_FALSE(contains_kind(m.body, ExprKind::InlinedCall));
    CostLedger ledger;
    CHECK(expect_value(execute_compiled(
              p, m, {Value::from_func(2), Value::from_int(5)}, ledger, model))
              .i == -5);
  }
}

TEST_CASE("direct calls inline purely by size") {
  Program p;
  p.functions.push_back(function("small", 1, 1, ret(add(get(0), cst(1)))));
  p.functions[0].id = 0;
  std::vector<Expr> big;
  for (int i = 0; i < 25; ++i) big.push_back(set(0, add(get(0), cst(i))));
  big.push_back(ret(get(0)));
  p.functions.push_back(function("big", 1, 1, seq(std::move(big))));
  p.functions[1].id = 1;
  p.functions.push_back(function(
      "caller", 1, 1, ret(add(call(0, {get(0)}), call(1, {get(0)})))));
  p.functions[2].id = 2;
  CHECK(p.functions[1].size > CostModel{}.maxInlineeSize);

  CostModel model;
  AssumptionBlacklist none;
  ProfileStore profiles(p);  // direct-call inlining needs no samples
  CompiledMethod m = compile(p, 2, profiles, none, model, 1);
  CHECK(m.inlinedFunctions == std::vector<FunctionId>{0});
  CHECK(m.speculations.empty());  // direct inlining carries no guard
  CostLedger ledger;
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(2)}, ledger,
                                      model)).i == 3 + 302);
}

TEST_CASE("maxCompiledSize caps total inlining") {
  Program p;
  std::vector<Expr> medium;
  for (int i = 0; i < 13; ++i) medium.push_back(set(0, add(get(0), cst(1))));
  medium.push_back(ret(get(0)));
  p.functions.push_back(function("medium", 1, 1, seq(std::move(medium))));
  p.functions[0].id = 0;
  CHECK(p.functions[0].size <= CostModel{}.maxInlineeSize);

  std::vector<Expr> callerBody;
  for (int i = 0; i < 40; ++i) callerBody.push_back(set(0, call(0, {get(0)})));
  callerBody.push_back(ret(get(0)));
  p.functions.push_back(function("caller", 1, 1, seq(std::move(callerBody))));
  p.functions[1].id = 1;

  CostModel model;
  AssumptionBlacklist none;
  ProfileStore profiles(p);
  CompiledMethod m = compile(p, 1, profiles, none, model, 1);
  // Every inlined copy adds ~54 nodes on a ~200 node caller; the 1200-node
  // budget admits some but not all 40 call sites.
  int inlinedCalls = 0, plainCalls = 0;
  std::function<void(const Expr&)> count = [&](const Expr& e) {
    if (e.kind == ExprKind::InlinedCall) ++inlinedCalls;
    if (e.kind == ExprKind::CallDirect) ++plainCalls;
    for (const auto& c : e.children) count(c);
  };
  count(m.body);
  CHECK(inlinedCalls > 0);
  CHECK(plainCalls > 0);
  CHECK(m.codeSize <= model.maxCompiledSize + p.functions[0].size);

  CostLedger ledger;
  CHECK(expect_value(execute_compiled(p, m, {Value::from_int(0)}, ledger,
                                      model)).i == 40 * 13);
}

TEST_CASE("compiled execution is cheaper and result-identical") {
  Program p;
  p.functions.push_back(build_hash_baseline());
  p.functions[0].id = 0;
  CostModel model;
  AssumptionBlacklist none;
  ByteArray bytes{1, 2, 3, 4, 5, 6, 7, 8};

  ProfileStore profiles(p);
  CostLedger warmLedger;
  Value want;
  for (int i = 0; i < 20; ++i)
    want = interpret(p, 0, {Value::from_bytes(bytes)}, profiles, warmLedger,
                     model);

  CompiledMethod m = compile(p, 0, profiles, none, model, 1);
  CHECK(code_size(m) == node_count(m.body));

  CostLedger interpLedger, compiledLedger;
  ProfileStore fresh(p);
  interpret(p, 0, {Value::from_bytes(bytes)}, fresh, interpLedger, model);
  Value got = expect_value(execute_compiled(
      p, m, {Value::from_bytes(bytes)}, compiledLedger, model));
  CHECK(got.i == want.i);
  CHECK(got.i == poly_hash_oracle(bytes));
  CHECK(compiledLedger.totalCycles * 5 < interpLedger.totalCycles);
}
