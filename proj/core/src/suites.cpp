#include "specvm/suites.hpp"

#include <map>

#include "specvm/builders.hpp"

namespace specvm {

using namespace build;

namespace {

Program assemble(std::vector<Function> fns,
                 std::optional<FunctionId> init = std::nullopt) {
  Program p;
  p.functions = std::move(fns);
  for (size_t i = 0; i < p.functions.size(); ++i)
    p.functions[i].id = (FunctionId)i;
  p.initFunctionId = init;
  return p;
}

InputGenerator byte_array_generator() {
  return [](int64_t param, int64_t opIndex, uint64_t seed) {
    return std::vector<Value>{
        Value::from_bytes(make_input_bytes(seed, opIndex, param))};
  };
}

Expr inc_local(int64_t slot) { return set(slot, add(get(slot), cst(1))); }

}  // namespace

const BenchmarkDef* SuiteDefinition::find_benchmark(
    const std::string& benchmark) const {
  for (const auto& b : benchmarks)
    if (b.name == benchmark) return &b;
  return nullptr;
}

BenchmarkSpec SuiteDefinition::spec_for(const std::string& benchmark,
                                        Strategy strategy) const {
  const BenchmarkDef* bd = find_benchmark(benchmark);
  if (!bd)
    throw HarnessError{"unknown benchmark '" + benchmark + "' in suite " + name};
  bool allowed = false;
  for (auto k : bd->strategies)
    if (k == strategy.kind) allowed = true;
  if (!allowed)
    throw HarnessError{std::string("strategy ") + strategy_name(strategy.kind) +
                       " not available for benchmark " + benchmark};
  if (strategy.kind == Strategy::Kind::ManualPollute &&
      strategy.setupFunctionId < 0)
    strategy.setupFunctionId = polluteSetupId;

  BenchmarkSpec spec;
  spec.program = &program;
  spec.targetFunctionId = bd->targetFunctionId;
  spec.inputGenerator = bd->inputGenerator;
  spec.parameterValues = strategy.kind == Strategy::Kind::TraceReplay
                             ? std::vector<int64_t>{0}
                             : bd->parameterValues;
  spec.strategy = std::move(strategy);
  apply_config(defaults, spec);
  return spec;
}

// ---------------------------------------------------------------------------
// hashcode suite

namespace {

constexpr FunctionId kHashBaseline = 0;
constexpr FunctionId kHashFt32 = 1;

// Invokes both hash targets once per length 0..33: lengths 0..32 hit every
// switch arm, 33 takes the default loop.
Function make_pollute_hashes() {
  Expr body = seq({
      set(0, cst(0)),
      loop(lt(get(0), cst(34)),
           seq({
               call(kHashBaseline, {anew(get(0))}),
               call(kHashFt32, {anew(get(0))}),
               inc_local(0),
           })),
      ret(cst(0)),
  });
  return function("pollute_hashes", 0, 1, std::move(body));
}

// Short-skewed lengths: a 16-slot cycle dominated by length 1.
Function make_workload_short() {
  static const int kTable[16] = {1, 1, 1, 1, 1, 1, 1, 1,
                                 2, 2, 2, 2, 3, 3, 4, 6};
  std::vector<Arm> arms;
  for (int r = 0; r < 16; ++r) arms.push_back({r, cst(kTable[r])});
  Expr body = seq({
      set(0, cst(0)),
      loop(lt(get(0), cst(256)),
           seq({
               set(1, swtch(band(get(0), cst(15)), std::move(arms), cst(1),
                            false)),
               call(kHashBaseline, {anew(get(1))}),
               inc_local(0),
           })),
      ret(cst(0)),
  });
  return function("workload_short", 0, 2, std::move(body));
}

// Uniform 1..64 plus a forced mode: every fourth op repeats length 7.
Function make_workload_uniform() {
  Expr body = seq({
      set(0, cst(0)),
      loop(lt(get(0), cst(256)),
           seq({
               call(kHashBaseline, {anew(add(band(get(0), cst(63)), cst(1)))}),
               ifx(eq(band(get(0), cst(3)), cst(0)),
                   call(kHashBaseline, {anew(cst(7))}), cst(0)),
               inc_local(0),
           })),
      ret(cst(0)),
  });
  return function("workload_uniform", 0, 1, std::move(body));
}

// Two clusters, short around 8 (with jitter to 6 and 10) and long at 48;
// the long cluster carries the larger mass, so 48 is the modal length.
Function make_workload_bimodal() {
  std::vector<Arm> arms;
  arms.push_back({0, call(kHashBaseline, {anew(cst(6))})});
  arms.push_back({1, call(kHashBaseline, {anew(cst(10))})});
  for (int r = 2; r <= 5; ++r)
    arms.push_back({r, call(kHashBaseline, {anew(cst(8))})});
  Expr body = seq({
      set(0, cst(0)),
      loop(lt(get(0), cst(256)),
           seq({
               swtch(band(get(0), cst(15)), std::move(arms),
                     call(kHashBaseline, {anew(cst(48))}), false),
               inc_local(0),
           })),
      ret(cst(0)),
  });
  return function("workload_bimodal", 0, 1, std::move(body));
}

}  // namespace

SuiteDefinition suite_hashcode() {
  SuiteDefinition s;
  s.name = "hashcode";
  s.program = assemble({
      build_hash_baseline(),
      build_hash_ft32(),
      make_pollute_hashes(),
      make_workload_short(),
      make_workload_uniform(),
      make_workload_bimodal(),
  });
  s.polluteSetupId = 2;
  s.traceWorkloads = {{"short", 3}, {"uniform", 4}, {"bimodal", 5}};

  std::vector<int64_t> lengths;
  for (int64_t l = 1; l <= 64; ++l) lengths.push_back(l);
  std::vector<Strategy::Kind> all = {Strategy::Kind::DoNothing,
                                     Strategy::Kind::ManualPollute,
                                     Strategy::Kind::TraceReplay};
  s.benchmarks.push_back(
      {"baseline", kHashBaseline, lengths, all, byte_array_generator()});
  s.benchmarks.push_back(
      {"ft32", kHashFt32, lengths, all, byte_array_generator()});
  return s;
}

// ---------------------------------------------------------------------------
// stream suite

namespace {

constexpr FunctionId kLibMap = 0;
constexpr FunctionId kLibFilter = 1;
constexpr FunctionId kLibReduce = 2;
constexpr FunctionId kOpInc = 3;
constexpr FunctionId kOpDbl = 4;
constexpr FunctionId kOpNeg = 5;
constexpr FunctionId kOpIsPos = 6;
constexpr FunctionId kOpIsEven = 7;
constexpr FunctionId kOpNonzero = 8;
constexpr FunctionId kOpSum = 9;
constexpr FunctionId kOpMax = 10;
constexpr FunctionId kOpMin = 11;

// locals: 0=arr 1=f 2=i 3=n 4=out 5..7 checksum scratch
Function make_lib_map() {
  Expr body = seq({
      set(3, len(get(0))),
      set(4, anew(get(3))),
      set(2, cst(0)),
      set(5, band(add(mul(get(3), cst(31)), cst(17)), cst(1023))),
      set(6, band(add(shl(get(5), cst(3)), sub(get(3), cst(1))), cst(4095))),
      set(7, band(add(mul(get(6), cst(13)), shl(get(3), cst(2))), cst(8191))),
      set(5, band(add(mul(get(7), cst(7)), add(get(3), cst(3))), cst(2047))),
      set(6, band(add(get(5), shl(get(7), cst(1))), cst(1023))),
      loop(lt(get(2), get(3)),
           seq({
               aset(get(4), get(2), calli(get(1), {aget(get(0), get(2))})),
               inc_local(2),
           })),
      ret(get(4)),
  });
  return function("lib_map", 2, 8, std::move(body));
}

// locals: 0=arr 1=f 2=i 3=n 4=out 5=j 6=v 7 scratch
Function make_lib_filter() {
  Expr body = seq({
      set(3, len(get(0))),
      set(4, anew(get(3))),
      set(2, cst(0)),
      set(5, cst(0)),
      set(7, band(add(mul(get(3), cst(19)), cst(23)), cst(1023))),
      set(7, band(add(shl(get(7), cst(2)), sub(get(3), cst(2))), cst(4095))),
      set(7, band(add(mul(get(7), cst(11)), get(3)), cst(8191))),
      set(7, band(add(get(7), shl(get(3), cst(3))), cst(2047))),
      loop(lt(get(2), get(3)),
           seq({
               set(6, aget(get(0), get(2))),
               ifx(calli(get(1), {get(6)}),
                   seq({aset(get(4), get(5), get(6)), inc_local(5)}), cst(0)),
               inc_local(2),
           })),
      ret(get(4)),
  });
  return function("lib_filter", 2, 8, std::move(body));
}

// locals: 0=arr 1=f 2=acc 3=i 4=n 5..6 scratch
Function make_lib_reduce() {
  Expr body = seq({
      set(4, len(get(0))),
      set(3, cst(0)),
      set(5, band(add(mul(get(4), cst(37)), cst(29)), cst(1023))),
      set(6, band(add(shl(get(5), cst(1)), sub(get(4), cst(3))), cst(4095))),
      set(5, band(add(mul(get(6), cst(5)), get(4)), cst(8191))),
      set(6, band(add(get(5), shl(get(4), cst(4))), cst(2047))),
      set(5, band(add(mul(get(6), cst(3)), cst(41)), cst(1023))),
      loop(lt(get(3), get(4)),
           seq({
               set(2, calli(get(1), {get(2), aget(get(0), get(3))})),
               inc_local(3),
           })),
      ret(get(2)),
  });
  return function("lib_reduce", 3, 7, std::move(body));
}

Function make_query(const std::string& name, Expr body) {
  return function(name, 1, 1, std::move(body));
}

Function make_pollute_streams() {
  Expr body = seq({
      set(0, anew(cst(16))),
      call(kLibMap, {get(0), fref(kOpInc)}),
      call(kLibMap, {get(0), fref(kOpDbl)}),
      call(kLibMap, {get(0), fref(kOpNeg)}),
      call(kLibFilter, {get(0), fref(kOpIsPos)}),
      call(kLibFilter, {get(0), fref(kOpIsEven)}),
      call(kLibFilter, {get(0), fref(kOpNonzero)}),
      call(kLibReduce, {get(0), fref(kOpSum), cst(0)}),
      call(kLibReduce, {get(0), fref(kOpMax), cst(0)}),
      call(kLibReduce, {get(0), fref(kOpMin), cst(0)}),
      ret(cst(0)),
  });
  return function("pollute_streams", 0, 1, std::move(body));
}

}  // namespace

SuiteDefinition suite_stream() {
  SuiteDefinition s;
  s.name = "stream";
  std::vector<Function> fns;
  fns.push_back(make_lib_map());
  fns.push_back(make_lib_filter());
  fns.push_back(make_lib_reduce());
  fns.push_back(function("op_inc", 1, 1, ret(add(get(0), cst(1)))));
  fns.push_back(function("op_dbl", 1, 1, ret(mul(get(0), cst(2)))));
  fns.push_back(function("op_neg", 1, 1, ret(sub(cst(0), get(0)))));
  fns.push_back(function("op_is_pos", 1, 1, ret(lt(cst(0), get(0)))));
  fns.push_back(
      function("op_is_even", 1, 1, ret(sub(cst(1), band(get(0), cst(1))))));
  fns.push_back(
      function("op_nonzero", 1, 1, ret(sub(cst(1), eq(get(0), cst(0))))));
  fns.push_back(function("op_sum", 2, 2, ret(add(get(0), get(1)))));
  fns.push_back(
      function("op_max", 2, 2, ret(ifx(lt(get(0), get(1)), get(1), get(0)))));
  fns.push_back(
      function("op_min", 2, 2, ret(ifx(lt(get(1), get(0)), get(1), get(0)))));
  fns.push_back(make_query(
      "sum_inc", ret(call(kLibReduce, {call(kLibMap, {get(0), fref(kOpInc)}),
                                       fref(kOpSum), cst(0)}))));
  fns.push_back(make_query(
      "sum_pos", ret(call(kLibReduce, {call(kLibFilter, {get(0), fref(kOpIsPos)}),
                                       fref(kOpSum), cst(0)}))));
  fns.push_back(make_query(
      "max_dbl", ret(call(kLibReduce, {call(kLibMap, {get(0), fref(kOpDbl)}),
                                       fref(kOpMax), cst(-128)}))));
  fns.push_back(make_query(
      "sum_even",
      ret(call(kLibReduce, {call(kLibFilter, {get(0), fref(kOpIsEven)}),
                            fref(kOpSum), cst(0)}))));
  fns.push_back(make_query(
      "sum_neg_pos",
      ret(call(kLibReduce,
               {call(kLibMap, {call(kLibFilter, {get(0), fref(kOpIsPos)}),
                               fref(kOpNeg)}),
                fref(kOpSum), cst(0)}))));
  fns.push_back(make_query(
      "min_plain",
      ret(call(kLibReduce, {get(0), fref(kOpMin), cst(127)}))));
  fns.push_back(make_pollute_streams());

  s.program = assemble(std::move(fns));
  s.polluteSetupId = 18;

  std::vector<int64_t> sizes = {256, 1024, 4096};
  std::vector<Strategy::Kind> strategies = {Strategy::Kind::DoNothing,
                                            Strategy::Kind::ManualPollute};
  for (FunctionId q = 12; q <= 17; ++q)
    s.benchmarks.push_back({s.program.functions[q].name, q, sizes, strategies,
                            byte_array_generator()});
  return s;
}

// ---------------------------------------------------------------------------
// collections suite
//
// Map tables are 16*n bytes (4-byte slots [hi, lo, val, 0]); set tables are
// 8*n bytes (2-byte slots [hi, lo]). Keys are hi*128 + lo with hi >= 1, so a
// zero hi byte marks an empty slot. The home slot is (key*stride) & (len -
// stride); probing advances one slot with the same mask.

namespace {

constexpr FunctionId kMapPut = 0;
constexpr FunctionId kMapGet = 1;
constexpr FunctionId kMapPutAll = 2;
constexpr FunctionId kMapIterate = 3;
constexpr FunctionId kSetAdd = 4;
constexpr FunctionId kSetContains = 5;
constexpr FunctionId kSetAddAll = 6;
constexpr FunctionId kSetIterate = 7;
constexpr FunctionId kFillMap = 8;
constexpr FunctionId kFillSet = 9;
constexpr FunctionId kLookupMap = 10;
constexpr FunctionId kLookupSet = 11;
constexpr FunctionId kMapPutC = 12;
constexpr FunctionId kMapGetC = 13;
constexpr FunctionId kMapPutAllC = 14;
constexpr FunctionId kMapIterateC = 15;
constexpr FunctionId kSetAddC = 16;
constexpr FunctionId kSetContainsC = 17;
constexpr FunctionId kSetAddAllC = 18;
constexpr FunctionId kSetIterateC = 19;
constexpr FunctionId kFillMapC = 20;
constexpr FunctionId kFillSetC = 21;
constexpr FunctionId kBenchBase = 22;  // 16 bench targets follow
constexpr FunctionId kCollectionsInit = 38;

// locals: 0=t 1=hi 2=lo 3=val 4=idx 5=mask 6..7 scratch
Function make_map_put(const std::string& name) {
  Expr body = seq({
      ifx(lt(cst(0), get(1)), cst(0), ret(cst(-1))),
      set(5, sub(len(get(0)), cst(4))),
      set(4, band(mul(add(mul(get(1), cst(128)), get(2)), cst(4)), get(5))),
      set(6, band(add(mul(get(4), cst(13)), get(5)), cst(8191))),
      set(7, band(add(shl(get(6), cst(2)), get(1)), cst(4095))),
      set(6, band(add(mul(get(7), cst(7)), get(2)), cst(2047))),
      loop(band(lt(cst(0), aget(get(0), get(4))),
                sub(cst(1),
                    band(eq(aget(get(0), get(4)), get(1)),
                         eq(aget(get(0), add(get(4), cst(1))), get(2))))),
           set(4, band(add(get(4), cst(4)), get(5)))),
      ifx(lt(cst(0), aget(get(0), get(4))),
          seq({aset(get(0), add(get(4), cst(2)), get(3)), ret(cst(0))}),
          seq({aset(get(0), get(4), get(1)),
               aset(get(0), add(get(4), cst(1)), get(2)),
               aset(get(0), add(get(4), cst(2)), get(3)), ret(cst(1))})),
  });
  return function(name, 4, 8, std::move(body));
}

// locals: 0=t 1=hi 2=lo 3=idx 4=mask 5..6 scratch
Function make_map_get(const std::string& name) {
  Expr body = seq({
      ifx(lt(cst(0), get(1)), cst(0), ret(cst(-1))),
      set(4, sub(len(get(0)), cst(4))),
      set(3, band(mul(add(mul(get(1), cst(128)), get(2)), cst(4)), get(4))),
      set(5, band(add(mul(get(3), cst(11)), get(4)), cst(8191))),
      set(6, band(add(shl(get(5), cst(3)), get(2)), cst(4095))),
      set(5, band(add(get(6), mul(get(1), cst(5))), cst(2047))),
      loop(band(lt(cst(0), aget(get(0), get(3))),
                sub(cst(1),
                    band(eq(aget(get(0), get(3)), get(1)),
                         eq(aget(get(0), add(get(3), cst(1))), get(2))))),
           set(3, band(add(get(3), cst(4)), get(4)))),
      ifx(lt(cst(0), aget(get(0), get(3))),
          ret(aget(get(0), add(get(3), cst(2)))), ret(cst(-1))),
  });
  return function(name, 3, 7, std::move(body));
}

// locals: 0=dst 1=src 2=idx 3=n 4=cnt 5..6 scratch
Function make_map_put_all(const std::string& name, FunctionId putId) {
  Expr body = seq({
      set(3, len(get(1))),
      set(2, cst(0)),
      set(4, cst(0)),
      set(5, band(add(mul(get(3), cst(29)), cst(7)), cst(8191))),
      set(6, band(add(shl(get(5), cst(1)), get(3)), cst(4095))),
      set(5, band(add(mul(get(6), cst(3)), cst(11)), cst(2047))),
      loop(lt(get(2), get(3)),
           seq({
               ifx(lt(cst(0), aget(get(1), get(2))),
                   seq({call(putId,
                             {get(0), aget(get(1), get(2)),
                              aget(get(1), add(get(2), cst(1))),
                              aget(get(1), add(get(2), cst(2)))}),
                        inc_local(4)}),
                   cst(0)),
               set(2, add(get(2), cst(4))),
           })),
      ret(get(4)),
  });
  return function(name, 2, 7, std::move(body));
}

// locals: 0=t 1=idx 2=n 3=s 4..5 scratch
Function make_map_iterate(const std::string& name) {
  Expr body = seq({
      set(2, len(get(0))),
      set(1, cst(0)),
      set(3, cst(0)),
      set(4, band(add(mul(get(2), cst(23)), cst(5)), cst(8191))),
      set(5, band(add(shl(get(4), cst(2)), get(2)), cst(4095))),
      set(4, band(add(mul(get(5), cst(9)), cst(3)), cst(2047))),
      set(5, band(add(get(4), shl(get(2), cst(1))), cst(1023))),
      loop(lt(get(1), get(2)),
           seq({
               ifx(lt(cst(0), aget(get(0), get(1))),
                   set(3, add(get(3), aget(get(0), add(get(1), cst(2))))),
                   cst(0)),
               set(1, add(get(1), cst(4))),
           })),
      ret(get(3)),
  });
  return function(name, 1, 6, std::move(body));
}

// locals: 0=t 1=hi 2=lo 3=idx 4=mask 5..6 scratch
Function make_set_add(const std::string& name) {
  Expr body = seq({
      ifx(lt(cst(0), get(1)), cst(0), ret(cst(-1))),
      set(4, sub(len(get(0)), cst(2))),
      set(3, band(mul(add(mul(get(1), cst(128)), get(2)), cst(2)), get(4))),
      set(5, band(add(mul(get(3), cst(17)), get(4)), cst(8191))),
      set(6, band(add(shl(get(5), cst(2)), get(1)), cst(4095))),
      set(5, band(add(get(6), mul(get(2), cst(3))), cst(2047))),
      loop(band(lt(cst(0), aget(get(0), get(3))),
                sub(cst(1),
                    band(eq(aget(get(0), get(3)), get(1)),
                         eq(aget(get(0), add(get(3), cst(1))), get(2))))),
           set(3, band(add(get(3), cst(2)), get(4)))),
      ifx(lt(cst(0), aget(get(0), get(3))), ret(cst(0)),
          seq({aset(get(0), get(3), get(1)),
               aset(get(0), add(get(3), cst(1)), get(2)), ret(cst(1))})),
  });
  return function(name, 3, 7, std::move(body));
}

// locals: 0=t 1=hi 2=lo 3=idx 4=mask 5..6 scratch
Function make_set_contains(const std::string& name) {
  Expr body = seq({
      ifx(lt(cst(0), get(1)), cst(0), ret(cst(-1))),
      set(4, sub(len(get(0)), cst(2))),
      set(3, band(mul(add(mul(get(1), cst(128)), get(2)), cst(2)), get(4))),
      set(5, band(add(mul(get(3), cst(19)), get(4)), cst(8191))),
      set(6, band(add(shl(get(5), cst(1)), get(2)), cst(4095))),
      set(5, band(add(get(6), mul(get(1), cst(9))), cst(2047))),
      loop(band(lt(cst(0), aget(get(0), get(3))),
                sub(cst(1),
                    band(eq(aget(get(0), get(3)), get(1)),
                         eq(aget(get(0), add(get(3), cst(1))), get(2))))),
           set(3, band(add(get(3), cst(2)), get(4)))),
      ifx(lt(cst(0), aget(get(0), get(3))), ret(cst(1)), ret(cst(0))),
  });
  return function(name, 3, 7, std::move(body));
}

// locals: 0=dst 1=src 2=idx 3=n 4=cnt 5..6 scratch
Function make_set_add_all(const std::string& name, FunctionId addId) {
  Expr body = seq({
      set(3, len(get(1))),
      set(2, cst(0)),
      set(4, cst(0)),
      set(5, band(add(mul(get(3), cst(31)), cst(13)), cst(8191))),
      set(6, band(add(shl(get(5), cst(2)), get(3)), cst(4095))),
      set(5, band(add(mul(get(6), cst(5)), cst(17)), cst(2047))),
      set(6, band(add(get(5), shl(get(3), cst(1))), cst(1023))),
      loop(lt(get(2), get(3)),
           seq({
               ifx(lt(cst(0), aget(get(1), get(2))),
                   seq({call(addId,
                             {get(0), aget(get(1), get(2)),
                              aget(get(1), add(get(2), cst(1)))}),
                        inc_local(4)}),
                   cst(0)),
               set(2, add(get(2), cst(2))),
           })),
      ret(get(4)),
  });
  return function(name, 2, 7, std::move(body));
}

// locals: 0=t 1=idx 2=n 3=s 4..5 scratch
Function make_set_iterate(const std::string& name) {
  Expr body = seq({
      set(2, len(get(0))),
      set(1, cst(0)),
      set(3, cst(0)),
      set(4, band(add(mul(get(2), cst(27)), cst(3)), cst(8191))),
      set(5, band(add(shl(get(4), cst(1)), get(2)), cst(4095))),
      set(4, band(add(mul(get(5), cst(7)), cst(9)), cst(2047))),
      set(5, band(add(get(4), shl(get(2), cst(2))), cst(1023))),
      loop(lt(get(1), get(2)),
           seq({
               ifx(lt(cst(0), aget(get(0), get(1))),
                   set(3, add(get(3), aget(get(0), add(get(1), cst(1))))),
                   cst(0)),
               set(1, add(get(1), cst(2))),
           })),
      ret(get(3)),
  });
  return function(name, 1, 6, std::move(body));
}

// Inserts `count` keys starting at key index `skip` (key = 128 + k) by
// walking the digit pairs in order. locals: 3=hi 4=lo 5=k 6=end
Function make_fill_map(const std::string& name, FunctionId putId) {
  Expr body = seq({
      set(5, cst(0)),
      set(6, add(get(1), get(2))),
      set(3, cst(1)),
      loop(band(lt(get(5), get(6)), lt(get(3), cst(128))),
           seq({
               set(4, cst(0)),
               loop(band(lt(get(4), cst(128)), lt(get(5), get(6))),
                    seq({
                        ifx(sub(cst(1), lt(get(5), get(2))),
                            call(putId, {get(0), get(3), get(4),
                                         band(get(5), cst(127))}),
                            cst(0)),
                        inc_local(5),
                        inc_local(4),
                    })),
               inc_local(3),
           })),
      ret(get(5)),
  });
  return function(name, 3, 7, std::move(body));
}

Function make_fill_set(const std::string& name, FunctionId addId) {
  Expr body = seq({
      set(5, cst(0)),
      set(6, add(get(1), get(2))),
      set(3, cst(1)),
      loop(band(lt(get(5), get(6)), lt(get(3), cst(128))),
           seq({
               set(4, cst(0)),
               loop(band(lt(get(4), cst(128)), lt(get(5), get(6))),
                    seq({
                        ifx(sub(cst(1), lt(get(5), get(2))),
                            call(addId, {get(0), get(3), get(4)}), cst(0)),
                        inc_local(5),
                        inc_local(4),
                    })),
               inc_local(3),
           })),
      ret(get(5)),
  });
  return function(name, 3, 7, std::move(body));
}

// Looks up `count` keys starting at key index `skip`; returns a checksum of
// the results. locals: 3=hi 4=lo 5=k 6=end 7=s
Function make_lookup_map(const std::string& name, FunctionId getId) {
  Expr body = seq({
      set(5, cst(0)),
      set(6, add(get(1), get(2))),
      set(3, cst(1)),
      set(7, cst(0)),
      loop(band(lt(get(5), get(6)), lt(get(3), cst(128))),
           seq({
               set(4, cst(0)),
               loop(band(lt(get(4), cst(128)), lt(get(5), get(6))),
                    seq({
                        ifx(sub(cst(1), lt(get(5), get(2))),
                            set(7, add(get(7),
                                       call(getId, {get(0), get(3), get(4)}))),
                            cst(0)),
                        inc_local(5),
                        inc_local(4),
                    })),
               inc_local(3),
           })),
      ret(get(7)),
  });
  return function(name, 3, 8, std::move(body));
}

Function make_lookup_set(const std::string& name, FunctionId containsId) {
  return make_lookup_map(name, containsId);
}

Function make_bench_populate(const std::string& name, FunctionId fillId,
                             int64_t bytesPerElem) {
  Expr body = seq({
      set(1, anew(mul(get(0), cst(bytesPerElem)))),
      ret(call(fillId, {get(1), get(0), cst(0)})),
  });
  return function(name, 1, 2, std::move(body));
}

// params: (table, queries); queries holds interleaved hi,lo digit pairs.
Function make_bench_contains(const std::string& name, FunctionId getId) {
  Expr body = seq({
      set(3, len(get(1))),
      set(2, cst(0)),
      set(4, cst(0)),
      loop(lt(get(2), get(3)),
           seq({
               set(4, add(get(4),
                          call(getId, {get(0), aget(get(1), get(2)),
                                       aget(get(1), add(get(2), cst(1)))}))),
               set(2, add(get(2), cst(2))),
           })),
      ret(get(4)),
  });
  return function(name, 2, 5, std::move(body));
}

Function make_bench_copy(const std::string& name, FunctionId putAllId) {
  Expr body = seq({
      set(1, anew(len(get(0)))),
      ret(call(putAllId, {get(1), get(0)})),
  });
  return function(name, 1, 2, std::move(body));
}

Function make_bench_iterate(const std::string& name, FunctionId iterId) {
  return function(name, 1, 1, ret(call(iterId, {get(0)})));
}

// Broad usage of the stdlib variants only: two table sizes, overwrites,
// colliding keys (key + slot count hashes to the same home slot), hit and
// miss lookups, invalid keys, bulk copies and iteration.
Function make_collections_init() {
  auto n = [](int64_t v) { return cst(v); };
  Expr body = seq({
      // map with 8 elements: 128 bytes, 32 slots
      set(0, anew(n(128))),
      call(kFillMap, {get(0), n(8), n(0)}),
      call(kFillMap, {get(0), n(8), n(0)}),
      call(kFillMap, {get(0), n(8), n(32)}),
      call(kLookupMap, {get(0), n(16), n(0)}),
      call(kLookupMap, {get(0), n(16), n(64)}),
      call(kMapPut, {get(0), n(0), n(5), n(1)}),
      call(kMapGet, {get(0), n(0), n(5)}),
      set(1, anew(n(128))),
      call(kMapPutAll, {get(1), get(0)}),
      call(kMapIterate, {get(0)}),
      call(kMapIterate, {get(1)}),
      // map with 32 elements: 512 bytes, 128 slots
      set(2, anew(n(512))),
      call(kFillMap, {get(2), n(32), n(0)}),
      call(kFillMap, {get(2), n(32), n(0)}),
      call(kFillMap, {get(2), n(32), n(128)}),
      call(kLookupMap, {get(2), n(64), n(0)}),
      call(kLookupMap, {get(2), n(64), n(256)}),
      set(3, anew(n(512))),
      call(kMapPutAll, {get(3), get(2)}),
      call(kMapIterate, {get(2)}),
      call(kMapIterate, {get(3)}),
      // set with 8 elements: 64 bytes, 32 slots
      set(4, anew(n(64))),
      call(kFillSet, {get(4), n(8), n(0)}),
      call(kFillSet, {get(4), n(8), n(0)}),
      call(kFillSet, {get(4), n(8), n(32)}),
      call(kLookupSet, {get(4), n(16), n(0)}),
      call(kLookupSet, {get(4), n(16), n(64)}),
      call(kSetAdd, {get(4), n(0), n(5)}),
      call(kSetContains, {get(4), n(0), n(5)}),
      set(5, anew(n(64))),
      call(kSetAddAll, {get(5), get(4)}),
      call(kSetIterate, {get(4)}),
      call(kSetIterate, {get(5)}),
      // set with 32 elements: 256 bytes, 128 slots
      set(6, anew(n(256))),
      call(kFillSet, {get(6), n(32), n(0)}),
      call(kFillSet, {get(6), n(32), n(0)}),
      call(kFillSet, {get(6), n(32), n(128)}),
      call(kLookupSet, {get(6), n(64), n(0)}),
      call(kLookupSet, {get(6), n(64), n(256)}),
      set(7, anew(n(256))),
      call(kSetAddAll, {get(7), get(6)}),
      call(kSetIterate, {get(6)}),
      call(kSetIterate, {get(7)}),
      ret(cst(0)),
  });
  return function("collections_init", 0, 8, std::move(body));
}

InputGenerator int_param_generator() {
  return [](int64_t param, int64_t, uint64_t) {
    return std::vector<Value>{Value::from_int(param)};
  };
}

// Tables are read-only for the CONTAINS/COPY/ITERATE targets, so one shared
// instance per parameter is safe and keeps op setup cheap.
InputGenerator table_generator(bool isMap, bool withQueries) {
  auto cache = std::make_shared<std::map<int64_t, std::vector<Value>>>();
  return [=](int64_t param, int64_t, uint64_t) {
    auto it = cache->find(param);
    if (it == cache->end()) {
      std::vector<Value> args;
      args.push_back(Value::from_bytes(isMap
                                           ? collections_ref::build_map(param)
                                           : collections_ref::build_set(param)));
      if (withQueries)
        args.push_back(
            Value::from_bytes(collections_ref::contains_queries(param)));
      it = cache->emplace(param, std::move(args)).first;
    }
    return it->second;
  };
}

}  // namespace

SuiteDefinition suite_collections() {
  SuiteDefinition s;
  s.name = "collections";
  std::vector<Function> fns;
  fns.push_back(make_map_put("map_put"));
  fns.push_back(make_map_get("map_get"));
  fns.push_back(make_map_put_all("map_put_all", kMapPut));
  fns.push_back(make_map_iterate("map_iterate"));
  fns.push_back(make_set_add("set_add"));
  fns.push_back(make_set_contains("set_contains"));
  fns.push_back(make_set_add_all("set_add_all", kSetAdd));
  fns.push_back(make_set_iterate("set_iterate"));
  fns.push_back(make_fill_map("fill_map", kMapPut));
  fns.push_back(make_fill_set("fill_set", kSetAdd));
  fns.push_back(make_lookup_map("lookup_map", kMapGet));
  fns.push_back(make_lookup_set("lookup_set", kSetContains));
  fns.push_back(make_map_put("map_put_clone"));
  fns.push_back(make_map_get("map_get_clone"));
  fns.push_back(make_map_put_all("map_put_all_clone", kMapPutC));
  fns.push_back(make_map_iterate("map_iterate_clone"));
  fns.push_back(make_set_add("set_add_clone"));
  fns.push_back(make_set_contains("set_contains_clone"));
  fns.push_back(make_set_add_all("set_add_all_clone", kSetAddC));
  fns.push_back(make_set_iterate("set_iterate_clone"));
  fns.push_back(make_fill_map("fill_map_clone", kMapPutC));
  fns.push_back(make_fill_set("fill_set_clone", kSetAddC));
  fns.push_back(make_bench_populate("bench_map_populate_std", kFillMap, 16));
  fns.push_back(make_bench_populate("bench_map_populate_clone", kFillMapC, 16));
  fns.push_back(make_bench_contains("bench_map_contains_std", kMapGet));
  fns.push_back(make_bench_contains("bench_map_contains_clone", kMapGetC));
  fns.push_back(make_bench_copy("bench_map_copy_std", kMapPutAll));
  fns.push_back(make_bench_copy("bench_map_copy_clone", kMapPutAllC));
  fns.push_back(make_bench_iterate("bench_map_iterate_std", kMapIterate));
  fns.push_back(make_bench_iterate("bench_map_iterate_clone", kMapIterateC));
  fns.push_back(make_bench_populate("bench_set_populate_std", kFillSet, 8));
  fns.push_back(make_bench_populate("bench_set_populate_clone", kFillSetC, 8));
  fns.push_back(make_bench_contains("bench_set_contains_std", kSetContains));
  fns.push_back(
      make_bench_contains("bench_set_contains_clone", kSetContainsC));
  fns.push_back(make_bench_copy("bench_set_copy_std", kSetAddAll));
  fns.push_back(make_bench_copy("bench_set_copy_clone", kSetAddAllC));
  fns.push_back(make_bench_iterate("bench_set_iterate_std", kSetIterate));
  fns.push_back(make_bench_iterate("bench_set_iterate_clone", kSetIterateC));
  fns.push_back(make_collections_init());

  s.program = assemble(std::move(fns), kCollectionsInit);
  s.defaults.withInit = true;

  std::vector<int64_t> counts = {64, 256, 1024};
  std::vector<Strategy::Kind> dn = {Strategy::Kind::DoNothing};
  struct Entry {
    const char* name;
    FunctionId id;
    InputGenerator gen;
  };
  std::vector<Entry> entries = {
      {"map_populate_std", kBenchBase + 0, int_param_generator()},
      {"map_populate_clone", kBenchBase + 1, int_param_generator()},
      {"map_contains_std", kBenchBase + 2, table_generator(true, true)},
      {"map_contains_clone", kBenchBase + 3, table_generator(true, true)},
      {"map_copy_std", kBenchBase + 4, table_generator(true, false)},
      {"map_copy_clone", kBenchBase + 5, table_generator(true, false)},
      {"map_iterate_std", kBenchBase + 6, table_generator(true, false)},
      {"map_iterate_clone", kBenchBase + 7, table_generator(true, false)},
      {"set_populate_std", kBenchBase + 8, int_param_generator()},
      {"set_populate_clone", kBenchBase + 9, int_param_generator()},
      {"set_contains_std", kBenchBase + 10, table_generator(false, true)},
      {"set_contains_clone", kBenchBase + 11, table_generator(false, true)},
      {"set_copy_std", kBenchBase + 12, table_generator(false, false)},
      {"set_copy_clone", kBenchBase + 13, table_generator(false, false)},
      {"set_iterate_std", kBenchBase + 14, table_generator(false, false)},
      {"set_iterate_clone", kBenchBase + 15, table_generator(false, false)},
  };
  for (auto& e : entries)
    s.benchmarks.push_back({e.name, e.id, counts, dn, std::move(e.gen)});
  return s;
}

SuiteDefinition make_suite(const std::string& name) {
  if (name == "hashcode") return suite_hashcode();
  if (name == "stream") return suite_stream();
  if (name == "collections") return suite_collections();
  throw HarnessError{"unknown suite '" + name + "'"};
}

std::vector<std::string> suite_names() {
  return {"hashcode", "stream", "collections"};
}

// ---------------------------------------------------------------------------
// host-side reference model of the collections tables

namespace collections_ref {

namespace {
int64_t home(int hi, int lo, size_t len, int stride) {
  return (int64_t)(((hi * 128 + lo) * stride) & ((int64_t)len - stride));
}
}  // namespace

void map_put(ByteArray& t, int hi, int lo, int val) {
  int64_t mask = (int64_t)t.size() - 4;
  int64_t idx = home(hi, lo, t.size(), 4);
  while (t[idx] != 0 && !(t[idx] == hi && t[idx + 1] == lo))
    idx = (idx + 4) & mask;
  t[idx] = (int8_t)hi;
  t[idx + 1] = (int8_t)lo;
  t[idx + 2] = (int8_t)val;
}

int64_t map_get(const ByteArray& t, int hi, int lo) {
  int64_t mask = (int64_t)t.size() - 4;
  int64_t idx = home(hi, lo, t.size(), 4);
  while (t[idx] != 0 && !(t[idx] == hi && t[idx + 1] == lo))
    idx = (idx + 4) & mask;
  return t[idx] != 0 ? t[idx + 2] : -1;
}

void set_add(ByteArray& t, int hi, int lo) {
  int64_t mask = (int64_t)t.size() - 2;
  int64_t idx = home(hi, lo, t.size(), 2);
  while (t[idx] != 0 && !(t[idx] == hi && t[idx + 1] == lo))
    idx = (idx + 2) & mask;
  t[idx] = (int8_t)hi;
  t[idx + 1] = (int8_t)lo;
}

bool set_contains(const ByteArray& t, int hi, int lo) {
  int64_t mask = (int64_t)t.size() - 2;
  int64_t idx = home(hi, lo, t.size(), 2);
  while (t[idx] != 0 && !(t[idx] == hi && t[idx + 1] == lo))
    idx = (idx + 2) & mask;
  return t[idx] != 0;
}

ByteArray build_map(int64_t elements) {
  ByteArray t((size_t)(16 * elements), 0);
  for (int64_t k = 0; k < elements; ++k) {
    int64_t key = 128 + k;
    map_put(t, (int)(key >> 7), (int)(key & 127), (int)(k & 127));
  }
  return t;
}

ByteArray build_set(int64_t elements) {
  ByteArray t((size_t)(8 * elements), 0);
  for (int64_t k = 0; k < elements; ++k) {
    int64_t key = 128 + k;
    set_add(t, (int)(key >> 7), (int)(key & 127));
  }
  return t;
}

ByteArray contains_queries(int64_t elements) {
  ByteArray q;
  q.reserve((size_t)(2 * elements));
  for (int64_t j = 0; j < elements; ++j) {
    int64_t key = (j % 2 == 0) ? 128 + j : 128 + elements + j;
    q.push_back((int8_t)(key >> 7));
    q.push_back((int8_t)(key & 127));
  }
  return q;
}

}  // namespace collections_ref

}  // namespace specvm
