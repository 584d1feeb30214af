#ifndef SPECVM_VM_HPP
#define SPECVM_VM_HPP

#include <map>
#include <unordered_map>

#include "specvm/interp.hpp"
#include "specvm/jit.hpp"

namespace specvm {

struct MethodState {
  enum class Tier : uint8_t { Interpreted, Compiled };
  Tier tier = Tier::Interpreted;
  int compiledVersion = 0;
  uint64_t hotnessAtLastCompile = 0;
  std::optional<uint64_t> pendingRecompileAt;
};

struct CompileEvent {
  FunctionId function;
  int version;
  int64_t codeSize;
  std::vector<Speculation> speculations;
  std::vector<FunctionId> inlinedFunctions;
};

struct DeoptEvent {
  FunctionId function;
  int version;
  int32_t guardId;
  int32_t site;
  SpeculationKind kind;
};

struct InitReport {
  std::vector<std::pair<FunctionId, uint64_t>> functionsTouched;  // fn, hotness
};

// Log streams, enabled via the SPECVM_LOG env var or set_log_streams
// ("compile,deopt,init"); lines go to stderr.
struct LogStreams {
  bool compile = false;
  bool deopt = false;
  bool init = false;
};

LogStreams parse_log_streams(const std::string& spec);

// One tiered VM: profiles, compiled code, blacklist, and the cost ledger for
// a single single-threaded execution. Fresh instances share nothing.
class VmInstance {
 public:
  VmInstance(const Program& program, CostModel model);

  // Tier-dispatched call: interprets cold methods (collecting profiles),
  // compiles at the next entry once hot, executes compiled code, and on a
  // guard failure blacklists the speculation, demotes the method, charges
  // deoptPenalty and re-executes the invocation in the interpreter.
  Value invoke(FunctionId fn, std::vector<Value> args);

  // Runs the program's init function once through invoke, so initialization
  // work itself profiles, compiles and charges cycles.
  InitReport run_init_phase();

  const Program& program() const { return *program_; }
  const CostModel& model() const { return model_; }
  ProfileStore& profiles() { return profiles_; }
  const ProfileStore& profiles() const { return profiles_; }
  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }
  AssumptionBlacklist& blacklist() { return blacklist_; }
  const MethodState& method_state(FunctionId fn) const { return states_.at(fn); }
  const CompiledMethod* compiled_method(FunctionId fn, int version) const;
  const CompiledMethod* current_method(FunctionId fn) const;
  bool init_ran() const { return initRan_; }

  const std::vector<CompileEvent>& compile_events() const { return compileEvents_; }
  const std::vector<DeoptEvent>& deopt_events() const { return deoptEvents_; }

  void set_log_streams(LogStreams s) { log_ = s; }

  // When set, every invoke of `fn` appends an argument descriptor
  // (Int -> value, ByteArray -> length) to `out`.
  void record_calls_into(FunctionId fn, std::vector<std::vector<int64_t>>* out) {
    traceTarget_ = fn;
    traceOut_ = out;
  }

 private:
  void maybe_compile(FunctionId fn);
  Value run_interpreted(FunctionId fn, std::vector<Value> args);
  void handle_deopt(FunctionId fn, const DeoptRequest& d);

  const Program* program_;
  CostModel model_;
  ProfileStore profiles_;
  CostLedger ledger_;
  AssumptionBlacklist blacklist_;
  std::vector<MethodState> states_;
  std::map<std::pair<FunctionId, int>, CompiledMethod> methods_;
  bool initRan_ = false;
  LogStreams log_;
  std::vector<CompileEvent> compileEvents_;
  std::vector<DeoptEvent> deoptEvents_;
  FunctionId traceTarget_ = -1;
  std::vector<std::vector<int64_t>>* traceOut_ = nullptr;
};

// Fresh isolated VM for one benchmark repetition; runs the init phase first
// when requested and the program names an init function.
VmInstance make_fork(const Program& program, const CostModel& model,
                     bool withInit);

}  // namespace specvm

#endif
