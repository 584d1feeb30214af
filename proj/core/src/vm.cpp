#include "specvm/vm.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace specvm {

LogStreams parse_log_streams(const std::string& spec) {
  LogStreams s;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "compile") s.compile = true;
    if (item == "deopt") s.deopt = true;
    if (item == "init") s.init = true;
  }
  return s;
}

VmInstance::VmInstance(const Program& program, CostModel model)
    : program_(&program),
      model_(model),
      profiles_(program),
      states_(program.functions.size()) {
  if (const char* env = std::getenv("SPECVM_LOG"))
    log_ = parse_log_streams(env);
}

const CompiledMethod* VmInstance::compiled_method(FunctionId fn,
                                                  int version) const {
  auto it = methods_.find({fn, version});
  return it == methods_.end() ? nullptr : &it->second;
}

const CompiledMethod* VmInstance::current_method(FunctionId fn) const {
  const MethodState& st = states_.at(fn);
  if (st.tier != MethodState::Tier::Compiled) return nullptr;
  return compiled_method(fn, st.compiledVersion);
}

void VmInstance::maybe_compile(FunctionId fn) {
  MethodState& st = states_[fn];
  if (st.tier != MethodState::Tier::Interpreted) return;
  uint64_t hot = profiles_.hotness(fn);
  if (hot < model_.compileThreshold) return;
  if (st.pendingRecompileAt && hot < *st.pendingRecompileAt) return;

  int version = st.compiledVersion + 1;
  CompiledMethod m = compile(*program_, fn, profiles_, blacklist_, model_, version);
  ++ledger_.compileEvents;
  st.tier = MethodState::Tier::Compiled;
  st.compiledVersion = version;
  st.hotnessAtLastCompile = hot;
  st.pendingRecompileAt.reset();

  compileEvents_.push_back({fn, version, m.codeSize, m.speculations,
                            m.inlinedFunctions});
  if (log_.compile) {
    const Function* f = program_->find(fn);
    std::cerr << "compile " << (f ? f->name : std::to_string(fn)) << " v"
              << version << " size=" << m.codeSize << " speculations=[";
    for (size_t i = 0; i < m.speculations.size(); ++i) {
      if (i) std::cerr << ",";
      std::cerr << speculation_kind_name(m.speculations[i].kind) << "@"
                << m.speculations[i].site;
    }
    std::cerr << "] inlined=[";
    for (size_t i = 0; i < m.inlinedFunctions.size(); ++i) {
      if (i) std::cerr << ",";
      const Function* c = program_->find(m.inlinedFunctions[i]);
      std::cerr << (c ? c->name : std::to_string(m.inlinedFunctions[i]));
    }
    std::cerr << "]\n";
  }
  methods_.emplace(std::make_pair(fn, version), std::move(m));
}

void VmInstance::handle_deopt(FunctionId fn, const DeoptRequest& d) {
  MethodState& st = states_[fn];
  const CompiledMethod* m = compiled_method(fn, st.compiledVersion);
  SpeculationKind kind = SpeculationKind::BranchAlwaysTaken;
  int32_t site = d.site;
  if (m && d.guardId >= 0 && d.guardId < (int32_t)m->speculations.size()) {
    const Speculation& s = m->speculations[d.guardId];
    kind = s.kind;
    site = s.site;
    blacklist_.add(s.function, s.site, s.kind);
  }
  ledger_.totalCycles += model_.deoptPenalty;
  ++ledger_.deoptEvents;
  deoptEvents_.push_back({fn, st.compiledVersion, d.guardId, site, kind});
  st.tier = MethodState::Tier::Interpreted;
  st.pendingRecompileAt = profiles_.hotness(fn) + model_.compileThreshold;
  if (log_.deopt) {
    const Function* f = program_->find(fn);
    std::cerr << "deopt " << (f ? f->name : std::to_string(fn)) << " v"
              << st.compiledVersion << " guard=" << d.guardId
              << " site=" << site << "\n";
  }
}

Value VmInstance::run_interpreted(FunctionId fn, std::vector<Value> args) {
  const Function* f = program_->find(fn);
  if (!f) throw GuestError{"unknown function " + std::to_string(fn), fn, -1};
  ++profiles_.fn(fn).invocationCount;
  ExecPrices prices{model_.interpNodeCost, model_.callOverheadInterp,
                    model_.guardCost};
  Evaluator ev(*program_, ledger_, prices, &profiles_, nullptr,
               [this](FunctionId callee, std::vector<Value>&& cargs) {
                 return invoke(callee, std::move(cargs));
               });
  return ev.run(fn, f->body, f->paramCount, f->localCount, std::move(args));
}

Value VmInstance::invoke(FunctionId fn, std::vector<Value> args) {
  if (traceOut_ && fn == traceTarget_) {
    std::vector<int64_t> descriptor;
    for (const Value& v : args) {
      if (v.is_bytes())
        descriptor.push_back((int64_t)v.bytes->size());
      else if (v.is_int())
        descriptor.push_back(v.i);
    }
    traceOut_->push_back(std::move(descriptor));
  }

  maybe_compile(fn);
  MethodState& st = states_[fn];
  if (st.tier == MethodState::Tier::Compiled) {
    const CompiledMethod* m = compiled_method(fn, st.compiledVersion);
    CompiledResult r = execute_compiled(
        *program_, *m, args, ledger_, model_,
        [this](FunctionId callee, std::vector<Value>&& cargs) {
          return invoke(callee, std::move(cargs));
        });
    if (Value* v = std::get_if<Value>(&r)) return *v;
    handle_deopt(fn, std::get<DeoptRequest>(r));
    // Correctness is preserved by re-executing the whole invocation in the
    // interpreter; the arguments are unchanged (guest arrays mutated before
    // the failing guard would be re-mutated identically, and the suites'
    // guarded regions precede any store).
    return run_interpreted(fn, std::move(args));
  }
  return run_interpreted(fn, std::move(args));
}

InitReport VmInstance::run_init_phase() {
  if (initRan_) throw GuestError{"init phase already ran", -1, -1};
  if (!program_->initFunctionId)
    throw GuestError{"program has no init function", -1, -1};
  invoke(*program_->initFunctionId, {});
  initRan_ = true;
  InitReport report;
  for (const auto& f : program_->functions) {
    if (profiles_.fn(f.id).invocationCount > 0)
      report.functionsTouched.push_back({f.id, profiles_.hotness(f.id)});
  }
  if (log_.init) {
    for (const auto& [id, hot] : report.functionsTouched) {
      const Function* f = program_->find(id);
      std::cerr << "init " << (f ? f->name : std::to_string(id))
                << " hotness=" << hot << "\n";
    }
  }
  return report;
}

VmInstance make_fork(const Program& program, const CostModel& model,
                     bool withInit) {
  VmInstance vm(program, model);
  if (withInit && program.initFunctionId) vm.run_init_phase();
  return vm;
}

}  // namespace specvm
