#include "opsim/xm/machine.hpp"

#include <map>

namespace opsim::xm {

const Function* MachineDef::find_function(const std::string& fn) const {
    for (const auto& f : functions) {
        if (f.name == fn) return &f;
    }
    return nullptr;
}

std::optional<std::string> MachineDef::next_state(const std::string& state, const std::string& fn) const {
    for (const auto& t : transitions) {
        if (t.from == state && t.function == fn) return t.to;
    }
    return std::nullopt;
}

std::vector<std::pair<const Function*, std::string>> MachineDef::outgoing(const std::string& state) const {
    std::vector<std::pair<const Function*, std::string>> out;
    for (const auto& f : functions) {
        if (auto to = next_state(state, f.name)) out.emplace_back(&f, *to);
    }
    return out;
}

Memory MachineDef::initial_memory() const {
    Memory m;
    for (const auto& f : memory) m[f.name] = f.initial;
    return m;
}

std::string XmError::describe() const {
    std::string out = code() + ": " + what();
    if (!machine.empty()) out += " [machine " + machine + "]";
    out += " [state " + state() + "]";
    if (input_index) out += " [input index " + std::to_string(*input_index) + "]";
    return out;
}

NondeterminismError::NondeterminismError(const std::string& state, std::vector<std::string> functions)
    : XmError("E-NONDETERMINISM", [&] {
          std::string names;
          for (const auto& f : functions) names += (names.empty() ? "" : ", ") + f;
          return "functions " + names + " are simultaneously applicable in state '" + state + "'";
      }(), state),
      functions_(std::move(functions)) {}

bool guard_holds(const Function& fn, const EvalContext& ctx) {
    return !fn.guard || evaluate_bool(*fn.guard, ctx);
}

Firing fire(const MachineDef& def, const Function& fn, const std::string& next_state,
            const EvalContext& ctx) {
    Firing out;
    out.function = &fn;
    out.next_state = next_state;
    out.output = fn.output_value ? evaluate(*fn.output_value, ctx) : Value();
    if (out.output.kind() == ValueKind::Sym && !def.outputs.empty() &&
        !def.outputs.contains(out.output.as_symbol())) {
        throw EvalError("function '" + fn.name + "' emitted '" + out.output.as_symbol().name() +
                        "', which is not in the output alphabet");
    }
    out.memory = ctx.memory ? *ctx.memory : Memory{};
    for (const auto& [field, expr] : fn.updates) {
        Value v = evaluate(expr, ctx);
        for (const auto& decl : def.memory) {
            if (decl.name == field && decl.kind != v.kind()) {
                throw EvalError("function '" + fn.name + "' stores a " + kind_name(v.kind()) +
                                " into " + kind_name(decl.kind) + " field '" + field + "'");
            }
        }
        out.memory[field] = std::move(v);
    }
    return out;
}

StepOutcome xm_step(const MachineDef& def, const std::string& state, const Memory& memory, Symbol input,
                    std::int64_t roll) {
    if (!def.inputs.contains(input)) throw InvalidInput(state, input);
    const Value in = Value::symbol(input);
    EvalContext ctx;
    ctx.input = &in;
    ctx.memory = &memory;
    ctx.roll = roll;
    ctx.state = Symbol(state);

    std::vector<std::pair<const Function*, std::string>> enabled;
    for (const auto& [fn, target] : def.outgoing(state)) {
        if (fn->input.kind != Port::Kind::Stream || fn->output.kind != Port::Kind::Stream) continue;
        if (guard_holds(*fn, ctx)) enabled.emplace_back(fn, target);
    }
    if (enabled.empty()) throw NoApplicableFunction(state, "'" + input.name());
    if (enabled.size() > 1) {
        std::vector<std::string> names;
        for (const auto& [fn, target] : enabled) names.push_back(fn->name);
        throw NondeterminismError(state, std::move(names));
    }
    Firing f = fire(def, *enabled.front().first, enabled.front().second, ctx);
    return {f.next_state, std::move(f.memory), std::move(f.output), enabled.front().first->name};
}

StreamResult run_stream(const MachineDef& def, const std::vector<Symbol>& inputs) {
    StreamResult result{{}, def.initial_state, def.initial_memory()};
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        try {
            StepOutcome step = xm_step(def, result.state, result.memory, inputs[i]);
            result.state = std::move(step.state);
            result.memory = std::move(step.memory);
            result.outputs.push_back(std::move(step.output));
        } catch (XmError& e) {
            e.machine = def.name;
            e.input_index = i;
            e.outputs = result.outputs;
            throw;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

namespace {

void check_expr(const Expr& expr, const std::set<std::string>& fields, MachineContext context,
                const std::string& path, std::vector<Issue>& issues) {
    walk(expr, [&](const Expr& e) {
        using K = Expr::Kind;
        if (e.kind == K::Field && !fields.contains(e.name)) {
            issues.push_back({"E-UNDECLARED-FIELD", "memory has no field '" + e.name + "'", path, e.name});
        }
        const bool operas_only = e.kind == K::Peers || e.kind == K::Width || e.kind == K::Height ||
                                 (e.kind == K::Call && e.name == "env");
        if (operas_only && context != MachineContext::Operas) {
            issues.push_back({"E-BAD-CONTEXT", "'" + to_source(e) + "' is only meaningful inside an OPERAS system",
                              path, ""});
        }
    });
}

}  // namespace

std::vector<Issue> validation_issues(const MachineDef& def, MachineContext context,
                                     const std::string& prefix) {
    std::vector<Issue> issues;
    const std::string base = prefix + "machine " + def.name;

    std::set<std::string> states;
    for (const auto& s : def.states) {
        if (!states.insert(s).second) issues.push_back({"E-DUPLICATE", "state '" + s + "' declared twice", base, s});
    }
    if (def.states.empty()) issues.push_back({"E-NO-STATES", "machine declares no states", base, ""});
    if (!states.contains(def.initial_state)) {
        issues.push_back({"E-UNDECLARED-STATE", "initial state '" + def.initial_state + "' is not declared",
                          base + "/initial", def.initial_state});
    }

    std::set<std::string> fields;
    for (const auto& f : def.memory) {
        const std::string path = base + "/field " + f.name;
        if (!fields.insert(f.name).second) {
            issues.push_back({"E-DUPLICATE", "memory field '" + f.name + "' declared twice", path, f.name});
        }
        if (f.initial.kind() != f.kind) {
            issues.push_back({"E-TYPE-MISMATCH",
                              "field '" + f.name + "' is " + kind_name(f.kind) + " but starts as " +
                                  f.initial.to_string(),
                              path, f.name});
        }
    }

    std::set<std::string> functions;
    for (const auto& fn : def.functions) {
        const std::string path = base + "/function " + fn.name;
        if (!functions.insert(fn.name).second) {
            issues.push_back({"E-DUPLICATE", "function '" + fn.name + "' declared twice", path, fn.name});
        }
        for (const Port* port : {&fn.input, &fn.output}) {
            if (port->kind == Port::Kind::Channel && context != MachineContext::Communicating) {
                issues.push_back({"E-BAD-PORT", "channel ports are only available in a cxm system", path, port->channel});
            }
            if (port->kind == Port::Kind::Peer && context != MachineContext::Operas) {
                issues.push_back({"E-BAD-PORT", "peer ports are only available in an OPERAS system", path, "peer"});
            }
        }
        if (!fn.effects.empty() && context != MachineContext::Operas) {
            issues.push_back({"E-BAD-PORT", "environment effects are only available in an OPERAS system", path, ""});
        }
        if (fn.guard) check_expr(*fn.guard, fields, context, path, issues);
        if (fn.output_value) {
            check_expr(*fn.output_value, fields, context, path, issues);
            const Expr& out = *fn.output_value;
            if (out.kind == Expr::Kind::Literal && out.literal.kind() == ValueKind::Sym && !def.outputs.empty() &&
                !def.outputs.contains(out.literal.as_symbol())) {
                issues.push_back({"E-UNDECLARED-SYMBOL",
                                  "output '" + out.literal.as_symbol().name() + "' is not in the output alphabet",
                                  path, out.literal.as_symbol().name()});
            }
        }
        for (const auto& [field, expr] : fn.updates) {
            if (!fields.contains(field)) {
                issues.push_back({"E-UNDECLARED-FIELD", "update of undeclared field '" + field + "'", path, field});
            }
            check_expr(expr, fields, context, path, issues);
        }
        for (const auto& effect : fn.effects) check_expr(effect.amount, fields, context, path, issues);
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < def.transitions.size(); ++i) {
        const Transition& t = def.transitions[i];
        const std::string path = base + "/transition[" + std::to_string(i) + "]";
        for (const std::string* s : {&t.from, &t.to}) {
            if (!states.contains(*s)) {
                issues.push_back({"E-UNDECLARED-STATE", "state '" + *s + "' is not declared", path, *s});
            }
        }
        if (!functions.contains(t.function)) {
            issues.push_back({"E-UNDECLARED-FUNCTION", "function '" + t.function + "' is not declared", path,
                              t.function});
        }
        if (!seen.insert({t.from, t.function}).second) {
            issues.push_back({"E-DUPLICATE",
                              "second transition from '" + t.from + "' via '" + t.function + "'", path,
                              t.function});
        }
    }
    return issues;
}

}  // namespace opsim::xm
