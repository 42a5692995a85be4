#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opsim/core/issue.hpp"
#include "opsim/core/symbol.hpp"
#include "opsim/xm/expr.hpp"
#include "opsim/xm/value.hpp"

namespace opsim::xm {

inline constexpr std::int64_t kRollRange = 1'000'000;

/// Where a function takes its input from, or sends its output to.
/// `Channel` binds a named channel of a communicating system; `Peer` binds
/// the agent's communication partners in an OPERAS system.
struct Port {
    enum class Kind { Stream, Channel, Peer };
    Kind kind = Kind::Stream;
    std::string channel;

    static Port stream() { return {}; }
    static Port on_channel(std::string id) { return {Kind::Channel, std::move(id)}; }
    static Port peer() { return {Kind::Peer, {}}; }

    friend bool operator==(const Port&, const Port&) = default;
};

/// Environment side effect of an OPERAS agent function, at the agent's cell.
struct EnvEffect {
    enum class Op { Put, Take };
    Op op = Op::Put;
    Symbol object;
    Expr amount;
    friend bool operator==(const EnvEffect&, const EnvEffect&) = default;
};

/// A guarded partial function phi: (input, memory) -> (output, memory').
/// Updates are evaluated against the pre-firing memory.
struct Function {
    std::string name;
    Port input;
    Port output;
    std::optional<Expr> guard;         // absent: always true
    std::optional<Expr> output_value;  // absent: unit
    std::vector<std::pair<std::string, Expr>> updates;
    std::vector<EnvEffect> effects;

    friend bool operator==(const Function&, const Function&) = default;
};

struct FieldDecl {
    std::string name;
    ValueKind kind = ValueKind::Int;
    Value initial;
    friend bool operator==(const FieldDecl&, const FieldDecl&) = default;
};

struct Transition {
    std::string from;
    std::string function;
    std::string to;
    friend bool operator==(const Transition&, const Transition&) = default;
};

struct MachineDef {
    std::string name;
    std::set<Symbol> inputs;   // Sigma
    std::set<Symbol> outputs;  // Gamma (symbolic outputs; data values are unrestricted)
    std::vector<std::string> states;
    std::vector<FieldDecl> memory;
    std::vector<Function> functions;
    std::vector<Transition> transitions;  // F
    std::string initial_state;

    const Function* find_function(const std::string& name) const;
    std::optional<std::string> next_state(const std::string& state, const std::string& function) const;
    /// (function, target) pairs leaving `state`, in declaration order of the functions.
    std::vector<std::pair<const Function*, std::string>> outgoing(const std::string& state) const;
    Memory initial_memory() const;

    friend bool operator==(const MachineDef&, const MachineDef&) = default;
};

enum class MachineContext { Standalone, Communicating, Operas };

/// Static checks; `path_prefix` is prepended to issue paths.
std::vector<Issue> validation_issues(const MachineDef& def, MachineContext context,
                                     const std::string& path_prefix = "");

/// Errors raised while running a machine. `input_index` and `outputs` are
/// filled in by the stream and system runners.
class XmError : public Error {
   public:
    XmError(std::string code, const std::string& message, std::string state)
        : Error(std::move(code), message), state_(std::move(state)) {}

    const std::string& state() const noexcept { return state_; }

    std::string machine;
    std::optional<std::size_t> input_index;
    std::vector<Value> outputs;

    /// what() plus machine, state and input index.
    std::string describe() const;

   private:
    std::string state_;
};

class NoApplicableFunction : public XmError {
   public:
    NoApplicableFunction(const std::string& state, const std::string& input)
        : XmError("E-NO-APPLICABLE-FUNCTION",
                  "no function applicable in state '" + state + "' on input " + input, state) {}
};

class NondeterminismError : public XmError {
   public:
    NondeterminismError(const std::string& state, std::vector<std::string> functions);
    const std::vector<std::string>& functions() const noexcept { return functions_; }

   private:
    std::vector<std::string> functions_;
};

class InvalidInput : public XmError {
   public:
    InvalidInput(const std::string& state, Symbol input)
        : XmError("E-INVALID-INPUT", "input '" + input.name() + "' is not in the input alphabet", state) {}
};

/// Result of applying one function.
struct Firing {
    const Function* function = nullptr;
    std::string next_state;
    Memory memory;
    Value output;
};

bool guard_holds(const Function& fn, const EvalContext& ctx);
/// Evaluates output and updates; checks field kinds and symbolic outputs.
Firing fire(const MachineDef& def, const Function& fn, const std::string& next_state,
            const EvalContext& ctx);

struct StepOutcome {
    std::string state;
    Memory memory;
    Value output;
    std::string function;
};

/// Deterministic stream step over stream-bound functions.
StepOutcome xm_step(const MachineDef& def, const std::string& state, const Memory& memory,
                    Symbol input, std::int64_t roll = 0);

struct StreamResult {
    std::vector<Value> outputs;
    std::string state;
    Memory memory;
};

/// Folds xm_step from (q0, m0). On failure the XmError carries the offending
/// input index and the outputs produced before it.
StreamResult run_stream(const MachineDef& def, const std::vector<Symbol>& inputs);

}  // namespace opsim::xm
