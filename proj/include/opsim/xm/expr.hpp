#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opsim/core/multiset.hpp"
#include "opsim/xm/value.hpp"

namespace opsim::xm {

/// Closed guard/effect expression language: literals, `input`, `roll`,
/// `peers`, `state`, `width`, `height`, memory field access `m.f`, tuple
/// index `e.0`, tuple/sequence/set literals, arithmetic, comparison,
/// boolean connectives, membership, `if c then a else b`, and the builtins
/// len, append, insert, remove, min, max, abs, env. No recursion; evaluation
/// always terminates.
struct Expr {
    enum class Kind {
        Literal,
        Input,
        Roll,
        Peers,
        State,
        Width,
        Height,
        Field,
        Tuple,
        Seq,
        Set,
        Index,
        Unary,
        Binary,
        Call,
        If,
    };

    Kind kind = Kind::Literal;
    Value literal;
    std::string name;  // field name, operator, or builtin
    std::int64_t index = 0;
    std::vector<Expr> args;

    static Expr lit(Value v);
    static Expr leaf(Kind k);
    static Expr field(std::string name);
    static Expr collection(Kind k, std::vector<Expr> items);
    static Expr tuple_index(Expr base, std::int64_t i);
    static Expr unary(std::string op, Expr operand);
    static Expr binary(std::string op, Expr lhs, Expr rhs);
    static Expr call(std::string fn, std::vector<Expr> args);
    static Expr conditional(Expr c, Expr then_branch, Expr else_branch);

    friend bool operator==(const Expr&, const Expr&) = default;
};

/// Arity of builtin `fn`, or nullopt when `fn` is not a builtin.
std::optional<std::size_t> builtin_arity(const std::string& fn);
bool is_binary_operator(const std::string& op);
int binary_precedence(const std::string& op);

struct EvalContext {
    const Value* input = nullptr;
    const Memory* memory = nullptr;
    std::int64_t roll = 0;
    std::int64_t peers = 0;
    std::optional<Symbol> state;
    std::int64_t width = 0;
    std::int64_t height = 0;
    /// Object count at the agent's grid cell; unset outside OPERAS.
    std::function<Count(Symbol)> env_count;
};

/// Throws EvalError on kind mismatch, missing data, overflow or division by zero.
Value evaluate(const Expr& expr, const EvalContext& ctx);
bool evaluate_bool(const Expr& expr, const EvalContext& ctx);

/// Canonical source text with minimal parentheses.
std::string to_source(const Expr& expr);

/// Calls `fn` on `expr` and every sub-expression, pre-order.
void walk(const Expr& expr, const std::function<void(const Expr&)>& fn);

}  // namespace opsim::xm
