#include "opsim/xm/expr.hpp"

#include <algorithm>
#include <map>

namespace opsim::xm {

Expr Expr::lit(Value v) {
    Expr e;
    e.kind = Kind::Literal;
    e.literal = std::move(v);
    return e;
}

Expr Expr::leaf(Kind k) {
    Expr e;
    e.kind = k;
    return e;
}

Expr Expr::field(std::string name) {
    Expr e;
    e.kind = Kind::Field;
    e.name = std::move(name);
    return e;
}

Expr Expr::collection(Kind k, std::vector<Expr> items) {
    Expr e;
    e.kind = k;
    e.args = std::move(items);
    return e;
}

Expr Expr::tuple_index(Expr base, std::int64_t i) {
    Expr e;
    e.kind = Kind::Index;
    e.index = i;
    e.args.push_back(std::move(base));
    return e;
}

Expr Expr::unary(std::string op, Expr operand) {
    Expr e;
    e.kind = Kind::Unary;
    e.name = std::move(op);
    e.args.push_back(std::move(operand));
    return e;
}

Expr Expr::binary(std::string op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Binary;
    e.name = std::move(op);
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
}

Expr Expr::call(std::string fn, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.name = std::move(fn);
    e.args = std::move(args);
    return e;
}

Expr Expr::conditional(Expr c, Expr then_branch, Expr else_branch) {
    Expr e;
    e.kind = Kind::If;
    e.args.push_back(std::move(c));
    e.args.push_back(std::move(then_branch));
    e.args.push_back(std::move(else_branch));
    return e;
}

std::optional<std::size_t> builtin_arity(const std::string& fn) {
    static const std::map<std::string, std::size_t> arity = {
        {"len", 1}, {"append", 2}, {"insert", 2}, {"remove", 2},
        {"min", 2}, {"max", 2},    {"abs", 1},    {"env", 1},
    };
    auto it = arity.find(fn);
    if (it == arity.end()) return std::nullopt;
    return it->second;
}

int binary_precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=" || op == "in") {
        return 3;
    }
    if (op == "+" || op == "-") return 4;
    if (op == "*" || op == "/" || op == "%") return 5;
    return 0;
}

bool is_binary_operator(const std::string& op) { return binary_precedence(op) > 0; }

namespace {

Value arithmetic(const std::string& op, std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    bool overflowed = false;
    if (op == "+") overflowed = __builtin_add_overflow(a, b, &out);
    if (op == "-") overflowed = __builtin_sub_overflow(a, b, &out);
    if (op == "*") overflowed = __builtin_mul_overflow(a, b, &out);
    if (overflowed) throw EvalError("integer overflow");
    if (op == "+" || op == "-" || op == "*") return Value::integer(out);
    if (b == 0) throw EvalError("division by zero");
    if (a == INT64_MIN && b == -1) throw EvalError("integer overflow");
    if (op == "/") return Value::integer(a / b);
    return Value::integer(a % b);
}

bool member(const Value& needle, const Value& haystack) {
    const auto& items = haystack.items();
    if (haystack.kind() == ValueKind::Set) return std::binary_search(items.begin(), items.end(), needle);
    return std::find(items.begin(), items.end(), needle) != items.end();
}

Value builtin(const std::string& fn, const std::vector<Value>& v, const EvalContext& ctx) {
    if (fn == "len") return Value::integer(static_cast<std::int64_t>(v[0].items().size()));
    if (fn == "abs") {
        const std::int64_t x = v[0].as_int();
        if (x == INT64_MIN) throw EvalError("integer overflow");
        return Value::integer(x < 0 ? -x : x);
    }
    if (fn == "min") return Value::integer(std::min(v[0].as_int(), v[1].as_int()));
    if (fn == "max") return Value::integer(std::max(v[0].as_int(), v[1].as_int()));
    if (fn == "append") {
        if (v[0].kind() != ValueKind::Seq) throw EvalError("append expects a seq");
        auto items = v[0].items();
        items.push_back(v[1]);
        return Value::seq(std::move(items));
    }
    if (fn == "insert" || fn == "remove") {
        if (v[0].kind() != ValueKind::Set) throw EvalError(fn + " expects a set");
        auto items = v[0].items();
        if (fn == "insert") {
            items.push_back(v[1]);
        } else {
            std::erase(items, v[1]);
        }
        return Value::set(std::move(items));
    }
    if (fn == "env") {
        if (!ctx.env_count) throw EvalError("env() is only available to OPERAS agents");
        return Value::integer(ctx.env_count(v[0].as_symbol()));
    }
    throw EvalError("unknown builtin '" + fn + "'");
}

}  // namespace

Value evaluate(const Expr& e, const EvalContext& ctx) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Literal: return e.literal;
        case K::Input:
            if (!ctx.input) throw EvalError("no input available");
            return *ctx.input;
        case K::Roll: return Value::integer(ctx.roll);
        case K::Peers: return Value::integer(ctx.peers);
        case K::State:
            if (!ctx.state) throw EvalError("no state available");
            return Value::symbol(*ctx.state);
        case K::Width: return Value::integer(ctx.width);
        case K::Height: return Value::integer(ctx.height);
        case K::Field: {
            if (!ctx.memory) throw EvalError("no memory available");
            auto it = ctx.memory->find(e.name);
            if (it == ctx.memory->end()) throw EvalError("memory has no field '" + e.name + "'");
            return it->second;
        }
        case K::Tuple:
        case K::Seq:
        case K::Set: {
            std::vector<Value> items;
            items.reserve(e.args.size());
            for (const auto& a : e.args) items.push_back(evaluate(a, ctx));
            if (e.kind == K::Tuple) return Value::tuple(std::move(items));
            if (e.kind == K::Seq) return Value::seq(std::move(items));
            return Value::set(std::move(items));
        }
        case K::Index: {
            Value base = evaluate(e.args[0], ctx);
            if (base.kind() != ValueKind::Tuple && base.kind() != ValueKind::Seq) {
                throw EvalError("cannot index a " + kind_name(base.kind()));
            }
            const auto& items = base.items();
            if (e.index < 0 || static_cast<std::size_t>(e.index) >= items.size()) {
                throw EvalError("index " + std::to_string(e.index) + " out of range for " + base.to_string());
            }
            return items[static_cast<std::size_t>(e.index)];
        }
        case K::Unary: {
            Value v = evaluate(e.args[0], ctx);
            if (e.name == "!") return Value::boolean(!v.as_bool());
            const std::int64_t x = v.as_int();
            if (x == INT64_MIN) throw EvalError("integer overflow");
            return Value::integer(-x);
        }
        case K::Binary: {
            if (e.name == "&&") {
                return Value::boolean(evaluate(e.args[0], ctx).as_bool() && evaluate(e.args[1], ctx).as_bool());
            }
            if (e.name == "||") {
                return Value::boolean(evaluate(e.args[0], ctx).as_bool() || evaluate(e.args[1], ctx).as_bool());
            }
            Value a = evaluate(e.args[0], ctx);
            Value b = evaluate(e.args[1], ctx);
            if (e.name == "==") return Value::boolean(a == b);
            if (e.name == "!=") return Value::boolean(a != b);
            if (e.name == "in") return Value::boolean(member(a, b));
            if (e.name == "<") return Value::boolean(a.as_int() < b.as_int());
            if (e.name == "<=") return Value::boolean(a.as_int() <= b.as_int());
            if (e.name == ">") return Value::boolean(a.as_int() > b.as_int());
            if (e.name == ">=") return Value::boolean(a.as_int() >= b.as_int());
            return arithmetic(e.name, a.as_int(), b.as_int());
        }
        case K::Call: {
            auto arity = builtin_arity(e.name);
            if (!arity || *arity != e.args.size()) throw EvalError("bad call to '" + e.name + "'");
            std::vector<Value> args;
            for (const auto& a : e.args) args.push_back(evaluate(a, ctx));
            return builtin(e.name, args, ctx);
        }
        case K::If:
            return evaluate(e.args[0], ctx).as_bool() ? evaluate(e.args[1], ctx) : evaluate(e.args[2], ctx);
    }
    throw EvalError("malformed expression");
}

bool evaluate_bool(const Expr& expr, const EvalContext& ctx) { return evaluate(expr, ctx).as_bool(); }

namespace {

// Precedence levels: 0 = if, 1..5 binary, 6 unary, 7 postfix/primary.
int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::If: return 0;
        case Expr::Kind::Binary: return binary_precedence(e.name);
        case Expr::Kind::Unary: return 6;
        case Expr::Kind::Literal:
            // A negative literal prints with a leading minus and binds like a unary.
            return e.literal.kind() == ValueKind::Int && e.literal.as_int() < 0 ? 6 : 7;
        default: return 7;
    }
}

std::string wrap(const Expr& e, int min_prec) {
    std::string s = to_source(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string join(const std::vector<Expr>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += to_source(items[i]);
    }
    return out;
}

}  // namespace

std::string to_source(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Literal: return e.literal.to_string();
        case K::Input: return "input";
        case K::Roll: return "roll";
        case K::Peers: return "peers";
        case K::State: return "state";
        case K::Width: return "width";
        case K::Height: return "height";
        case K::Field: return "m." + e.name;
        case K::Tuple: return "(" + join(e.args) + (e.args.size() == 1 ? ",)" : ")");
        case K::Seq: return "[" + join(e.args) + "]";
        case K::Set: return "{" + join(e.args) + "}";
        case K::Index: return wrap(e.args[0], 7) + "." + std::to_string(e.index);
        case K::Unary: return e.name + wrap(e.args[0], 6);
        case K::Binary: {
            const int p = binary_precedence(e.name);
            // Left associative; comparisons do not chain, so both sides need a tighter operand.
            const int left = p == 3 ? p + 1 : p;
            return wrap(e.args[0], left) + " " + e.name + " " + wrap(e.args[1], p + 1);
        }
        case K::Call: return e.name + "(" + join(e.args) + ")";
        case K::If:
            return "if " + to_source(e.args[0]) + " then " + to_source(e.args[1]) + " else " +
                   to_source(e.args[2]);
    }
    return "?";
}

void walk(const Expr& expr, const std::function<void(const Expr&)>& fn) {
    fn(expr);
    for (const auto& a : expr.args) walk(a, fn);
}

}  // namespace opsim::xm
