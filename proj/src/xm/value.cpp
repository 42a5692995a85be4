#include "opsim/xm/value.hpp"

#include <algorithm>

namespace opsim::xm {

std::string kind_name(ValueKind kind) {
    switch (kind) {
        case ValueKind::Int: return "int";
        case ValueKind::Bool: return "bool";
        case ValueKind::Sym: return "sym";
        case ValueKind::Tuple: return "tuple";
        case ValueKind::Seq: return "seq";
        case ValueKind::Set: return "set";
    }
    return "?";
}

Value Value::integer(std::int64_t v) {
    Value out;
    out.kind_ = ValueKind::Int;
    out.int_ = v;
    return out;
}

Value Value::boolean(bool v) {
    Value out;
    out.kind_ = ValueKind::Bool;
    out.int_ = v ? 1 : 0;
    return out;
}

Value Value::symbol(Symbol s) {
    Value out;
    out.kind_ = ValueKind::Sym;
    out.sym_ = s;
    return out;
}

Value Value::tuple(std::vector<Value> items) {
    Value out;
    out.kind_ = ValueKind::Tuple;
    out.items_ = std::move(items);
    return out;
}

Value Value::seq(std::vector<Value> items) {
    Value out;
    out.kind_ = ValueKind::Seq;
    out.items_ = std::move(items);
    return out;
}

Value Value::set(std::vector<Value> items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    Value out;
    out.kind_ = ValueKind::Set;
    out.items_ = std::move(items);
    return out;
}

std::int64_t Value::as_int() const {
    if (kind_ != ValueKind::Int) throw EvalError("expected int, got " + kind_name(kind_) + " " + to_string());
    return int_;
}

bool Value::as_bool() const {
    if (kind_ != ValueKind::Bool) throw EvalError("expected bool, got " + kind_name(kind_) + " " + to_string());
    return int_ != 0;
}

Symbol Value::as_symbol() const {
    if (kind_ != ValueKind::Sym) throw EvalError("expected sym, got " + kind_name(kind_) + " " + to_string());
    return sym_;
}

const std::vector<Value>& Value::items() const {
    if (kind_ != ValueKind::Tuple && kind_ != ValueKind::Seq && kind_ != ValueKind::Set) {
        throw EvalError("expected a collection, got " + kind_name(kind_) + " " + to_string());
    }
    return items_;
}

std::string Value::to_string() const {
    auto join = [this](const char* open, const char* close) {
        std::string out = open;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (i > 0) out += ", ";
            out += items_[i].to_string();
        }
        if (kind_ == ValueKind::Tuple && items_.size() == 1) out += ",";
        return out + close;
    };
    switch (kind_) {
        case ValueKind::Int: return std::to_string(int_);
        case ValueKind::Bool: return int_ ? "true" : "false";
        case ValueKind::Sym: return "'" + sym_.name();
        case ValueKind::Tuple: return join("(", ")");
        case ValueKind::Seq: return join("[", "]");
        case ValueKind::Set: return join("{", "}");
    }
    return "?";
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    switch (a.kind_) {
        case ValueKind::Int:
        case ValueKind::Bool: return a.int_ <=> b.int_;
        case ValueKind::Sym: return a.sym_ <=> b.sym_;
        default: break;
    }
    const std::size_t n = std::min(a.items_.size(), b.items_.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto c = a.items_[i] <=> b.items_[i];
        if (c != 0) return c;
    }
    return a.items_.size() <=> b.items_.size();
}

std::string memory_to_string(const Memory& memory) {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, value] : memory) {
        if (!first) out += ", ";
        first = false;
        out += name + "=" + value.to_string();
    }
    return out + "}";
}

}  // namespace opsim::xm
