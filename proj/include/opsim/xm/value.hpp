#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opsim/core/error.hpp"
#include "opsim/core/symbol.hpp"

namespace opsim::xm {

enum class ValueKind { Int, Bool, Sym, Tuple, Seq, Set };

std::string kind_name(ValueKind kind);

class EvalError : public Error {
   public:
    explicit EvalError(const std::string& message) : Error("E-EVAL", message) {}
};

/// Memory and message values: integers, booleans, symbols, tuples, finite
/// sequences and finite sets. Sets are kept sorted and duplicate-free.
class Value {
   public:
    Value() : kind_(ValueKind::Tuple) {}  // unit, the empty tuple

    static Value integer(std::int64_t v);
    static Value boolean(bool v);
    static Value symbol(Symbol s);
    static Value tuple(std::vector<Value> items);
    static Value seq(std::vector<Value> items);
    static Value set(std::vector<Value> items);

    ValueKind kind() const noexcept { return kind_; }
    bool is_unit() const noexcept { return kind_ == ValueKind::Tuple && items_.empty(); }

    // Checked accessors; throw EvalError on a kind mismatch.
    std::int64_t as_int() const;
    bool as_bool() const;
    Symbol as_symbol() const;
    const std::vector<Value>& items() const;

    /// Literal syntax accepted back by the expression parser.
    std::string to_string() const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

   private:
    ValueKind kind_;
    std::int64_t int_ = 0;
    Symbol sym_;
    std::vector<Value> items_;
};

using Memory = std::map<std::string, Value>;

std::string memory_to_string(const Memory& memory);

}  // namespace opsim::xm
