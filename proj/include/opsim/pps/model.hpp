#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "opsim/core/issue.hpp"
#include "opsim/core/multiset.hpp"
#include "opsim/core/symbol.hpp"

namespace opsim::pps {

using CellType = Symbol;

/// (a; b, in)_t: with `a` present (or no trigger), pull `b` from a bonded neighbour.
struct CommIn {
    std::optional<Symbol> trigger;
    Symbol moved;
    CellType type;
    friend bool operator==(const CommIn&, const CommIn&) = default;
};

/// (a; b, enter)_t: with `a` present (or no trigger), pull `b` from the environment.
struct CommEnter {
    std::optional<Symbol> trigger;
    Symbol moved;
    CellType type;
    friend bool operator==(const CommEnter&, const CommEnter&) = default;
};

/// (b, exit)_t: push `b` to the environment.
struct CommExit {
    Symbol moved;
    CellType type;
    friend bool operator==(const CommExit&, const CommExit&) = default;
};

/// (a -> b)_t with b a non-empty multiset.
struct Transform {
    Symbol consumed;
    Multiset produced;
    CellType type;
    friend bool operator==(const Transform&, const Transform&) = default;
};

/// (a)_t -> (b)_p
struct Differentiate {
    Symbol consumed;
    Symbol produced;
    CellType from_type;
    CellType to_type;
    friend bool operator==(const Differentiate&, const Differentiate&) = default;
};

/// (a)_t -> (b)_t (c)_t. When `right_type` is set the second daughter is
/// typed `right_type` instead of `t`.
struct Divide {
    Symbol consumed;
    Symbol left_product;
    Symbol right_product;
    CellType type;
    std::optional<CellType> right_type;
    friend bool operator==(const Divide&, const Divide&) = default;
};

/// (a)_t -> dagger
struct Die {
    Symbol consumed;
    CellType type;
    friend bool operator==(const Die&, const Die&) = default;
};

using Rule = std::variant<CommIn, CommEnter, CommExit, Transform, Differentiate, Divide, Die>;

/// Type the rule is attached to (the `t` subscript).
CellType rule_cell_type(const Rule& rule);
/// Differentiate, Divide and Die.
bool is_structural(const Rule& rule);
bool is_communication(const Rule& rule);
std::string rule_kind_name(const Rule& rule);

/// (t, x1; x2, p)
struct BondRule {
    CellType left_type;
    Multiset left_required;
    Multiset right_required;
    CellType right_type;
    friend bool operator==(const BondRule&, const BondRule&) = default;
};

struct InitialCell {
    CellType type;
    Multiset contents;
    friend bool operator==(const InitialCell&, const InitialCell&) = default;
};

/// 1-based indices into `cells`, normalised first < second.
using InitialEdge = std::pair<std::size_t, std::size_t>;

struct Model {
    std::set<Symbol> alphabet;
    std::set<CellType> types;
    std::vector<BondRule> bond_rules;
    std::vector<InitialEdge> initial_edges;
    Multiset environment;
    std::vector<InitialCell> cells;
    std::vector<Rule> rules;

    friend bool operator==(const Model&, const Model&) = default;
};

std::vector<Issue> validation_issues(const Model& model);
/// Throws ValidationError carrying the first issue.
void validate(const Model& model);

}  // namespace opsim::pps
