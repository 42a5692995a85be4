#include "opsim/pps/model.hpp"

#include "opsim/core/error.hpp"

namespace opsim::pps {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Checker {
   public:
    explicit Checker(const Model& model) : model_(model) {}

    void symbol(Symbol s, const std::string& path) {
        if (!model_.alphabet.contains(s)) {
            issues_.push_back({"E-UNDECLARED-SYMBOL", "symbol '" + s.name() + "' is not in the alphabet",
                               path, s.name()});
        }
    }
    void symbols(const Multiset& m, const std::string& path) {
        for (const auto& [s, n] : m) symbol(s, path);
    }
    void type(CellType t, const std::string& path) {
        if (!model_.types.contains(t)) {
            issues_.push_back({"E-UNDECLARED-TYPE", "cell type '" + t.name() + "' is not declared",
                               path, t.name()});
        }
    }
    void add(Issue issue) { issues_.push_back(std::move(issue)); }
    std::vector<Issue> take() { return std::move(issues_); }

   private:
    const Model& model_;
    std::vector<Issue> issues_;
};

}  // namespace

CellType rule_cell_type(const Rule& rule) {
    return std::visit(overloaded{
                          [](const Differentiate& r) { return r.from_type; },
                          [](const auto& r) { return r.type; },
                      },
                      rule);
}

bool is_structural(const Rule& rule) {
    return std::holds_alternative<Differentiate>(rule) || std::holds_alternative<Divide>(rule) ||
           std::holds_alternative<Die>(rule);
}

bool is_communication(const Rule& rule) {
    return std::holds_alternative<CommIn>(rule) || std::holds_alternative<CommEnter>(rule) ||
           std::holds_alternative<CommExit>(rule);
}

std::string rule_kind_name(const Rule& rule) {
    return std::visit(overloaded{
                          [](const CommIn&) { return "in"; },
                          [](const CommEnter&) { return "enter"; },
                          [](const CommExit&) { return "exit"; },
                          [](const Transform&) { return "transform"; },
                          [](const Differentiate&) { return "differentiate"; },
                          [](const Divide&) { return "divide"; },
                          [](const Die&) { return "die"; },
                      },
                      rule);
}

std::vector<Issue> validation_issues(const Model& model) {
    Checker check(model);
    check.symbols(model.environment, "environment");
    for (std::size_t i = 0; i < model.cells.size(); ++i) {
        const std::string path = "cell[" + std::to_string(i) + "]";
        check.type(model.cells[i].type, path);
        check.symbols(model.cells[i].contents, path);
    }
    for (std::size_t i = 0; i < model.initial_edges.size(); ++i) {
        const std::string path = "edge[" + std::to_string(i) + "]";
        const auto [a, b] = model.initial_edges[i];
        const std::size_t n = model.cells.size();
        if (a < 1 || a > n || b < 1 || b > n) {
            check.add({"E-BAD-EDGE",
                       "edge {" + std::to_string(a) + "," + std::to_string(b) +
                           "} references a cell index outside 1.." + std::to_string(n),
                       path, ""});
        } else if (a == b) {
            check.add({"E-SELF-LOOP", "edge from cell " + std::to_string(a) + " to itself", path, ""});
        }
    }
    for (std::size_t i = 0; i < model.bond_rules.size(); ++i) {
        const std::string path = "bond[" + std::to_string(i) + "]";
        const BondRule& b = model.bond_rules[i];
        check.type(b.left_type, path);
        check.type(b.right_type, path);
        check.symbols(b.left_required, path);
        check.symbols(b.right_required, path);
    }
    for (std::size_t i = 0; i < model.rules.size(); ++i) {
        const std::string path = "rule[" + std::to_string(i) + "]";
        std::visit(overloaded{
                       [&](const CommIn& r) {
                           if (r.trigger) check.symbol(*r.trigger, path);
                           check.symbol(r.moved, path);
                           check.type(r.type, path);
                       },
                       [&](const CommEnter& r) {
                           if (r.trigger) check.symbol(*r.trigger, path);
                           check.symbol(r.moved, path);
                           check.type(r.type, path);
                       },
                       [&](const CommExit& r) {
                           check.symbol(r.moved, path);
                           check.type(r.type, path);
                       },
                       [&](const Transform& r) {
                           check.symbol(r.consumed, path);
                           check.symbols(r.produced, path);
                           check.type(r.type, path);
                           if (r.produced.empty()) {
                               check.add({"E-EMPTY-PRODUCT",
                                          "transformation of '" + r.consumed.name() +
                                              "' must produce at least one object",
                                          path, ""});
                           }
                       },
                       [&](const Differentiate& r) {
                           check.symbol(r.consumed, path);
                           check.symbol(r.produced, path);
                           check.type(r.from_type, path);
                           check.type(r.to_type, path);
                       },
                       [&](const Divide& r) {
                           check.symbol(r.consumed, path);
                           check.symbol(r.left_product, path);
                           check.symbol(r.right_product, path);
                           check.type(r.type, path);
                           if (r.right_type) check.type(*r.right_type, path);
                       },
                       [&](const Die& r) {
                           check.symbol(r.consumed, path);
                           check.type(r.type, path);
                       },
                   },
                   model.rules[i]);
    }
    return check.take();
}

void validate(const Model& model) {
    throw_if_issues(validation_issues(model));
}

}  // namespace opsim::pps
