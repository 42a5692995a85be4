#include "support/oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace opsim::testing {

namespace {

const Symbol kSyms[] = {Symbol("a"), Symbol("b"), Symbol("c"), Symbol("d")};
const Symbol kT("T");
const Symbol kU("U");

Symbol sym(Rng& rng, std::size_t n) { return kSyms[rng.below(n)]; }
Symbol type(Rng& rng) { return rng.coin() ? kT : kU; }
std::optional<Symbol> trigger(Rng& rng, std::size_t n) {
    if (rng.coin()) return std::nullopt;
    return sym(rng, n);
}

// -- brute-force selection oracle ---------------------------------------------

constexpr pps::CellId kEnvironment = 0;
using Resource = std::pair<pps::CellId, Symbol>;

struct Kind {
    pps::RuleInstance instance;
    bool structural = false;
    Resource consumes;
};

std::vector<Kind> enumerate_kinds(const pps::Model& model, const pps::Configuration& config) {
    std::map<pps::CellId, std::set<pps::CellId>> adjacent;
    for (const auto& [x, y] : config.bonds) {
        adjacent[x].insert(y);
        adjacent[y].insert(x);
    }
    std::vector<Kind> kinds;
    for (const auto& [id, cell] : config.cells) {
        auto promoted = [&](const std::optional<Symbol>& t) { return !t || cell.contents.count(*t) > 0; };
        for (std::size_t i = 0; i < model.rules.size(); ++i) {
            const pps::Rule& rule = model.rules[i];
            if (pps::rule_cell_type(rule) != cell.type) continue;
            if (const auto* r = std::get_if<pps::CommIn>(&rule)) {
                if (!promoted(r->trigger)) continue;
                for (pps::CellId n : adjacent[id]) kinds.push_back({{i, id, n}, false, {n, r->moved}});
            } else if (const auto* r = std::get_if<pps::CommEnter>(&rule)) {
                if (promoted(r->trigger)) kinds.push_back({{i, id, std::nullopt}, false, {kEnvironment, r->moved}});
            } else if (const auto* r = std::get_if<pps::CommExit>(&rule)) {
                kinds.push_back({{i, id, std::nullopt}, false, {id, r->moved}});
            } else {
                const Symbol consumed = std::visit(
                    [](const auto& x) -> Symbol {
                        if constexpr (requires { x.consumed; }) {
                            return x.consumed;
                        } else {
                            return Symbol();
                        }
                    },
                    rule);
                kinds.push_back({{i, id, std::nullopt}, pps::is_structural(rule), {id, consumed}});
            }
        }
    }
    return kinds;
}

class Enumerator {
   public:
    Enumerator(const std::vector<Kind>& kinds, const pps::Configuration& config) : kinds_(kinds) {
        for (const auto& [id, cell] : config.cells) {
            for (const auto& [s, n] : cell.contents) available_[{id, s}] = n;
        }
        for (const auto& [s, n] : config.environment) available_[{kEnvironment, s}] = n;
    }

    bool valid(const std::vector<Count>& counts) const {
        std::map<Resource, Count> used;
        std::map<pps::CellId, std::pair<Count, Count>> per_cell;  // (structural, total)
        for (std::size_t k = 0; k < kinds_.size(); ++k) {
            if (counts[k] == 0) continue;
            used[kinds_[k].consumes] += counts[k];
            auto& [structural, total] = per_cell[kinds_[k].instance.cell];
            if (kinds_[k].structural) structural += counts[k];
            total += counts[k];
        }
        for (const auto& [res, n] : used) {
            auto it = available_.find(res);
            if (it == available_.end() || it->second < n) return false;
        }
        for (const auto& [cell, st] : per_cell) {
            if (st.first > 0 && st.second != 1) return false;
        }
        return true;
    }

    /// Every valid count vector that cannot be extended by one more instance.
    std::set<std::vector<Count>> maximal() {
        std::vector<Count> counts(kinds_.size(), 0);
        std::set<std::vector<Count>> out;
        std::function<void(std::size_t)> go = [&](std::size_t k) {
            if (k == kinds_.size()) {
                if (is_maximal(counts)) out.insert(counts);
                return;
            }
            for (Count n = 0;; ++n) {
                counts[k] = n;
                if (!valid(counts)) break;
                go(k + 1);
            }
            counts[k] = 0;
        };
        go(0);
        return out;
    }

    bool is_maximal(std::vector<Count>& counts) const {
        for (std::size_t k = 0; k < kinds_.size(); ++k) {
            ++counts[k];
            const bool extends = valid(counts);
            --counts[k];
            if (extends) return false;
        }
        return true;
    }

   private:
    const std::vector<Kind>& kinds_;
    std::map<Resource, Count> available_;
};

std::string describe(const pps::RuleInstance& inst) {
    std::string s = "rule " + std::to_string(inst.rule) + " in cell " + std::to_string(inst.cell);
    if (inst.source) s += " from " + std::to_string(*inst.source);
    return s;
}

}  // namespace

pps::Model random_small_pps(Rng& rng) {
    pps::Model m;
    m.alphabet = {kSyms[0], kSyms[1], kSyms[2]};
    m.types = {kT, kU};
    const std::size_t cells = 1 + rng.below(3);
    for (std::size_t i = 0; i < cells; ++i) m.cells.push_back({type(rng), {}});
    const std::size_t objects = rng.below(7);
    for (std::size_t i = 0; i < objects; ++i) {
        const std::size_t where = rng.below(cells + 1);
        (where == cells ? m.environment : m.cells[where].contents).add(sym(rng, 3));
    }
    for (std::size_t x = 1; x <= cells; ++x) {
        for (std::size_t y = x + 1; y <= cells; ++y) {
            if (rng.coin()) m.initial_edges.push_back({x, y});
        }
    }
    if (rng.below(4) == 0) m.bond_rules.push_back({type(rng), Multiset::of(sym(rng, 3)), {}, type(rng)});
    const std::size_t rules = 1 + rng.below(4);
    for (std::size_t i = 0; i < rules; ++i) {
        const Symbol t = type(rng);
        switch (rng.below(7)) {
            case 0: m.rules.push_back(pps::CommIn{trigger(rng, 3), sym(rng, 3), t}); break;
            case 1: m.rules.push_back(pps::CommEnter{trigger(rng, 3), sym(rng, 3), t}); break;
            case 2: m.rules.push_back(pps::CommExit{sym(rng, 3), t}); break;
            case 3: {
                Multiset out = Multiset::of(sym(rng, 3));
                if (rng.coin()) out.add(sym(rng, 3));
                m.rules.push_back(pps::Transform{sym(rng, 3), out, t});
                break;
            }
            case 4: m.rules.push_back(pps::Differentiate{sym(rng, 3), sym(rng, 3), t, type(rng)}); break;
            case 5: {
                std::optional<Symbol> right;
                if (rng.coin()) right = type(rng);
                m.rules.push_back(pps::Divide{sym(rng, 3), sym(rng, 3), sym(rng, 3), t, right});
                break;
            }
            default: m.rules.push_back(pps::Die{sym(rng, 3), t}); break;
        }
    }
    return m;
}

pps::Model random_communication_pps(Rng& rng) {
    pps::Model m;
    m.alphabet = {kSyms[0], kSyms[1], kSyms[2], kSyms[3]};
    m.types = {kT, kU};
    const std::size_t cells = 2 + rng.below(4);
    for (std::size_t i = 0; i < cells; ++i) {
        pps::InitialCell c{type(rng), {}};
        for (const Symbol s : kSyms) c.contents.add(s, static_cast<Count>(rng.below(4)));
        m.cells.push_back(std::move(c));
    }
    for (const Symbol s : kSyms) m.environment.add(s, static_cast<Count>(rng.below(6)));
    if (rng.coin()) {
        for (std::size_t x = 1; x <= cells; ++x) {
            for (std::size_t y = x + 1; y <= cells; ++y) {
                if (rng.coin()) m.initial_edges.push_back({x, y});
            }
        }
    } else {
        const std::size_t n = 1 + rng.below(3);
        for (std::size_t i = 0; i < n; ++i) {
            Multiset need;
            if (rng.coin()) need.add(sym(rng, 4));
            m.bond_rules.push_back({type(rng), need, {}, type(rng)});
        }
    }
    const std::size_t rules = 1 + rng.below(6);
    for (std::size_t i = 0; i < rules; ++i) {
        const Symbol t = type(rng);
        switch (rng.below(3)) {
            case 0: m.rules.push_back(pps::CommIn{trigger(rng, 4), sym(rng, 4), t}); break;
            case 1: m.rules.push_back(pps::CommEnter{trigger(rng, 4), sym(rng, 4), t}); break;
            default: m.rules.push_back(pps::CommExit{sym(rng, 4), t}); break;
        }
    }
    return m;
}

Multiset all_objects(const pps::Configuration& config) {
    Multiset total = config.environment;
    for (const auto& [id, cell] : config.cells) total.add(cell.contents);
    return total;
}

std::optional<std::string> brute_force_check(const pps::Model& model, const pps::Configuration& config,
                                             const pps::StepSelection& selection) {
    const std::vector<Kind> kinds = enumerate_kinds(model, config);
    std::vector<Count> counts(kinds.size(), 0);
    for (const auto& inst : selection.instances) {
        auto it = std::find_if(kinds.begin(), kinds.end(), [&](const Kind& k) { return k.instance == inst; });
        if (it == kinds.end()) return "selected " + describe(inst) + " is not enabled";
        ++counts[static_cast<std::size_t>(it - kinds.begin())];
    }
    Enumerator en(kinds, config);
    if (!en.valid(counts)) return "selection over-consumes objects or breaks structural exclusivity";
    const auto maximal = en.maximal();
    if (!maximal.contains(counts)) {
        return "selection of " + std::to_string(selection.instances.size()) + " instances is not among the " +
               std::to_string(maximal.size()) + " maximal selections";
    }
    return std::nullopt;
}

std::string random_mutation_operas(Rng& rng) {
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };
    const int w = pick(2, 6);
    const int h = pick(2, 6);
    const int period = pick(2, 4);
    const int generous = pick(2, 6);
    std::ostringstream o;
    o << "operas fuzz {\n    grid " << w << ' ' << h << ";\n";
    for (int i = pick(0, 4); i > 0; --i) o << "    place " << pick(0, w - 1) << ' ' << pick(0, h - 1) << " {food:" << pick(1, 4) << "};\n";
    o << R"(    xm Mover {
        inputs food_here food_N food_E food_S food_W tick;
        states Live;
        initial Live;
        memory {
            pos: tuple = (0, 0);
            energy: int = 3;
        }
        function eat : stream -> stream {
            guard input == 'food_here;
            set energy = m.energy + 2;
            take food 1;
        }
        function walk : stream -> stream {
            guard input == 'tick && roll % )" << period << R"( == 0;
            set pos = (min(max(m.pos.0 + roll / 7 % 3 - 1, 0), width - 1), min(max(m.pos.1 + roll / 21 % 3 - 1, 0), height - 1));
            set energy = m.energy - 1;
        }
        function rest : stream -> stream {
            guard input == 'tick && roll % )" << period << R"( != 0 && !(peers > 0 && m.energy > )" << generous << R"();
        }
        function give : stream -> peer {
            guard input == 'tick && roll % )" << period << R"( != 0 && peers > 0 && m.energy > )" << generous << R"(;
            output 1;
            set energy = m.energy - 1;
        }
        function gain : peer -> stream {
            set energy = m.energy + input;
        }
        transition Live -> Live via eat;
        transition Live -> Live via walk;
        transition Live -> Live via rest;
        transition Live -> Live via give;
        transition Live -> Live via gain;
    }
)";
    const char* const types[] = {"ant", "bee"};
    for (const char* t : types) {
        o << "    type " << t << " : Mover {\n        percepts food;\n";
        if (rng.below(10) < 8) {
            o << "        rule bud when m.energy > " << pick(1, 4) << " && roll % " << pick(3, 6)
              << " == 0 => add_agent " << types[rng.below(2)] << " {\n            energy = m.energy / 2 + 1;\n        };\n";
        }
        if (rng.below(10) < 8) o << "        rule die when m.energy <= 0 || roll % " << pick(4, 8) << " == 0 => remove_agent self;\n";
        if (rng.below(10) < 8) o << "        rule link when peers < " << pick(1, 3) << " => add_channel nearest " << pick(1, 4) << ";\n";
        if (rng.below(10) < 7) o << "        rule unlink when peers > " << pick(0, 2) << " => remove_channel nearest_peer;\n";
        if (rng.below(10) < 5) o << "        rule solo when peers == 1 && roll % " << pick(2, 4) << " == 0 => remove_channel peer;\n";
        o << "    }\n";
    }
    if (rng.coin()) o << "    global rule cull for " << types[rng.below(2)] << " when roll % " << pick(5, 10) << " == 0 => remove_agent self;\n";
    if (rng.coin()) o << "    global rule mingle when peers == 0 && roll % 2 == 0 => add_channel nearest " << pick(1, 3) << ";\n";
    const int agents = pick(2, 8);
    for (int i = 0; i < agents; ++i) {
        o << "    agent " << types[rng.below(2)] << " {\n        set pos = (" << pick(0, w - 1) << ", " << pick(0, h - 1)
          << ");\n        set energy = " << pick(1, 6) << ";\n    }\n";
    }
    std::set<std::pair<int, int>> links;
    for (int i = pick(0, agents); i > 0; --i) {
        const int x = pick(1, agents);
        const int y = pick(1, agents);
        if (x != y && links.insert({std::min(x, y), std::max(x, y)}).second) o << "    link " << x << ' ' << y << ";\n";
    }
    o << "}\n";
    return o.str();
}

std::optional<std::string> operas_integrity(const operas::System& before, const operas::System& after,
                                            const operas::StepRecord& record) {
    using operas::AgentId;
    const auto live = [&](AgentId id) { return after.agents.contains(id); };
    for (const auto& [x, y] : after.relation) {
        if (x >= y) return "link (" + std::to_string(x) + ", " + std::to_string(y) + ") is not normalised";
        if (!live(x) || !live(y)) return "link (" + std::to_string(x) + ", " + std::to_string(y) + ") dangles";
    }
    for (const auto& [key, value] : after.pending) {
        if (!live(key.first) || !live(key.second)) return "pending message between dead agents";
        if (!after.relation.contains(operas::make_link(key.first, key.second))) return "pending message without a link";
    }
    std::size_t created = 0;
    std::size_t vanished = 0;
    for (const auto& [id, a] : after.agents) {
        if (a.id != id) return "agent key and id disagree";
        if (!before.agents.contains(id)) {
            if (id < before.next_id) return "agent id " + std::to_string(id) + " reused";
            ++created;
        }
        const auto [x, y] = operas::position(a, after.env);
        if (!after.env.in_bounds(x, y)) return "agent off the grid";
    }
    for (const auto& [id, a] : before.agents) vanished += !after.agents.contains(id);
    if (created != record.added) return "added count disagrees with the new ids";
    if (vanished != record.removed) return "removed count disagrees with the vanished ids";
    if (after.agents.size() + record.removed != before.agents.size() + record.added) return "population identity broken";
    if (after.next_id != before.next_id + record.added) return "id counter out of step";
    return std::nullopt;
}

}  // namespace opsim::testing
