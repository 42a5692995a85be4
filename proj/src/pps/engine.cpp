#include "opsim/pps/engine.hpp"

#include <algorithm>
#include <unordered_map>

namespace opsim::pps {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool trigger_present(const std::optional<Symbol>& trigger, const Multiset& contents) {
    return !trigger || contents.count(*trigger) > 0;
}

enum class Lock { None, NonStructural, Structural };

/// Residual objects while a selection is being built. Cells are indexed by
/// id and keep a list of what has been charged against their pre-step objects.
struct Residual {
    static constexpr std::size_t kEnd = static_cast<std::size_t>(-1);
    struct Slot {
        const Cell* cell = nullptr;
        Lock lock = Lock::None;
        std::size_t taken = kEnd;
    };
    struct Taken {
        Symbol symbol;
        Count n;
        std::size_t next;
    };
    std::vector<Slot> slots;
    std::vector<Taken> taken;
    Multiset environment;

    Count count(CellId id, Symbol s) const {
        Count n = slots[id].cell->contents.count(s);
        for (std::size_t t = slots[id].taken; t != kEnd; t = taken[t].next) {
            if (taken[t].symbol == s) n -= taken[t].n;
        }
        return n;
    }
    void take(CellId id, Symbol s) {
        for (std::size_t t = slots[id].taken; t != kEnd; t = taken[t].next) {
            if (taken[t].symbol == s) {
                ++taken[t].n;
                return;
            }
        }
        taken.push_back({s, 1, slots[id].taken});
        slots[id].taken = taken.size() - 1;
    }
};

bool fits(const Model& model, const RuleInstance& inst, const Residual& res) {
    const Rule& rule = model.rules[inst.rule];
    const Lock lock = res.slots[inst.cell].lock;
    if (is_structural(rule)) {
        if (lock != Lock::None) return false;
    } else if (lock == Lock::Structural) {
        return false;
    }
    return std::visit(overloaded{
                          [&](const CommIn& r) { return res.count(*inst.source, r.moved) > 0; },
                          [&](const CommEnter& r) { return res.environment.count(r.moved) > 0; },
                          [&](const CommExit& r) { return res.count(inst.cell, r.moved) > 0; },
                          [&](const auto& r) { return res.count(inst.cell, r.consumed) > 0; },
                      },
                      rule);
}

void charge(const Model& model, const RuleInstance& inst, Residual& res) {
    const Rule& rule = model.rules[inst.rule];
    std::visit(overloaded{
                   [&](const CommIn& r) { res.take(*inst.source, r.moved); },
                   [&](const CommEnter& r) { res.environment.remove(r.moved); },
                   [&](const CommExit& r) { res.take(inst.cell, r.moved); },
                   [&](const auto& r) { res.take(inst.cell, r.consumed); },
               },
               rule);
    res.slots[inst.cell].lock = is_structural(rule) ? Lock::Structural : Lock::NonStructural;
}

void drop_dangling_bonds(Configuration& config) {
    std::erase_if(config.bonds, [&](const Bond& b) {
        return !config.cells.contains(b.first) || !config.cells.contains(b.second);
    });
}

void rebuild_bonds(Configuration& config, const Model& model, BondMode mode) {
    if (mode == BondMode::Static) {
        drop_dangling_bonds(config);
        return;
    }
    config.bonds.clear();
    for (const BondRule& rule : model.bond_rules) {
        std::vector<CellId> left;
        std::vector<CellId> right;
        for (const auto& [id, cell] : config.cells) {
            if (cell.type == rule.left_type && cell.contents.contains(rule.left_required)) left.push_back(id);
            if (cell.type == rule.right_type && cell.contents.contains(rule.right_required)) {
                right.push_back(id);
            }
        }
        for (CellId l : left) {
            for (CellId r : right) {
                if (l != r) config.bonds.insert(make_bond(l, r));
            }
        }
    }
}

}  // namespace

Bond make_bond(CellId a, CellId b) { return a < b ? Bond{a, b} : Bond{b, a}; }

std::vector<CellId> Configuration::neighbours(CellId id) const {
    std::vector<CellId> out;
    for (const auto& [a, b] : bonds) {
        if (a == id) out.push_back(b);
        if (b == id) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

BondMode default_bond_mode(const Model& model) {
    return model.bond_rules.empty() ? BondMode::Static : BondMode::Dynamic;
}

Configuration initial_configuration(const Model& model) {
    Configuration config;
    for (const auto& cell : model.cells) {
        const CellId id = config.next_id++;
        config.cells.emplace(id, Cell{id, cell.type, cell.contents});
    }
    for (const auto& [a, b] : model.initial_edges) {
        config.bonds.insert(make_bond(a, b));
    }
    config.environment = model.environment;
    return config;
}

std::vector<RuleInstance> applicable_instances(const Model& model, const Configuration& config,
                                               CellId cell_id) {
    auto it = config.cells.find(cell_id);
    if (it == config.cells.end()) throw UnknownCell(cell_id);
    const Cell& cell = it->second;
    std::vector<RuleInstance> out;
    std::vector<CellId> neighbours;
    bool neighbours_known = false;

    for (std::size_t i = 0; i < model.rules.size(); ++i) {
        const Rule& rule = model.rules[i];
        if (rule_cell_type(rule) != cell.type) continue;
        std::visit(overloaded{
                       [&](const CommIn& r) {
                           if (!trigger_present(r.trigger, cell.contents)) return;
                           if (!neighbours_known) {
                               neighbours = config.neighbours(cell_id);
                               neighbours_known = true;
                           }
                           for (CellId n : neighbours) {
                               if (config.cells.at(n).contents.count(r.moved) > 0) {
                                   out.push_back({i, cell_id, n});
                               }
                           }
                       },
                       [&](const CommEnter& r) {
                           if (trigger_present(r.trigger, cell.contents) &&
                               config.environment.count(r.moved) > 0) {
                               out.push_back({i, cell_id, std::nullopt});
                           }
                       },
                       [&](const CommExit& r) {
                           if (cell.contents.count(r.moved) > 0) out.push_back({i, cell_id, std::nullopt});
                       },
                       [&](const auto& r) {
                           if (cell.contents.count(r.consumed) > 0) {
                               out.push_back({i, cell_id, std::nullopt});
                           }
                       },
                   },
                   rule);
    }
    return out;
}

StepSelection select_step(const Model& model, const Configuration& config, StepMode mode,
                          Rng& rng) {
    Residual res;
    res.environment = config.environment;
    std::vector<RuleInstance> candidates;

    // Adjacency built once; Configuration::neighbours is linear in the bond count.
    std::unordered_map<CellId, std::vector<CellId>> adjacency;
    for (const auto& [a, b] : config.bonds) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    for (auto& [id, list] : adjacency) std::sort(list.begin(), list.end());

    std::unordered_map<CellType, std::vector<std::size_t>> rules_by_type;
    for (std::size_t i = 0; i < model.rules.size(); ++i) rules_by_type[rule_cell_type(model.rules[i])].push_back(i);

    res.slots.resize(config.cells.empty() ? 0 : config.cells.rbegin()->first + 1);
    for (const auto& [id, cell] : config.cells) {
        res.slots[id].cell = &cell;
        auto own_rules = rules_by_type.find(cell.type);
        if (own_rules == rules_by_type.end()) continue;
        for (std::size_t i : own_rules->second) {
            const Rule& rule = model.rules[i];
            if (const auto* in = std::get_if<CommIn>(&rule)) {
                if (!trigger_present(in->trigger, cell.contents)) continue;
                auto adj = adjacency.find(id);
                if (adj == adjacency.end()) continue;
                for (CellId n : adj->second) {
                    if (config.cells.at(n).contents.count(in->moved) > 0) candidates.push_back({i, id, n});
                }
            } else if (const auto* enter = std::get_if<CommEnter>(&rule)) {
                if (trigger_present(enter->trigger, cell.contents) && config.environment.count(enter->moved) > 0) {
                    candidates.push_back({i, id, std::nullopt});
                }
            } else if (const auto* exit = std::get_if<CommExit>(&rule)) {
                if (cell.contents.count(exit->moved) > 0) candidates.push_back({i, id, std::nullopt});
            } else if (std::visit([&](const auto& r) {
                           if constexpr (requires { r.consumed; }) return cell.contents.count(r.consumed) > 0;
                           return false;
                       },
                       rule)) {
                candidates.push_back({i, id, std::nullopt});
            }
        }
    }

    // Resources only shrink and locks only tighten, so a candidate that stops
    // fitting never fits again within this step and can be dropped for good.
    StepSelection selection;
    while (!candidates.empty()) {
        const std::size_t k = rng.below(candidates.size());
        if (!fits(model, candidates[k], res)) {
            candidates[k] = candidates.back();
            candidates.pop_back();
            continue;
        }
        charge(model, candidates[k], res);
        selection.instances.push_back(candidates[k]);
    }

    if (mode == StepMode::ArbitraryParallel && !selection.instances.empty()) {
        std::vector<RuleInstance> kept;
        while (kept.empty()) {
            for (const auto& inst : selection.instances) {
                if (rng.coin()) kept.push_back(inst);
            }
        }
        selection.instances = std::move(kept);
    }
    std::sort(selection.instances.begin(), selection.instances.end());
    return selection;
}

Configuration recompute_bonds(const Configuration& config, const Model& model, BondMode mode) {
    Configuration out = config;
    rebuild_bonds(out, model, mode);
    return out;
}

namespace {

void apply_in_place(const Model& model, Configuration& next, const StepSelection& selection,
                    const EngineOptions& options) {
    struct Target {
        Cell* cell;
        Cell* source;
    };
    using Slot = std::map<CellId, Cell>::iterator;
    std::vector<Slot> index(next.cells.empty() ? 0 : next.cells.rbegin()->first + 1, next.cells.end());
    for (auto it = next.cells.begin(); it != next.cells.end(); ++it) index[it->first] = it;
    auto slot = [&](CellId id) -> Slot {
        if (id >= index.size() || index[id] == next.cells.end()) {
            throw InternalError("stale selection: cell " + std::to_string(id) + " is not live");
        }
        return index[id];
    };
    auto live = [&](CellId id) -> Cell& { return slot(id)->second; };

    // Enabling conditions are read before anything moves.
    std::vector<Target> targets;
    targets.reserve(selection.instances.size());
    for (const RuleInstance& inst : selection.instances) {
        if (inst.rule >= model.rules.size()) throw InternalError("stale selection: unknown rule");
        const Rule& rule = model.rules[inst.rule];
        Cell& cell = live(inst.cell);
        if (cell.type != rule_cell_type(rule)) {
            throw InternalError("stale selection: rule " + std::to_string(inst.rule) +
                                " does not apply to cells of type " + cell.type.name());
        }
        Target t{&cell, nullptr};
        if (const auto* in = std::get_if<CommIn>(&rule)) {
            if (!inst.source || !next.bonds.contains(make_bond(inst.cell, *inst.source)) ||
                !trigger_present(in->trigger, cell.contents)) {
                throw InternalError("stale selection: communication not enabled");
            }
            t.source = &live(*inst.source);
        } else if (const auto* enter = std::get_if<CommEnter>(&rule)) {
            if (!trigger_present(enter->trigger, cell.contents)) {
                throw InternalError("stale selection: promoter absent");
            }
        }
        targets.push_back(t);
    }

    std::vector<std::pair<Cell*, Symbol>> incoming;
    std::vector<std::pair<Cell*, const Multiset*>> produced;
    Multiset to_environment;
    std::vector<std::pair<Cell*, CellType>> retype;
    std::vector<std::pair<CellId, const Divide*>> divisions;
    std::vector<CellId> deaths;

    try {
        for (std::size_t k = 0; k < targets.size(); ++k) {
            const RuleInstance& inst = selection.instances[k];
            Cell& cell = *targets[k].cell;
            std::visit(overloaded{
                           [&](const CommIn& r) {
                               targets[k].source->contents.remove(r.moved);
                               incoming.emplace_back(&cell, r.moved);
                           },
                           [&](const CommEnter& r) {
                               next.environment.remove(r.moved);
                               incoming.emplace_back(&cell, r.moved);
                           },
                           [&](const CommExit& r) {
                               cell.contents.remove(r.moved);
                               to_environment.add(r.moved);
                           },
                           [&](const Transform& r) {
                               cell.contents.remove(r.consumed);
                               produced.emplace_back(&cell, &r.produced);
                           },
                           [&](const Differentiate& r) {
                               cell.contents.remove(r.consumed);
                               incoming.emplace_back(&cell, r.produced);
                               retype.emplace_back(&cell, r.to_type);
                           },
                           [&](const Divide& r) {
                               cell.contents.remove(r.consumed);
                               divisions.emplace_back(inst.cell, &r);
                           },
                           [&](const Die& r) {
                               cell.contents.remove(r.consumed);
                               deaths.push_back(inst.cell);
                           },
                       },
                       model.rules[inst.rule]);
        }
    } catch (const UnderflowError& e) {
        throw InternalError(std::string("stale selection: ") + e.what());
    }

    for (auto& [cell, symbol] : incoming) cell->contents.add(symbol);
    for (auto& [cell, objects] : produced) cell->contents.add(*objects);
    next.environment.add(to_environment);
    for (auto& [cell, type] : retype) cell->type = type;

    // Daughter ids follow the parents' id order.
    std::sort(divisions.begin(), divisions.end());
    std::unordered_map<CellId, std::pair<CellId, CellId>> daughters;
    for (const auto& [id, rule] : divisions) {
        auto node = next.cells.extract(slot(id));
        index[id] = next.cells.end();
        Cell& left = node.mapped();
        Cell right{next.next_id + 1, rule->right_type.value_or(left.type), left.contents};
        left.id = next.next_id;
        left.contents.add(rule->left_product);
        right.contents.add(rule->right_product);
        next.next_id += 2;
        if (!next.bonds.empty()) daughters.emplace(id, std::pair{left.id, right.id});
        node.key() = left.id;
        next.cells.insert(next.cells.end(), std::move(node));
        next.cells.emplace_hint(next.cells.end(), right.id, std::move(right));
    }
    for (CellId id : deaths) {
        const Slot it = slot(id);
        if (options.death_releases_objects) next.environment.add(it->second.contents);
        next.cells.erase(it);
        index[id] = next.cells.end();
    }

    ++next.step_index;
    const BondMode mode = options.bonds.value_or(default_bond_mode(model));
    if (mode == BondMode::Static && !daughters.empty()) {
        std::set<Bond> inherited;
        auto heirs = [&](CellId id) -> std::vector<CellId> {
            auto it = daughters.find(id);
            if (it == daughters.end()) return {id};
            return {it->second.first, it->second.second};
        };
        for (const auto& [a, b] : next.bonds) {
            for (CellId x : heirs(a)) {
                for (CellId y : heirs(b)) {
                    if (x != y) inherited.insert(make_bond(x, y));
                }
            }
        }
        next.bonds = std::move(inherited);
    }
    rebuild_bonds(next, model, mode);
}

}  // namespace

Configuration apply_step(const Model& model, const Configuration& config,
                         const StepSelection& selection, const EngineOptions& options) {
    Configuration next = config;
    apply_in_place(model, next, selection, options);
    return next;
}

Configuration apply_step(const Model& model, Configuration&& config, const StepSelection& selection,
                         const EngineOptions& options) {
    apply_in_place(model, config, selection, options);
    return std::move(config);
}

RunResult run(const Model& model, std::uint64_t steps, const EngineOptions& options,
              std::uint64_t seed) {
    validate(model);
    Rng rng(seed);
    RunResult result;
    result.snapshots.push_back(initial_configuration(model));
    for (std::uint64_t k = 0; k < steps; ++k) {
        const Configuration& current = result.snapshots.back();
        StepSelection selection = select_step(model, current, options.mode, rng);
        if (selection.empty()) {
            result.halted_at = current.step_index;
            break;
        }
        Configuration next = apply_step(model, current, selection, options);
        result.fired.push_back(std::move(selection));
        result.snapshots.push_back(std::move(next));
    }
    return result;
}

}  // namespace opsim::pps
