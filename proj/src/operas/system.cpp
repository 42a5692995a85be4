#include "opsim/operas/system.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

namespace opsim::operas {

Link make_link(AgentId a, AgentId b) { return a < b ? Link{a, b} : Link{b, a}; }

bool Environment::in_bounds(std::int64_t x, std::int64_t y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
}

Multiset& Environment::at(std::int64_t x, std::int64_t y) {
    if (!in_bounds(x, y)) {
        throw OutOfBounds("grid position (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside " +
                          std::to_string(width) + "x" + std::to_string(height));
    }
    return grid[static_cast<std::size_t>(y * width + x)];
}

const Multiset& Environment::at(std::int64_t x, std::int64_t y) const {
    return const_cast<Environment&>(*this).at(x, y);
}

Multiset Environment::totals() const {
    Multiset out;
    for (const auto& cell : grid) out.add(cell);
    return out;
}

std::vector<AgentId> System::peers(AgentId id) const {
    std::vector<AgentId> out;
    for (const auto& [a, b] : relation) {
        if (a == id) out.push_back(b);
        if (b == id) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::set<Symbol> percept_alphabet(const AgentType& type) {
    std::set<Symbol> out{Symbol("tick")};
    for (Symbol s : type.percept_filter) {
        for (const char* dir : {"here", "N", "E", "S", "W"}) out.insert(Symbol(s.name() + "_" + dir));
    }
    return out;
}

std::set<std::pair<std::string, Symbol>> system_percepts(const System& system) {
    std::set<std::pair<std::string, Symbol>> out;
    for (const auto& [name, reg] : system.registry) {
        for (Symbol s : percept_alphabet(reg.type)) out.emplace(name, s);
    }
    return out;
}

std::pair<std::int64_t, std::int64_t> position(const Agent& agent, const Environment& env) {
    auto it = agent.memory.find("pos");
    if (it == agent.memory.end() || it->second.kind() != xm::ValueKind::Tuple || it->second.items().size() != 2 ||
        it->second.items()[0].kind() != xm::ValueKind::Int || it->second.items()[1].kind() != xm::ValueKind::Int) {
        throw OutOfBounds("agent " + std::to_string(agent.id) + " has no (x, y) position");
    }
    const std::int64_t x = it->second.items()[0].as_int();
    const std::int64_t y = it->second.items()[1].as_int();
    if (!env.in_bounds(x, y)) {
        throw OutOfBounds("agent " + std::to_string(agent.id) + " is at (" + std::to_string(x) + ", " +
                          std::to_string(y) + "), outside the grid");
    }
    return {x, y};
}

std::vector<Symbol> perceive(const Agent& agent, const AgentType& type, const Environment& env) {
    const auto [x, y] = position(agent, env);
    struct Dir {
        const char* name;
        std::int64_t dx, dy;
    };
    static constexpr std::array<Dir, 5> dirs{{{"here", 0, 0}, {"N", 0, -1}, {"E", 1, 0}, {"S", 0, 1}, {"W", -1, 0}}};
    std::vector<Symbol> out;
    for (Symbol object : type.percept_filter) {
        for (const Dir& d : dirs) {
            const std::int64_t nx = x + d.dx;
            const std::int64_t ny = y + d.dy;
            if (!env.in_bounds(nx, ny)) continue;
            const Count n = env.at(nx, ny).count(object);
            if (n == 0) continue;
            const Symbol percept(object.name() + "_" + d.name);
            out.insert(out.end(), static_cast<std::size_t>(n), percept);
        }
    }
    out.emplace_back("tick");
    return out;
}

// ---------------------------------------------------------------------------
// Validation and instantiation

namespace {

const xm::FieldDecl* find_field(const xm::MachineDef& def, const std::string& name) {
    for (const auto& f : def.memory) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

void check_condition(const xm::Expr& expr, const std::vector<const xm::MachineDef*>& scope,
                     const std::string& path, std::vector<Issue>& issues) {
    xm::walk(expr, [&](const xm::Expr& e) {
        if (e.kind == xm::Expr::Kind::Input) {
            issues.push_back({"E-BAD-CONTEXT", "reconfiguration conditions have no input", path, "input"});
        }
        if (e.kind != xm::Expr::Kind::Field) return;
        for (const auto* def : scope) {
            if (!find_field(*def, e.name)) {
                issues.push_back({"E-UNDECLARED-FIELD",
                                  "memory of " + def->name + " has no field '" + e.name + "'", path, e.name});
            }
        }
    });
}

void check_rule(const ReconfigRule& rule, const std::vector<const xm::MachineDef*>& scope,
                const std::map<std::string, const xm::MachineDef*>& type_defs, const std::string& path,
                std::vector<Issue>& issues) {
    check_condition(rule.condition, scope, path, issues);
    const Action& a = rule.action;
    switch (a.kind) {
        case Action::Kind::AddAgent: {
            if (a.selector != Selector::Self) {
                issues.push_back({"E-BAD-SELECTOR", "add_agent acts on 'self' only", path, ""});
            }
            auto it = type_defs.find(a.agent_type);
            if (it == type_defs.end()) {
                issues.push_back({"E-UNDECLARED-TYPE", "agent type '" + a.agent_type + "' is not declared", path,
                                  a.agent_type});
                break;
            }
            for (const auto& [field, expr] : a.initializer) {
                if (!find_field(*it->second, field)) {
                    issues.push_back({"E-UNDECLARED-FIELD",
                                      "memory of " + it->second->name + " has no field '" + field + "'", path, field});
                }
                check_condition(expr, scope, path, issues);
            }
            break;
        }
        case Action::Kind::RemoveAgent: break;
        case Action::Kind::AddChannel:
            if (a.selector != Selector::Nearest) {
                issues.push_back({"E-BAD-SELECTOR", "add_channel needs a 'nearest' selector", path, ""});
            }
            break;
        case Action::Kind::RemoveChannel:
            if (a.selector != Selector::Peer && a.selector != Selector::NearestPeer) {
                issues.push_back({"E-BAD-SELECTOR", "remove_channel needs a 'peer' or 'nearest_peer' selector", path, ""});
            }
            break;
    }
    if (a.selector == Selector::Nearest && a.radius < 0) {
        issues.push_back({"E-OUT-OF-RANGE", "selector radius must be non-negative", path, ""});
    }
}

bool pos_in_bounds(const xm::Value& v, std::int64_t w, std::int64_t h) {
    if (v.kind() != xm::ValueKind::Tuple || v.items().size() != 2) return false;
    const auto& p = v.items();
    if (p[0].kind() != xm::ValueKind::Int || p[1].kind() != xm::ValueKind::Int) return false;
    return p[0].as_int() >= 0 && p[1].as_int() >= 0 && p[0].as_int() < w && p[1].as_int() < h;
}

}  // namespace

std::vector<Issue> validation_issues(const Spec& spec) {
    std::vector<Issue> issues;
    std::map<std::string, const xm::MachineDef*> defs;
    for (const auto& def : spec.behaviours) {
        if (!defs.emplace(def.name, &def).second) {
            issues.push_back({"E-DUPLICATE", "machine definition '" + def.name + "' declared twice",
                              "machine " + def.name, def.name});
        }
        auto sub = xm::validation_issues(def, xm::MachineContext::Operas);
        issues.insert(issues.end(), sub.begin(), sub.end());
    }

    std::map<std::string, const xm::MachineDef*> type_defs;
    for (const auto& t : spec.types) {
        const std::string path = "type " + t.name;
        auto it = defs.find(t.behaviour);
        if (it == defs.end()) {
            issues.push_back({"E-UNDECLARED-MACHINE", "no machine definition named '" + t.behaviour + "'", path,
                              t.behaviour});
            continue;
        }
        if (!type_defs.emplace(t.name, it->second).second) {
            issues.push_back({"E-DUPLICATE", "agent type '" + t.name + "' declared twice", path, t.name});
        }
        const xm::FieldDecl* pos = find_field(*it->second, "pos");
        if (!pos || pos->kind != xm::ValueKind::Tuple) {
            issues.push_back({"E-MISSING-POS", "behaviour of '" + t.name + "' needs a tuple field 'pos'", path, t.name});
        }
    }

    for (const auto& t : spec.types) {
        auto it = type_defs.find(t.name);
        if (it == type_defs.end()) continue;
        for (std::size_t i = 0; i < t.str_mut.size(); ++i) {
            const std::string path = "type " + t.name + "/rule[" + std::to_string(i) + "]";
            if (t.str_mut[i].for_type) {
                issues.push_back({"E-BAD-CONTEXT", "type rules cannot carry a 'for' filter", path, ""});
            }
            check_rule(t.str_mut[i], {it->second}, type_defs, path, issues);
        }
    }
    for (std::size_t i = 0; i < spec.global_rules.size(); ++i) {
        const ReconfigRule& rule = spec.global_rules[i];
        const std::string path = "global[" + std::to_string(i) + "]";
        std::vector<const xm::MachineDef*> scope;
        if (rule.for_type) {
            auto it = type_defs.find(*rule.for_type);
            if (it == type_defs.end()) {
                issues.push_back({"E-UNDECLARED-TYPE", "agent type '" + *rule.for_type + "' is not declared", path,
                                  *rule.for_type});
                continue;
            }
            scope.push_back(it->second);
        } else {
            for (const auto& [name, def] : type_defs) scope.push_back(def);
        }
        check_rule(rule, scope, type_defs, path, issues);
    }

    if (spec.width < 1 || spec.height < 1) {
        issues.push_back({"E-OUT-OF-RANGE", "grid must be at least 1x1", "grid", ""});
    }
    for (std::size_t i = 0; i < spec.placements.size(); ++i) {
        const auto& p = spec.placements[i];
        if (p.x < 0 || p.y < 0 || p.x >= spec.width || p.y >= spec.height) {
            issues.push_back({"E-OUT-OF-RANGE",
                              "placement (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is outside the grid",
                              "place[" + std::to_string(i) + "]", ""});
        }
    }
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        const AgentDecl& a = spec.agents[i];
        const std::string path = "agent[" + std::to_string(i) + "]";
        auto it = type_defs.find(a.type);
        if (it == type_defs.end()) {
            issues.push_back({"E-UNDECLARED-TYPE", "agent type '" + a.type + "' is not declared", path, a.type});
            continue;
        }
        xm::Memory memory = it->second->initial_memory();
        for (const auto& [field, value] : a.overrides) {
            const xm::FieldDecl* decl = find_field(*it->second, field);
            if (!decl) {
                issues.push_back({"E-UNDECLARED-FIELD", "memory has no field '" + field + "'", path, field});
            } else if (decl->kind != value.kind()) {
                issues.push_back({"E-TYPE-MISMATCH", "field '" + field + "' is " + xm::kind_name(decl->kind), path, field});
            } else {
                memory[field] = value;
            }
        }
        auto pos = memory.find("pos");
        if (pos != memory.end() && !pos_in_bounds(pos->second, spec.width, spec.height)) {
            issues.push_back({"E-OUT-OF-RANGE", "agent position " + pos->second.to_string() + " is outside the grid",
                              path, "pos"});
        }
    }
    for (std::size_t i = 0; i < spec.links.size(); ++i) {
        const auto [a, b] = spec.links[i];
        const std::string path = "link[" + std::to_string(i) + "]";
        const std::size_t n = spec.agents.size();
        if (a < 1 || b < 1 || a > n || b > n) {
            issues.push_back({"E-BAD-EDGE", "link references an agent index outside 1.." + std::to_string(n), path, ""});
        } else if (a == b) {
            issues.push_back({"E-SELF-LOOP", "link from agent " + std::to_string(a) + " to itself", path, ""});
        }
    }
    return issues;
}

System instantiate(const Spec& spec) {
    throw_if_issues(validation_issues(spec));
    System system;
    for (const auto& t : spec.types) {
        for (const auto& def : spec.behaviours) {
            if (def.name == t.behaviour) system.registry[t.name] = RegisteredType{t, def};
        }
    }
    system.global_rules = spec.global_rules;
    system.env.width = spec.width;
    system.env.height = spec.height;
    system.env.grid.assign(static_cast<std::size_t>(spec.width * spec.height), Multiset{});
    for (const auto& p : spec.placements) system.env.at(p.x, p.y).add(p.objects);
    system.env.globals = spec.globals;
    for (const auto& decl : spec.agents) {
        const auto& def = system.registry.at(decl.type).behaviour;
        Agent a;
        a.id = system.next_id++;
        a.type = decl.type;
        a.state = def.initial_state;
        a.memory = def.initial_memory();
        for (const auto& [field, value] : decl.overrides) a.memory[field] = value;
        system.agents.emplace(a.id, std::move(a));
    }
    for (const auto& [a, b] : spec.links) system.relation.insert(make_link(a, b));
    return system;
}

// ---------------------------------------------------------------------------
// Stepping

bool StepRecord::quiescent() const {
    return mutations.empty() &&
           std::none_of(activity.begin(), activity.end(), [](const AgentActivity& a) { return a.fired.has_value(); });
}

namespace {

std::int64_t manhattan(std::pair<std::int64_t, std::int64_t> a, std::pair<std::int64_t, std::int64_t> b) {
    return std::llabs(a.first - b.first) + std::llabs(a.second - b.second);
}

xm::EvalContext agent_context(const System& system, const Agent& agent, const xm::Memory& memory,
                              const Multiset& cell, std::int64_t roll, const Symbol& state) {
    xm::EvalContext ctx;
    ctx.memory = &memory;
    ctx.roll = roll;
    ctx.peers = static_cast<std::int64_t>(system.peers(agent.id).size());
    ctx.state = state;
    ctx.width = system.env.width;
    ctx.height = system.env.height;
    ctx.env_count = [&cell](Symbol s) { return cell.count(s); };
    return ctx;
}

std::vector<std::pair<Symbol, Count>> effect_amounts(const xm::Function& fn, const xm::EvalContext& ctx,
                                                     xm::EnvEffect::Op op) {
    std::vector<std::pair<Symbol, Count>> out;
    for (const auto& e : fn.effects) {
        if (e.op != op) continue;
        const std::int64_t n = xm::evaluate(e.amount, ctx).as_int();
        if (n < 0) throw xm::EvalError("environment effect amount " + std::to_string(n) + " is negative");
        out.emplace_back(e.object, n);
    }
    return out;
}

bool takes_available(const std::vector<std::pair<Symbol, Count>>& takes, const Multiset& cell) {
    Multiset need;
    for (const auto& [s, n] : takes) need.add(s, n);
    return multiset_contains(cell, need);
}

struct Candidate {
    const xm::Function* fn = nullptr;
    std::string target;
    std::optional<AgentId> peer;  // output recipient
};

struct Planned {
    AgentId agent = 0;
    const ReconfigRule* rule = nullptr;
    std::optional<AgentId> target;
};

std::optional<AgentId> resolve(const System& mid, const Agent& agent, const Action& action) {
    switch (action.selector) {
        case Selector::Self: return agent.id;
        case Selector::Peer: {
            const auto peers = mid.peers(agent.id);
            if (peers.empty()) return std::nullopt;
            if (peers.size() > 1) {
                throw SelectorAmbiguous("agent " + std::to_string(agent.id) + " has " +
                                        std::to_string(peers.size()) + " peers for selector 'peer'");
            }
            return peers.front();
        }
        case Selector::NearestPeer:
        case Selector::Nearest: {
            const auto here = position(agent, mid.env);
            const auto peers = mid.peers(agent.id);
            std::optional<AgentId> best;
            std::int64_t best_d = 0;
            for (const auto& [id, other] : mid.agents) {
                if (id == agent.id) continue;
                const bool linked = std::binary_search(peers.begin(), peers.end(), id);
                if (action.selector == Selector::NearestPeer && !linked) continue;
                if (action.selector == Selector::Nearest && action.kind == Action::Kind::AddChannel && linked) continue;
                const std::int64_t d = manhattan(here, position(other, mid.env));
                if (action.selector == Selector::Nearest && d > action.radius) continue;
                if (!best || d < best_d) {
                    best = id;
                    best_d = d;
                }
            }
            return best;
        }
    }
    return std::nullopt;
}

std::string agent_label(AgentId id) { return "agent " + std::to_string(id); }

}  // namespace

StepResult operas_step(const System& system, Rng& rng) {
    const System& pre = system;
    StepResult out{system, {}};
    System& next = out.system;
    StepRecord& record = out.record;

    // Behaviour phase.
    for (const auto& [id, agent] : pre.agents) {
        const std::int64_t roll = static_cast<std::int64_t>(rng.below(xm::kRollRange));
        const RegisteredType& reg = pre.registry.at(agent.type);
        const xm::MachineDef& def = reg.behaviour;
        const auto pos = position(agent, pre.env);
        const Multiset& cell = pre.env.at(pos.first, pos.second);
        const Symbol state(agent.state);
        AgentActivity act;
        act.agent = id;

        const auto outgoing = def.outgoing(agent.state);
        const auto peers = pre.peers(id);

        auto enabled = [&](const xm::Value& input, xm::Port::Kind in_kind) {
            std::vector<Candidate> found;
            xm::EvalContext ctx = agent_context(pre, agent, agent.memory, cell, roll, state);
            ctx.input = &input;
            for (const auto& [fn, target] : outgoing) {
                if (fn->input.kind != in_kind) continue;
                Candidate c{fn, target, std::nullopt};
                if (fn->output.kind == xm::Port::Kind::Peer) {
                    for (AgentId p : peers) {
                        if (!pre.pending.contains({id, p})) {
                            c.peer = p;
                            break;
                        }
                    }
                    if (!c.peer) continue;
                }
                if (!xm::guard_holds(*fn, ctx)) continue;
                if (!takes_available(effect_amounts(*fn, ctx, xm::EnvEffect::Op::Take), cell)) continue;
                found.push_back(c);
            }
            return found;
        };

        std::vector<Candidate> chosen;
        xm::Value input;
        std::optional<AgentId> message_from;
        try {
            for (const auto& [key, value] : pre.pending) {
                if (key.second != id) continue;
                chosen = enabled(value, xm::Port::Kind::Peer);
                if (!chosen.empty()) {
                    input = value;
                    message_from = key.first;
                }
                break;
            }
            if (chosen.empty()) {
                for (Symbol percept : perceive(agent, reg.type, pre.env)) {
                    if (!def.inputs.contains(percept)) continue;
                    const xm::Value v = xm::Value::symbol(percept);
                    chosen = enabled(v, xm::Port::Kind::Stream);
                    if (!chosen.empty()) {
                        input = v;
                        break;
                    }
                }
            }
            if (chosen.size() > 1) {
                std::vector<std::string> names;
                for (const auto& c : chosen) names.push_back(c.fn->name);
                throw xm::NondeterminismError(agent.state, names);
            }
        } catch (xm::XmError& e) {
            e.machine = agent_label(id);
            throw;
        }

        if (chosen.empty()) {
            act.idle_reason = outgoing.empty() ? "terminal-state" : "no-applicable-function";
            record.activity.push_back(std::move(act));
            continue;
        }
        const Candidate& c = chosen.front();
        xm::EvalContext ctx = agent_context(pre, agent, agent.memory, cell, roll, state);
        ctx.input = &input;
        xm::Firing firing;
        try {
            firing = xm::fire(def, *c.fn, c.target, ctx);
        } catch (xm::XmError& e) {
            e.machine = agent_label(id);
            throw;
        }
        const auto takes = effect_amounts(*c.fn, ctx, xm::EnvEffect::Op::Take);
        const auto puts = effect_amounts(*c.fn, ctx, xm::EnvEffect::Op::Put);
        Multiset& target_cell = next.env.at(pos.first, pos.second);
        if (!takes_available(takes, target_cell)) {
            act.idle_reason = "contention";
            record.activity.push_back(std::move(act));
            continue;
        }
        for (const auto& [s, n] : takes) target_cell.remove(s, n);
        for (const auto& [s, n] : puts) target_cell.add(s, n);

        Agent& moved = next.agents.at(id);
        moved.state = firing.next_state;
        moved.memory = std::move(firing.memory);
        position(moved, next.env);
        if (message_from) {
            next.pending.erase({*message_from, id});
            act.received_from = message_from;
        }
        if (c.peer) {
            next.pending[{id, *c.peer}] = firing.output;
            act.sent_to = c.peer;
        }
        act.fired = c.fn->name;
        record.activity.push_back(std::move(act));
    }

    // Mutation phase, evaluated on the post-behaviour snapshot.
    const System mid = next;
    std::vector<Planned> structural;
    std::vector<Planned> channel;
    for (const auto& [id, agent] : mid.agents) {
        const std::int64_t roll = static_cast<std::int64_t>(rng.below(xm::kRollRange));
        const RegisteredType& reg = mid.registry.at(agent.type);
        const auto pos = position(agent, mid.env);
        const xm::EvalContext ctx =
            agent_context(mid, agent, agent.memory, mid.env.at(pos.first, pos.second), roll, Symbol(agent.state));
        std::vector<const ReconfigRule*> held_structural;
        auto consider = [&](const ReconfigRule& rule) {
            if (!xm::evaluate_bool(rule.condition, ctx)) return;
            if (rule.action.structural()) {
                held_structural.push_back(&rule);
            } else {
                channel.push_back({id, &rule, resolve(mid, agent, rule.action)});
            }
        };
        for (const auto& rule : reg.type.str_mut) consider(rule);
        for (const auto& rule : mid.global_rules) {
            if (!rule.for_type || *rule.for_type == agent.type) consider(rule);
        }
        if (held_structural.empty()) continue;
        std::size_t pick = 0;
        if (held_structural.size() > 1) {
            pick = static_cast<std::size_t>(rng.below(held_structural.size()));
            std::string names;
            for (const auto* r : held_structural) names += (names.empty() ? "" : ", ") + r->name;
            record.warnings.push_back(agent_label(id) + ": structural rules " + names + " all hold; fired " +
                                      held_structural[pick]->name);
        }
        const ReconfigRule* rule = held_structural[pick];
        structural.push_back({id, rule, resolve(mid, agent, rule->action)});
    }

    std::set<AgentId> removing;
    for (const auto& p : structural) {
        if (p.rule->action.kind == Action::Kind::RemoveAgent && p.target) removing.insert(*p.target);
    }

    for (const auto& p : channel) {
        if (!p.target) continue;
        const Link link = make_link(p.agent, *p.target);
        if (p.rule->action.kind == Action::Kind::AddChannel) {
            if (removing.contains(link.first) || removing.contains(link.second)) continue;
            if (!next.relation.insert(link).second) continue;
        } else {
            if (!next.relation.contains(link)) continue;
            if (next.pending.contains({link.first, link.second}) || next.pending.contains({link.second, link.first})) {
                record.warnings.push_back(agent_label(p.agent) + ": removal of channel to " +
                                          std::to_string(*p.target) + " deferred, message in flight");
                continue;
            }
            next.relation.erase(link);
        }
        record.mutations.push_back({p.agent, p.rule->name, p.rule->action.kind, p.target});
    }

    for (const auto& p : structural) {
        if (p.rule->action.kind != Action::Kind::RemoveAgent || !p.target) continue;
        if (!next.agents.erase(*p.target)) continue;
        ++record.removed;
        record.mutations.push_back({p.agent, p.rule->name, Action::Kind::RemoveAgent, p.target});
        std::erase_if(next.relation, [&](const Link& l) { return l.first == *p.target || l.second == *p.target; });
        std::erase_if(next.pending, [&](const auto& kv) {
            return kv.first.first == *p.target || kv.first.second == *p.target;
        });
    }

    for (const auto& p : structural) {
        const Action& action = p.rule->action;
        if (action.kind != Action::Kind::AddAgent) continue;
        const Agent& creator = mid.agents.at(p.agent);
        const RegisteredType& reg = next.registry.at(action.agent_type);
        Agent fresh;
        fresh.id = next.next_id++;
        fresh.type = action.agent_type;
        fresh.state = reg.behaviour.initial_state;
        fresh.memory = reg.behaviour.initial_memory();
        auto creator_pos = creator.memory.find("pos");
        if (creator_pos != creator.memory.end() && fresh.memory.contains("pos")) {
            fresh.memory["pos"] = creator_pos->second;
        }
        const auto pos = position(creator, mid.env);
        const xm::EvalContext ctx = agent_context(mid, creator, creator.memory, mid.env.at(pos.first, pos.second), 0,
                                                  Symbol(creator.state));
        for (const auto& [field, expr] : action.initializer) {
            xm::Value v = xm::evaluate(expr, ctx);
            const auto& current = fresh.memory.at(field);
            if (v.kind() != current.kind()) {
                throw xm::EvalError("initializer for '" + field + "' gives " + xm::kind_name(v.kind()) +
                                    ", field is " + xm::kind_name(current.kind()));
            }
            fresh.memory[field] = std::move(v);
        }
        position(fresh, next.env);
        record.mutations.push_back({p.agent, p.rule->name, Action::Kind::AddAgent, fresh.id});
        next.agents.emplace(fresh.id, std::move(fresh));
        ++record.added;
    }

    ++next.step_index;
    return out;
}

}  // namespace opsim::operas
