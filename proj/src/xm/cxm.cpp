#include "opsim/xm/cxm.hpp"

#include <map>
#include <set>

namespace opsim::xm {

const Channel* CxmSystem::find_channel(const std::string& id) const {
    for (const auto& c : channels) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

bool RoundResult::all_idle() const {
    for (const auto& a : activity) {
        if (a.fired) return false;
    }
    return true;
}

std::vector<Issue> validation_issues(const CxmSpec& spec) {
    std::vector<Issue> issues;
    std::map<std::string, const MachineDef*> defs;
    for (const auto& def : spec.defs) {
        if (!defs.emplace(def.name, &def).second) {
            issues.push_back({"E-DUPLICATE", "machine definition '" + def.name + "' declared twice",
                              "machine " + def.name, def.name});
        }
        auto sub = validation_issues(def, MachineContext::Communicating);
        issues.insert(issues.end(), sub.begin(), sub.end());
    }

    std::map<std::string, const MachineDecl*> instances;
    for (const auto& m : spec.machines) {
        const std::string path = "instance " + m.id;
        if (!instances.emplace(m.id, &m).second) {
            issues.push_back({"E-DUPLICATE", "machine instance '" + m.id + "' declared twice", path, m.id});
        }
        auto it = defs.find(m.def);
        if (it == defs.end()) {
            issues.push_back({"E-UNDECLARED-MACHINE", "no machine definition named '" + m.def + "'", path, m.def});
            continue;
        }
        const MachineDef& def = *it->second;
        for (Symbol s : m.stream) {
            if (!def.inputs.contains(s)) {
                issues.push_back({"E-UNDECLARED-SYMBOL", "stream symbol '" + s.name() + "' is not an input of " + def.name,
                                  path, s.name()});
            }
        }
        for (const auto& [field, value] : m.overrides) {
            const FieldDecl* decl = nullptr;
            for (const auto& f : def.memory) {
                if (f.name == field) decl = &f;
            }
            if (!decl) {
                issues.push_back({"E-UNDECLARED-FIELD", "memory has no field '" + field + "'", path, field});
            } else if (decl->kind != value.kind()) {
                issues.push_back({"E-TYPE-MISMATCH", "field '" + field + "' is " + kind_name(decl->kind), path, field});
            }
        }
    }

    std::map<std::string, const ChannelDecl*> channels;
    for (const auto& c : spec.channels) {
        const std::string path = "channel " + c.id;
        if (!channels.emplace(c.id, &c).second) {
            issues.push_back({"E-DUPLICATE", "channel '" + c.id + "' declared twice", path, c.id});
        }
        for (const std::string* end : {&c.from, &c.to}) {
            if (!instances.contains(*end)) {
                issues.push_back({"E-BAD-CHANNEL", "channel endpoint '" + *end + "' is not a machine instance", path, *end});
            }
        }
    }

    // Each instance may only write channels it sends on and read channels it receives on.
    for (const auto& m : spec.machines) {
        auto it = defs.find(m.def);
        if (it == defs.end()) continue;
        for (const auto& fn : it->second->functions) {
            const std::string path = "instance " + m.id;
            auto check = [&](const Port& port, bool writing) {
                if (port.kind != Port::Kind::Channel) return;
                auto ch = channels.find(port.channel);
                if (ch == channels.end()) {
                    issues.push_back({"E-BAD-CHANNEL", "function '" + fn.name + "' uses undeclared channel '" +
                                                           port.channel + "'",
                                      path, port.channel});
                    return;
                }
                const std::string& owner = writing ? ch->second->from : ch->second->to;
                if (owner != m.id) {
                    issues.push_back({"E-BAD-CHANNEL",
                                      "'" + m.id + "' cannot " + (writing ? "write" : "read") + " channel '" +
                                          port.channel + "'",
                                      path, port.channel});
                }
            };
            check(fn.input, false);
            check(fn.output, true);
        }
    }
    return issues;
}

CxmSystem instantiate(const CxmSpec& spec) {
    throw_if_issues(validation_issues(spec));
    std::map<std::string, std::shared_ptr<const MachineDef>> defs;
    for (const auto& def : spec.defs) defs[def.name] = std::make_shared<const MachineDef>(def);

    CxmSystem system;
    std::map<std::string, std::size_t> index;
    for (const auto& decl : spec.machines) {
        MachineInstance m;
        m.id = decl.id;
        m.def = defs.at(decl.def);
        m.state = m.def->initial_state;
        m.memory = m.def->initial_memory();
        for (const auto& [field, value] : decl.overrides) m.memory[field] = value;
        m.stream = decl.stream;
        index[decl.id] = system.machines.size();
        system.machines.push_back(std::move(m));
    }
    for (const auto& c : spec.channels) {
        system.channels.push_back({c.id, index.at(c.from), index.at(c.to), std::nullopt});
    }
    return system;
}

RoundResult cxm_step(const CxmSystem& system, Rng& rng) {
    RoundResult result{system, {}};
    CxmSystem& next = result.system;
    std::map<std::string, std::size_t> channel_index;
    for (std::size_t i = 0; i < system.channels.size(); ++i) channel_index[system.channels[i].id] = i;

    for (std::size_t i = 0; i < system.machines.size(); ++i) {
        const MachineInstance& m = system.machines[i];
        const auto roll = static_cast<std::int64_t>(rng.below(kRollRange));
        Activity act;
        act.machine = m.id;

        struct Candidate {
            const Function* fn;
            std::string target;
            Value input;
        };
        std::vector<Candidate> enabled;
        std::string blocked;
        bool any_io_ready = false;
        const auto outgoing = m.def->outgoing(m.state);

        for (const auto& [fn, target] : outgoing) {
            Value input;
            if (fn->input.kind == Port::Kind::Stream) {
                if (m.cursor >= m.stream.size()) {
                    if (blocked.empty()) blocked = "stream-exhausted";
                    continue;
                }
                const Symbol s = m.stream[m.cursor];
                if (!m.def->inputs.contains(s)) {
                    InvalidInput err(m.state, s);
                    err.machine = m.id;
                    err.input_index = m.cursor;
                    throw err;
                }
                input = Value::symbol(s);
            } else {
                const Channel& ch = system.channels[channel_index.at(fn->input.channel)];
                if (!ch.buffer) {
                    if (blocked.empty()) blocked = "channel-empty";
                    continue;
                }
                input = *ch.buffer;
            }
            if (fn->output.kind == Port::Kind::Channel &&
                system.channels[channel_index.at(fn->output.channel)].buffer) {
                if (blocked.empty()) blocked = "channel-full";
                continue;
            }
            any_io_ready = true;
            EvalContext ctx;
            ctx.input = &input;
            ctx.memory = &m.memory;
            ctx.roll = roll;
            ctx.state = Symbol(m.state);
            if (guard_holds(*fn, ctx)) enabled.push_back({fn, target, std::move(input)});
        }

        if (enabled.size() > 1) {
            std::vector<std::string> names;
            for (const auto& c : enabled) names.push_back(c.fn->name);
            NondeterminismError err(m.state, std::move(names));
            err.machine = m.id;
            err.input_index = m.cursor;
            throw err;
        }
        if (enabled.empty()) {
            if (outgoing.empty()) {
                act.idle_reason = "terminal-state";
            } else if (any_io_ready) {
                act.idle_reason = "no-guard-holds";
            } else {
                act.idle_reason = blocked;
            }
            result.activity.push_back(std::move(act));
            continue;
        }

        const Candidate& c = enabled.front();
        EvalContext ctx;
        ctx.input = &c.input;
        ctx.memory = &m.memory;
        ctx.roll = roll;
        ctx.state = Symbol(m.state);
        Firing f = fire(*m.def, *c.fn, c.target, ctx);

        MachineInstance& out = next.machines[i];
        out.state = f.next_state;
        out.memory = std::move(f.memory);
        if (c.fn->input.kind == Port::Kind::Stream) {
            ++out.cursor;
        } else {
            next.channels[channel_index.at(c.fn->input.channel)].buffer.reset();
            act.read = c.fn->input.channel;
        }
        if (c.fn->output.kind == Port::Kind::Channel) {
            next.channels[channel_index.at(c.fn->output.channel)].buffer = f.output;
            act.wrote = c.fn->output.channel;
        } else {
            out.outputs.push_back(f.output);
        }
        act.fired = c.fn->name;
        act.output = std::move(f.output);
        result.activity.push_back(std::move(act));
    }
    ++next.round;
    return result;
}

}  // namespace opsim::xm
