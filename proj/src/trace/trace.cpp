#include "opsim/trace/trace.hpp"

#include <cstdio>
#include <ostream>

#include "opsim/dsl/parser.hpp"
#include "opsim/operas/system.hpp"
#include "opsim/xm/cxm.hpp"
#include "opsim/xm/machine.hpp"

namespace opsim::trace {

std::string fnv_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string mode_name(pps::StepMode mode) { return mode == pps::StepMode::MaximalParallel ? "max" : "arb"; }
std::string bond_mode_name(pps::BondMode mode) { return mode == pps::BondMode::Dynamic ? "dynamic" : "static"; }

void JsonlSink::record(const Json& record) {
    out_ << record.dump() << '\n';
    out_.flush();
}

namespace {

Json record(const char* kind) { return Json{{"v", kSchemaVersion}, {"record", kind}}; }

Json multiset_json(const Multiset& m) {
    Json out = Json::object();
    for (const auto& [s, n] : m) out[s.name()] = n;
    return out;
}

Json memory_json(const xm::Memory& memory) {
    Json out = Json::object();
    for (const auto& [field, v] : memory) out[field] = v.to_string();
    return out;
}

Json terminal(const RunSummary& s) {
    Json t = record("terminal");
    if (s.halted_at) {
        t["status"] = "halted";
        t["step"] = *s.halted_at;
    } else {
        t["status"] = "completed";
        t["steps"] = s.steps_completed;
    }
    return t;
}

void error_terminal(Sink& sink, std::uint64_t step, const Error& e) {
    Json t = record("terminal");
    t["status"] = "error";
    t["step"] = step;
    t["code"] = e.code();
    t["message"] = e.what();
    sink.record(t);
}

// -- pps --------------------------------------------------------------------

Json pps_snapshot(const pps::Model& model, const pps::Configuration& config, const pps::StepSelection* fired) {
    Json s = record("snapshot");
    s["step"] = config.step_index;
    Json cells = Json::array();
    for (const auto& [id, cell] : config.cells) {
        cells.push_back({{"id", id}, {"type", cell.type.name()}, {"contents", multiset_json(cell.contents)}});
    }
    s["cells"] = std::move(cells);
    Json bonds = Json::array();
    for (const auto& [a, b] : config.bonds) bonds.push_back({a, b});
    s["bonds"] = std::move(bonds);
    s["environment"] = multiset_json(config.environment);
    s["env_digest"] = fnv_hex(config.environment.to_string());
    Json f = Json::array();
    if (fired) {
        const auto& inst = fired->instances;
        for (std::size_t i = 0; i < inst.size();) {
            std::size_t j = i;
            while (j < inst.size() && inst[j] == inst[i]) ++j;
            Json e{{"rule", inst[i].rule},
                   {"kind", pps::rule_kind_name(model.rules[inst[i].rule])},
                   {"cell", inst[i].cell},
                   {"times", j - i}};
            if (inst[i].source) e["source"] = *inst[i].source;
            f.push_back(std::move(e));
            i = j;
        }
    }
    s["fired"] = std::move(f);
    return s;
}

RunSummary run_pps(const pps::Model& model, const RunOptions& opt, Sink& sink) {
    pps::EngineOptions engine{opt.mode, opt.bonds, opt.death_releases_objects};
    Rng rng(opt.seed);
    pps::Configuration config = pps::initial_configuration(model);
    sink.record(pps_snapshot(model, config, nullptr));
    RunSummary summary;
    for (std::uint64_t k = 0; k < opt.steps; ++k) {
        try {
            pps::StepSelection sel = pps::select_step(model, config, opt.mode, rng);
            if (sel.empty()) {
                summary.halted_at = config.step_index;
                break;
            }
            config = pps::apply_step(model, std::move(config), sel, engine);
            sink.record(pps_snapshot(model, config, &sel));
        } catch (const Error& e) {
            error_terminal(sink, config.step_index, e);
            throw;
        }
        ++summary.steps_completed;
    }
    sink.record(terminal(summary));
    return summary;
}

// -- standalone xm --------------------------------------------------------------

RunSummary run_xm(const dsl::XmModel& m, const RunOptions& opt, Sink& sink) {
    Rng rng(opt.seed);
    std::string state = m.def.initial_state;
    xm::Memory memory = m.def.initial_memory();
    auto snap = [&](std::uint64_t step) {
        Json s = record("snapshot");
        s["step"] = step;
        s["state"] = state;
        s["memory"] = memory_json(memory);
        s["cursor"] = step;
        return s;
    };
    sink.record([&] {
        Json s = snap(0);
        s["input"] = nullptr;
        s["fired"] = nullptr;
        s["output"] = nullptr;
        return s;
    }());
    RunSummary summary;
    for (std::uint64_t k = 0; k < opt.steps; ++k) {
        if (k >= m.stream.size()) {
            summary.halted_at = k;
            break;
        }
        const std::int64_t roll = static_cast<std::int64_t>(rng.below(xm::kRollRange));
        try {
            xm::StepOutcome o = xm::xm_step(m.def, state, memory, m.stream[k], roll);
            state = o.state;
            memory = std::move(o.memory);
            Json s = snap(k + 1);
            s["input"] = m.stream[k].name();
            s["fired"] = o.function;
            s["output"] = o.output.to_string();
            sink.record(s);
        } catch (xm::XmError& e) {
            e.machine = m.def.name;
            e.input_index = k;
            error_terminal(sink, k, e);
            throw;
        } catch (const Error& e) {
            error_terminal(sink, k, e);
            throw;
        }
        ++summary.steps_completed;
    }
    sink.record(terminal(summary));
    return summary;
}

// -- cxm ------------------------------------------------------------------------

Json cxm_snapshot(const xm::CxmSystem& sys, const std::vector<xm::Activity>* activity) {
    Json s = record("snapshot");
    s["step"] = sys.round;
    Json machines = Json::array();
    for (const auto& m : sys.machines) {
        Json outs = Json::array();
        for (const auto& v : m.outputs) outs.push_back(v.to_string());
        machines.push_back({{"id", m.id},
                            {"def", m.def->name},
                            {"state", m.state},
                            {"memory", memory_json(m.memory)},
                            {"cursor", m.cursor},
                            {"outputs", std::move(outs)}});
    }
    s["machines"] = std::move(machines);
    Json channels = Json::array();
    for (const auto& c : sys.channels) {
        channels.push_back({{"id", c.id},
                            {"from", sys.machines[c.sender].id},
                            {"to", sys.machines[c.receiver].id},
                            {"buffer", c.buffer ? Json(c.buffer->to_string()) : Json(nullptr)}});
    }
    s["channels"] = std::move(channels);
    Json act = Json::array();
    if (activity) {
        for (const auto& a : *activity) {
            Json e{{"machine", a.machine}};
            if (a.fired) {
                e["fired"] = *a.fired;
            } else {
                e["idle"] = a.idle_reason;
            }
            if (a.output) e["output"] = a.output->to_string();
            if (a.wrote) e["wrote"] = *a.wrote;
            if (a.read) e["read"] = *a.read;
            act.push_back(std::move(e));
        }
    }
    s["activity"] = std::move(act);
    return s;
}

RunSummary run_cxm(const xm::CxmSpec& spec, const RunOptions& opt, Sink& sink) {
    Rng rng(opt.seed);
    xm::CxmSystem sys = xm::instantiate(spec);
    sink.record(cxm_snapshot(sys, nullptr));
    RunSummary summary;
    for (std::uint64_t k = 0; k < opt.steps; ++k) {
        try {
            xm::RoundResult r = xm::cxm_step(sys, rng);
            if (r.all_idle()) {
                summary.halted_at = sys.round;
                break;
            }
            sys = std::move(r.system);
            sink.record(cxm_snapshot(sys, &r.activity));
        } catch (const Error& e) {
            error_terminal(sink, sys.round, e);
            throw;
        }
        ++summary.steps_completed;
    }
    sink.record(terminal(summary));
    return summary;
}

// -- operas -----------------------------------------------------------------------

std::string environment_text(const operas::Environment& env) {
    std::string out = std::to_string(env.width) + "x" + std::to_string(env.height);
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
        if (!env.grid[i].empty()) out += ";" + std::to_string(i) + "=" + env.grid[i].to_string();
    }
    return out + ";globals=" + env.globals.to_string();
}

const char* action_name(operas::Action::Kind k) {
    switch (k) {
        case operas::Action::Kind::AddAgent: return "add_agent";
        case operas::Action::Kind::RemoveAgent: return "remove_agent";
        case operas::Action::Kind::AddChannel: return "add_channel";
        case operas::Action::Kind::RemoveChannel: return "remove_channel";
    }
    return "?";
}

Json operas_snapshot(const operas::System& sys, const operas::StepRecord* rec) {
    Json s = record("snapshot");
    s["step"] = sys.step_index;
    Json agents = Json::array();
    for (const auto& [id, a] : sys.agents) {
        agents.push_back({{"id", id}, {"type", a.type}, {"state", a.state}, {"memory", memory_json(a.memory)}});
    }
    s["agents"] = std::move(agents);
    Json channels = Json::array();
    for (const auto& [a, b] : sys.relation) channels.push_back({a, b});
    s["channels"] = std::move(channels);
    Json pending = Json::array();
    for (const auto& [key, v] : sys.pending) {
        pending.push_back({{"from", key.first}, {"to", key.second}, {"value", v.to_string()}});
    }
    s["pending"] = std::move(pending);
    Json grid = Json::array();
    for (std::int64_t y = 0; y < sys.env.height; ++y) {
        for (std::int64_t x = 0; x < sys.env.width; ++x) {
            const Multiset& cell = sys.env.at(x, y);
            if (!cell.empty()) grid.push_back({{"x", x}, {"y", y}, {"objects", multiset_json(cell)}});
        }
    }
    s["environment"] = {{"width", sys.env.width},
                        {"height", sys.env.height},
                        {"grid", std::move(grid)},
                        {"totals", multiset_json(sys.env.totals())},
                        {"globals", multiset_json(sys.env.globals)}};
    s["env_digest"] = fnv_hex(environment_text(sys.env));
    Json act = Json::array();
    Json muts = Json::array();
    Json warns = Json::array();
    if (rec) {
        for (const auto& a : rec->activity) {
            Json e{{"agent", a.agent}};
            if (a.fired) {
                e["fired"] = *a.fired;
            } else {
                e["idle"] = a.idle_reason;
            }
            if (a.sent_to) e["sent_to"] = *a.sent_to;
            if (a.received_from) e["received_from"] = *a.received_from;
            act.push_back(std::move(e));
        }
        for (const auto& m : rec->mutations) {
            Json e{{"agent", m.agent}, {"rule", m.rule}, {"action", action_name(m.action)}};
            if (m.target) e["target"] = *m.target;
            muts.push_back(std::move(e));
        }
        for (const auto& w : rec->warnings) warns.push_back(w);
    }
    s["activity"] = std::move(act);
    s["mutations"] = std::move(muts);
    s["warnings"] = std::move(warns);
    s["added"] = rec ? rec->added : 0;
    s["removed"] = rec ? rec->removed : 0;
    return s;
}

RunSummary run_operas(const operas::Spec& spec, const RunOptions& opt, Sink& sink) {
    Rng rng(opt.seed);
    operas::System sys = operas::instantiate(spec);
    sink.record(operas_snapshot(sys, nullptr));
    RunSummary summary;
    for (std::uint64_t k = 0; k < opt.steps; ++k) {
        try {
            operas::StepResult r = operas::operas_step(sys, rng);
            if (r.record.quiescent()) {
                summary.halted_at = sys.step_index;
                break;
            }
            sys = std::move(r.system);
            sink.record(operas_snapshot(sys, &r.record));
        } catch (const Error& e) {
            error_terminal(sink, sys.step_index, e);
            throw;
        }
        ++summary.steps_completed;
    }
    sink.record(terminal(summary));
    return summary;
}

}  // namespace

RunSummary run_document(const dsl::ModelDocument& doc, const RunOptions& options, Sink& sink) {
    if (auto problems = dsl::check(doc); !problems.empty()) {
        throw ValidationError(problems.front().code + ": " + problems.front().message);
    }
    Json h = record("header");
    h["kind"] = dsl::kind_name(doc.kind);
    h["model_digest"] = dsl::digest(doc);
    h["seed"] = options.seed;
    h["steps"] = options.steps;
    h["version"] = kToolVersion;
    if (!doc.name.empty()) h["name"] = doc.name;
    switch (doc.kind) {
        case dsl::Kind::Pps: {
            const auto& model = std::get<pps::Model>(doc.body);
            h["mode"] = mode_name(options.mode);
            h["bonds"] = bond_mode_name(options.bonds.value_or(pps::default_bond_mode(model)));
            h["death_releases"] = options.death_releases_objects;
            sink.record(h);
            return run_pps(model, options, sink);
        }
        case dsl::Kind::Xm: sink.record(h); return run_xm(std::get<dsl::XmModel>(doc.body), options, sink);
        case dsl::Kind::Cxm: sink.record(h); return run_cxm(std::get<xm::CxmSpec>(doc.body), options, sink);
        case dsl::Kind::Operas: sink.record(h); return run_operas(std::get<operas::Spec>(doc.body), options, sink);
    }
    return {};
}

}  // namespace opsim::trace
