#include <cstdio>

#include "opsim/dsl/parser.hpp"

namespace opsim::dsl {

namespace {

class Printer {
   public:
    std::string str() && { return std::move(out_); }

    void line(const std::string& text) {
        out_.append(static_cast<std::size_t>(indent_) * 4, ' ');
        out_ += text;
        out_ += '\n';
    }
    void open(const std::string& head) {
        line(head + " {");
        ++indent_;
    }
    void close(const std::string& suffix = "") {
        --indent_;
        line("}" + suffix);
    }

   private:
    std::string out_;
    int indent_ = 0;
};

std::string with_name(const std::string& keyword, const std::string& name) {
    return name.empty() ? keyword : keyword + " " + name;
}

std::string multiset_text(const Multiset& m) {
    std::string out = "{";
    bool first = true;
    for (const auto& [s, n] : m) {
        if (!first) out += ", ";
        first = false;
        out += s.name();
        if (n > 1) out += ":" + std::to_string(n);
    }
    return out + "}";
}

template <typename Range>
std::string words(const Range& items) {
    std::string out;
    for (const auto& s : items) {
        out += ' ';
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Symbol>) {
            out += s.name();
        } else {
            out += s;
        }
    }
    return out;
}

// -- pps ----------------------------------------------------------------------

std::string rule_text(const pps::Rule& rule) {
    auto trig = [](const std::optional<Symbol>& t) { return t ? t->name() : std::string("_"); };
    return std::visit(
        [&](const auto& r) -> std::string {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, pps::CommIn>) {
                return "rule in " + r.type.name() + ": " + trig(r.trigger) + " ; " + r.moved.name() + ";";
            } else if constexpr (std::is_same_v<R, pps::CommEnter>) {
                return "rule enter " + r.type.name() + ": " + trig(r.trigger) + " ; " + r.moved.name() + ";";
            } else if constexpr (std::is_same_v<R, pps::CommExit>) {
                return "rule exit " + r.type.name() + ": " + r.moved.name() + ";";
            } else if constexpr (std::is_same_v<R, pps::Transform>) {
                std::string products;
                for (const auto& [s, n] : r.produced) {
                    for (Count k = 0; k < n; ++k) products += " " + s.name();
                }
                return "rule transform " + r.type.name() + ": " + r.consumed.name() + " ->" + products + ";";
            } else if constexpr (std::is_same_v<R, pps::Differentiate>) {
                return "rule differentiate " + r.from_type.name() + ": " + r.consumed.name() + " -> " +
                       r.produced.name() + " : " + r.to_type.name() + ";";
            } else if constexpr (std::is_same_v<R, pps::Divide>) {
                std::string s = "rule divide " + r.type.name() + ": " + r.consumed.name() + " -> " +
                                r.left_product.name() + " | " + r.right_product.name();
                if (r.right_type) s += " : " + r.right_type->name();
                return s + ";";
            } else {
                return "rule die " + r.type.name() + ": " + r.consumed.name() + ";";
            }
        },
        rule);
}

void print_pps(Printer& p, const pps::Model& m, const std::string& name) {
    p.open(with_name("pps", name));
    if (!m.alphabet.empty()) p.line("alphabet" + words(m.alphabet) + ";");
    if (!m.types.empty()) p.line("types" + words(m.types) + ";");
    if (!m.environment.empty()) p.line("environment " + multiset_text(m.environment) + ";");
    for (const auto& c : m.cells) p.line("cell " + c.type.name() + " " + multiset_text(c.contents) + ";");
    for (const auto& [a, b] : m.initial_edges) p.line("edge " + std::to_string(a) + " " + std::to_string(b) + ";");
    for (const auto& b : m.bond_rules) {
        p.line("bond " + b.left_type.name() + " " + multiset_text(b.left_required) + " - " +
               multiset_text(b.right_required) + " " + b.right_type.name() + ";");
    }
    for (const auto& r : m.rules) p.line(rule_text(r));
    p.close();
}

// -- xm -------------------------------------------------------------------------

std::string port_text(const xm::Port& port) {
    switch (port.kind) {
        case xm::Port::Kind::Stream: return "stream";
        case xm::Port::Kind::Channel: return "channel " + port.channel;
        case xm::Port::Kind::Peer: return "peer";
    }
    return "?";
}

void print_machine(Printer& p, const xm::MachineDef& def, const std::vector<Symbol>* stream) {
    p.open("xm " + def.name);
    if (!def.inputs.empty()) p.line("inputs" + words(def.inputs) + ";");
    if (!def.outputs.empty()) p.line("outputs" + words(def.outputs) + ";");
    if (!def.states.empty()) p.line("states" + words(def.states) + ";");
    if (!def.initial_state.empty()) p.line("initial " + def.initial_state + ";");
    if (!def.memory.empty()) {
        p.open("memory");
        for (const auto& f : def.memory) {
            p.line(f.name + ": " + xm::kind_name(f.kind) + " = " + f.initial.to_string() + ";");
        }
        p.close();
    }
    for (const auto& fn : def.functions) {
        const std::string head =
            "function " + fn.name + " : " + port_text(fn.input) + " -> " + port_text(fn.output);
        if (!fn.guard && !fn.output_value && fn.updates.empty() && fn.effects.empty()) {
            p.line(head + " {}");
            continue;
        }
        p.open(head);
        if (fn.guard) p.line("guard " + xm::to_source(*fn.guard) + ";");
        if (fn.output_value) p.line("output " + xm::to_source(*fn.output_value) + ";");
        for (const auto& [field, e] : fn.updates) p.line("set " + field + " = " + xm::to_source(e) + ";");
        for (const auto& e : fn.effects) {
            p.line(std::string(e.op == xm::EnvEffect::Op::Put ? "put " : "take ") + e.object.name() + " " +
                   xm::to_source(e.amount) + ";");
        }
        p.close();
    }
    for (const auto& t : def.transitions) p.line("transition " + t.from + " -> " + t.to + " via " + t.function + ";");
    if (stream && !stream->empty()) p.line("stream" + words(*stream) + ";");
    p.close();
}

void print_overrides(Printer& p, const std::string& head, const std::vector<Symbol>& stream,
                     const std::vector<std::pair<std::string, xm::Value>>& overrides) {
    if (stream.empty() && overrides.empty()) {
        p.line(head + ";");
        return;
    }
    p.open(head);
    if (!stream.empty()) p.line("stream" + words(stream) + ";");
    for (const auto& [field, v] : overrides) p.line("set " + field + " = " + v.to_string() + ";");
    p.close();
}

void print_cxm(Printer& p, const xm::CxmSpec& spec, const std::string& name) {
    p.open(with_name("cxm", name));
    for (const auto& def : spec.defs) print_machine(p, def, nullptr);
    for (const auto& m : spec.machines) print_overrides(p, "machine " + m.id + " : " + m.def, m.stream, m.overrides);
    for (const auto& c : spec.channels) p.line("channel " + c.id + " : " + c.from + " -> " + c.to + ";");
    p.close();
}

// -- operas ---------------------------------------------------------------------

std::string selector_text(const operas::Action& a) {
    switch (a.selector) {
        case operas::Selector::Self: return "self";
        case operas::Selector::Peer: return "peer";
        case operas::Selector::NearestPeer: return "nearest_peer";
        case operas::Selector::Nearest: return "nearest " + std::to_string(a.radius);
    }
    return "?";
}

void print_rule(Printer& p, const std::string& prefix, const operas::ReconfigRule& r) {
    std::string head = prefix + r.name;
    if (r.for_type) head += " for " + *r.for_type;
    head += " when " + xm::to_source(r.condition) + " => ";
    const operas::Action& a = r.action;
    switch (a.kind) {
        case operas::Action::Kind::AddAgent:
            if (a.initializer.empty()) {
                p.line(head + "add_agent " + a.agent_type + ";");
            } else {
                p.open(head + "add_agent " + a.agent_type);
                for (const auto& [field, e] : a.initializer) p.line(field + " = " + xm::to_source(e) + ";");
                p.close(";");
            }
            break;
        case operas::Action::Kind::RemoveAgent: p.line(head + "remove_agent " + selector_text(a) + ";"); break;
        case operas::Action::Kind::AddChannel: p.line(head + "add_channel " + selector_text(a) + ";"); break;
        case operas::Action::Kind::RemoveChannel: p.line(head + "remove_channel " + selector_text(a) + ";"); break;
    }
}

void print_operas(Printer& p, const operas::Spec& spec, const std::string& name) {
    p.open(with_name("operas", name));
    p.line("grid " + std::to_string(spec.width) + " " + std::to_string(spec.height) + ";");
    for (const auto& pl : spec.placements) {
        p.line("place " + std::to_string(pl.x) + " " + std::to_string(pl.y) + " " + multiset_text(pl.objects) + ";");
    }
    if (!spec.globals.empty()) p.line("globals " + multiset_text(spec.globals) + ";");
    for (const auto& def : spec.behaviours) print_machine(p, def, nullptr);
    for (const auto& t : spec.types) {
        p.open("type " + t.name + " : " + t.behaviour);
        if (!t.percept_filter.empty()) p.line("percepts" + words(t.percept_filter) + ";");
        for (const auto& r : t.str_mut) print_rule(p, "rule ", r);
        p.close();
    }
    for (const auto& r : spec.global_rules) print_rule(p, "global rule ", r);
    for (const auto& a : spec.agents) print_overrides(p, "agent " + a.type, {}, a.overrides);
    for (const auto& [a, b] : spec.links) p.line("link " + std::to_string(a) + " " + std::to_string(b) + ";");
    p.close();
}

}  // namespace

std::string print(const ModelDocument& doc) {
    Printer p;
    switch (doc.kind) {
        case Kind::Pps: print_pps(p, std::get<pps::Model>(doc.body), doc.name); break;
        case Kind::Xm: {
            const auto& m = std::get<XmModel>(doc.body);
            print_machine(p, m.def, &m.stream);
            break;
        }
        case Kind::Cxm: print_cxm(p, std::get<xm::CxmSpec>(doc.body), doc.name); break;
        case Kind::Operas: print_operas(p, std::get<operas::Spec>(doc.body), doc.name); break;
    }
    return std::move(p).str();
}

std::string digest(const ModelDocument& doc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : print(doc)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace opsim::dsl
