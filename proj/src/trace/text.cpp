#include <ostream>

#include "opsim/trace/trace.hpp"

namespace opsim::trace {

namespace {

std::string objects(const Json& m) {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, n] : m.items()) {
        if (!first) out += ", ";
        first = false;
        out += name;
        if (n.get<std::int64_t>() > 1) out += ":" + std::to_string(n.get<std::int64_t>());
    }
    return out + "}";
}

std::string memory(const Json& m) {
    std::string out = "[";
    bool first = true;
    for (const auto& [name, v] : m.items()) {
        if (!first) out += ", ";
        first = false;
        out += name + "=" + v.get<std::string>();
    }
    return out + "]";
}

// Undirected edges as `a—b`.
std::string edges(const Json& list) {
    if (list.empty()) return "-";
    std::string out;
    for (const auto& e : list) {
        if (!out.empty()) out += " ";
        out += std::to_string(e[0].get<std::uint64_t>()) + "—" + std::to_string(e[1].get<std::uint64_t>());
    }
    return out;
}

void pps_block(const Json& s, std::ostream& out) {
    out << "  cells:";
    for (const auto& c : s["cells"]) {
        out << ' ' << c["id"].get<std::uint64_t>() << ':' << c["type"].get<std::string>() << objects(c["contents"]);
    }
    out << "\n  bonds: " << edges(s["bonds"]) << "\n  env: " << objects(s["environment"]) << '\n';
    if (!s["fired"].empty()) {
        out << "  fired:";
        for (const auto& f : s["fired"]) {
            out << " r" << f["rule"].get<std::size_t>() << '(' << f["kind"].get<std::string>() << ")@"
                << f["cell"].get<std::uint64_t>();
            if (f.contains("source")) out << "<-" << f["source"].get<std::uint64_t>();
            if (f["times"].get<std::size_t>() > 1) out << 'x' << f["times"].get<std::size_t>();
        }
        out << '\n';
    }
}

void xm_block(const Json& s, std::ostream& out) {
    out << "  " << s["state"].get<std::string>() << ' ' << memory(s["memory"]);
    if (!s["fired"].is_null()) {
        out << "  <- " << s["fired"].get<std::string>() << " on '" << s["input"].get<std::string>() << " => "
            << s["output"].get<std::string>();
    }
    out << '\n';
}

void activity_lines(const Json& list, const char* who, std::ostream& out) {
    for (const auto& a : list) {
        out << "  " << (a[who].is_string() ? a[who].get<std::string>() : std::to_string(a[who].get<std::uint64_t>()))
            << ": ";
        if (a.contains("fired")) {
            out << a["fired"].get<std::string>();
        } else {
            out << "idle (" << a["idle"].get<std::string>() << ')';
        }
        for (const char* k : {"output", "wrote", "read"}) {
            if (a.contains(k)) out << ' ' << k << ' ' << a[k].get<std::string>();
        }
        if (a.contains("sent_to")) out << " sent to " << a["sent_to"].get<std::uint64_t>();
        if (a.contains("received_from")) out << " received from " << a["received_from"].get<std::uint64_t>();
        out << '\n';
    }
}

void cxm_block(const Json& s, std::ostream& out) {
    for (const auto& m : s["machines"]) {
        out << "  " << m["id"].get<std::string>() << ':' << m["def"].get<std::string>() << ' '
            << m["state"].get<std::string>() << ' ' << memory(m["memory"]) << '\n';
    }
    for (const auto& c : s["channels"]) {
        out << "  channel " << c["id"].get<std::string>() << ' ' << c["from"].get<std::string>() << "->"
            << c["to"].get<std::string>() << ": " << (c["buffer"].is_null() ? "empty" : c["buffer"].get<std::string>())
            << '\n';
    }
    activity_lines(s["activity"], "machine", out);
}

void operas_block(const Json& s, std::ostream& out) {
    out << "  agents:";
    for (const auto& a : s["agents"]) {
        out << ' ' << a["id"].get<std::uint64_t>() << ':' << a["type"].get<std::string>() << '/'
            << a["state"].get<std::string>() << memory(a["memory"]);
    }
    out << "\n  channels: " << edges(s["channels"]) << "\n  env: " << objects(s["environment"]["totals"]) << '\n';
    for (const auto& p : s["pending"]) {
        out << "  message " << p["from"].get<std::uint64_t>() << "->" << p["to"].get<std::uint64_t>() << ": "
            << p["value"].get<std::string>() << '\n';
    }
    Json fired = Json::array();
    for (const auto& a : s["activity"]) {
        if (a.contains("fired") || a["idle"].get<std::string>() == "contention") fired.push_back(a);
    }
    activity_lines(fired, "agent", out);
    for (const auto& m : s["mutations"]) {
        out << "  " << m["agent"].get<std::uint64_t>() << ": " << m["rule"].get<std::string>() << " ("
            << m["action"].get<std::string>();
        if (m.contains("target")) out << ' ' << m["target"].get<std::uint64_t>();
        out << ")\n";
    }
    for (const auto& w : s["warnings"]) out << "  warning: " << w.get<std::string>() << '\n';
}

}  // namespace

void TextSink::record(const Json& r) {
    const std::string kind = r["record"].get<std::string>();
    if (kind == "header") {
        kind_ = r["kind"].get<std::string>();
        out_ << "# " << kind_ << ' ' << r.value("name", "model") << ' ' << r["model_digest"].get<std::string>() << " seed "
             << r["seed"].get<std::uint64_t>() << " steps " << r["steps"].get<std::uint64_t>();
        if (r.contains("mode")) out_ << " mode " << r["mode"].get<std::string>();
        if (r.contains("bonds")) out_ << " bonds " << r["bonds"].get<std::string>();
        out_ << '\n';
    } else if (kind == "snapshot") {
        out_ << "step " << r["step"].get<std::uint64_t>() << '\n';
        if (kind_ == "pps") pps_block(r, out_);
        if (kind_ == "xm") xm_block(r, out_);
        if (kind_ == "cxm") cxm_block(r, out_);
        if (kind_ == "operas") operas_block(r, out_);
    } else if (kind == "terminal") {
        const std::string status = r["status"].get<std::string>();
        if (status == "completed") {
            out_ << "completed after " << r["steps"].get<std::uint64_t>() << " steps\n";
        } else if (status == "halted") {
            out_ << "halted at step " << r["step"].get<std::uint64_t>() << '\n';
        } else {
            out_ << "error at step " << r["step"].get<std::uint64_t>() << ": " << r["message"].get<std::string>()
                 << '\n';
        }
    }
    out_.flush();
}

}  // namespace opsim::trace
