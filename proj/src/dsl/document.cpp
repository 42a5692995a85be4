#include "opsim/dsl/document.hpp"

#include "opsim/dsl/parser.hpp"

namespace opsim::dsl {

std::string kind_name(Kind kind) {
    switch (kind) {
        case Kind::Pps: return "pps";
        case Kind::Xm: return "xm";
        case Kind::Cxm: return "cxm";
        case Kind::Operas: return "operas";
    }
    return "?";
}

void SourceMap::note_path(const std::string& path, Location at) { paths.emplace(path, at); }

void SourceMap::note_token(const std::string& path, const std::string& token, Location at) {
    tokens.emplace(std::pair{path, token}, at);
}

Location SourceMap::locate(const std::string& path, const std::string& token) const {
    std::string p = path;
    while (true) {
        if (!token.empty()) {
            if (auto it = tokens.find({p, token}); it != tokens.end()) return it->second;
        }
        if (auto it = paths.find(p); it != paths.end()) return it->second;
        const auto slash = p.rfind('/');
        if (slash == std::string::npos) break;
        p.resize(slash);
    }
    return {};
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
    std::string out;
    if (!file.empty()) out += std::string(file) + ":";
    out += std::to_string(d.location.line) + ":" + std::to_string(d.location.column) + ": ";
    out += d.severity == Severity::Error ? "error" : "warning";
    out += "[" + d.code + "]: " + d.message;
    return out;
}

ModelDocument make_document(pps::Model model, std::string name) {
    return {Kind::Pps, std::move(name), std::move(model), {}};
}

ModelDocument make_document(XmModel model) {
    std::string name = model.def.name;
    return {Kind::Xm, std::move(name), std::move(model), {}};
}

ModelDocument make_document(xm::CxmSpec spec, std::string name) {
    return {Kind::Cxm, std::move(name), std::move(spec), {}};
}

ModelDocument make_document(operas::Spec spec, std::string name) {
    return {Kind::Operas, std::move(name), std::move(spec), {}};
}

}  // namespace opsim::dsl
