#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "opsim/operas/system.hpp"
#include "opsim/pps/model.hpp"
#include "opsim/xm/cxm.hpp"
#include "opsim/xm/machine.hpp"

namespace opsim::dsl {

enum class Kind { Pps, Xm, Cxm, Operas };

std::string kind_name(Kind kind);

/// A standalone stream X-machine together with the input stream it reads.
struct XmModel {
    xm::MachineDef def;
    std::vector<Symbol> stream;
    friend bool operator==(const XmModel&, const XmModel&) = default;
};

using Body = std::variant<pps::Model, XmModel, xm::CxmSpec, operas::Spec>;

struct Location {
    int line = 1;
    int column = 1;
    friend bool operator==(const Location&, const Location&) = default;
};

/// Where things came from in the source: issue paths, and identifiers seen
/// under a path (first occurrence wins).
struct SourceMap {
    std::map<std::string, Location> paths;
    std::map<std::pair<std::string, std::string>, Location> tokens;

    void note_path(const std::string& path, Location at);
    void note_token(const std::string& path, const std::string& token, Location at);
    /// Token under path, then path, then each enclosing path; (1, 1) if nothing matches.
    Location locate(const std::string& path, const std::string& token) const;
};

struct ModelDocument {
    Kind kind = Kind::Pps;
    std::string name;  // optional for pps, cxm and operas documents
    Body body;
    SourceMap source_map;

    /// Structural equality; the source map is not compared.
    friend bool operator==(const ModelDocument& a, const ModelDocument& b) {
        return a.kind == b.kind && a.name == b.name && a.body == b.body;
    }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    Location location;
    std::string code;
};

/// `file:line:column: error[CODE]: message`
std::string format_diagnostic(const Diagnostic& d, std::string_view file = "");

}  // namespace opsim::dsl
