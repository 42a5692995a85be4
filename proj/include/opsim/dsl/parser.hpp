#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opsim/dsl/document.hpp"

namespace opsim::dsl {

struct ParseResult {
    std::optional<ModelDocument> document;  // set only when there are no errors
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return document.has_value(); }
};

/// Total: returns diagnostics for any input, never throws.
ParseResult parse(std::string_view source);

/// A lone expression, e.g. for programmatic builders. Throws ValidationError.
xm::Expr parse_expression(std::string_view source);

/// Reads and parses a file; unreadable files give E-IO.
ParseResult parse_file(const std::string& path);

/// Static checks of an already-built document, as diagnostics located
/// through its source map.
std::vector<Diagnostic> check(const ModelDocument& doc);

/// Canonical text. parse(print(doc)) is structurally equal to doc.
std::string print(const ModelDocument& doc);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string digest(const ModelDocument& doc);

ModelDocument make_document(pps::Model model, std::string name = "");
ModelDocument make_document(XmModel model);
ModelDocument make_document(xm::CxmSpec spec, std::string name = "");
ModelDocument make_document(operas::Spec spec, std::string name = "");

}  // namespace opsim::dsl
