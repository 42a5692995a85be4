#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "opsim/dsl/document.hpp"

namespace opsim::dsl::detail {

enum class Tok { Ident, Int, Sym, Lambda, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier, digits, symbol name (without quote), or punctuation
    Location at;
};

struct LexResult {
    std::vector<Token> tokens;  // always ends with End
    std::vector<Diagnostic> diagnostics;
};

LexResult lex(std::string_view source);

}  // namespace opsim::dsl::detail
