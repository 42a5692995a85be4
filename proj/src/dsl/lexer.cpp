#include "lexer.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace opsim::dsl::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

constexpr std::array<std::string_view, 8> kTwoChar{"->", "=>", "==", "!=", "<=", ">=", "&&", "||"};
constexpr std::string_view kOneChar = "{}()[];:,.<>+-*/%!=|";

}  // namespace

LexResult lex(std::string_view src) {
    LexResult out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
                ++col;
            }
        }
    };
    auto error = [&](Location at, std::string message) {
        out.diagnostics.push_back({Severity::Error, std::move(message), at, "E-LEXICAL"});
    };

    while (i < src.size()) {
        const char c = src[i];
        const Location at{line, col};
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        const std::string_view rest = src.substr(i);
        if (rest.starts_with("//")) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (rest.starts_with("/*")) {
            const std::size_t end = src.find("*/", i + 2);
            if (end == std::string_view::npos) {
                error(at, "unterminated block comment");
                break;
            }
            advance(end + 2 - i);
            continue;
        }
        if (rest.starts_with("\xCE\xBB")) {  // lambda, U+03BB
            out.tokens.push_back({Tok::Lambda, "_", at});
            advance(2);
            continue;
        }
        if (ident_start(c)) {
            std::size_t n = 1;
            while (n < rest.size() && ident_char(rest[n])) ++n;
            std::string text(rest.substr(0, n));
            out.tokens.push_back({text == "_" ? Tok::Lambda : Tok::Ident, text, at});
            advance(n);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t n = 1;
            while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) ++n;
            if (n < rest.size() && ident_start(rest[n])) {
                error(at, "malformed number '" + std::string(rest.substr(0, n + 1)) + "'");
                advance(n + 1);
                continue;
            }
            out.tokens.push_back({Tok::Int, std::string(rest.substr(0, n)), at});
            advance(n);
            continue;
        }
        if (c == '\'') {
            std::size_t n = 1;
            if (n < rest.size() && ident_start(rest[n])) {
                ++n;
                while (n < rest.size() && ident_char(rest[n])) ++n;
                out.tokens.push_back({Tok::Sym, std::string(rest.substr(1, n - 1)), at});
                advance(n);
            } else {
                error(at, "expected a symbol name after '");
                advance(1);
            }
            continue;
        }
        bool matched = false;
        for (std::string_view op : kTwoChar) {
            if (rest.starts_with(op)) {
                out.tokens.push_back({Tok::Punct, std::string(op), at});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (kOneChar.find(c) != std::string_view::npos) {
            out.tokens.push_back({Tok::Punct, std::string(1, c), at});
            advance(1);
            continue;
        }
        const unsigned char u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7F) {
            error(at, std::string("unexpected character '") + c + "'");
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "0x%02X", u);
            error(at, std::string("unexpected byte ") + buf);
        }
        advance(1);
        while (i < src.size() && (static_cast<unsigned char>(src[i]) & 0xC0) == 0x80) advance(1);
    }
    out.tokens.push_back({Tok::End, "", {line, col}});
    return out;
}

}  // namespace opsim::dsl::detail
