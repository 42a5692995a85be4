#include "opsim/dsl/parser.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lexer.hpp"

namespace opsim::dsl {

namespace {

using detail::Tok;
using detail::Token;

constexpr int kMaxDepth = 200;

struct SyntaxError {
    Diagnostic diagnostic;
};

class Parser {
   public:
    Parser(std::vector<Token> tokens, SourceMap& map) : toks_(std::move(tokens)), map_(map) {}

    ModelDocument document() {
        if (peek().kind == Tok::End) {
            throw SyntaxError{{Severity::Error, "document is empty", peek().at, "E-EMPTY-DOCUMENT"}};
        }
        ModelDocument doc;
        const Token& kw = peek();
        if (word("pps")) {
            take();
            doc.kind = Kind::Pps;
            doc.name = optional_name();
            doc.body = pps_body();
        } else if (word("xm")) {
            take();
            doc.kind = Kind::Xm;
            XmModel m;
            m.def = machine(true, &m.stream);
            doc.name = m.def.name;
            doc.body = std::move(m);
        } else if (word("cxm")) {
            take();
            doc.kind = Kind::Cxm;
            doc.name = optional_name();
            doc.body = cxm_body();
        } else if (word("operas")) {
            take();
            doc.kind = Kind::Operas;
            doc.name = optional_name();
            doc.body = operas_body();
        } else {
            fail(kw, "expected 'pps', 'xm', 'cxm' or 'operas', found " + describe(kw));
        }
        if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()) + " after the document");
        return doc;
    }

    xm::Expr lone_expression() {
        xm::Expr e = expr();
        if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()) + " after the expression");
        return e;
    }

   private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SourceMap& map_;
    std::string path_;
    int depth_ = 0;

    // -- token plumbing -----------------------------------------------------

    const Token& peek(std::size_t k = 0) const {
        const std::size_t i = pos_ + k;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& take() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
    bool accept(std::string_view p) {
        if (!punct(p)) return false;
        take();
        return true;
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case Tok::End: return "end of input";
            case Tok::Ident: return "'" + t.text + "'";
            case Tok::Int: return "number " + t.text;
            case Tok::Sym: return "symbol '" + t.text;
            case Tok::Lambda: return "'_'";
            case Tok::Punct: return "'" + t.text + "'";
        }
        return "token";
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw SyntaxError{{Severity::Error, message, at.at, "E-SYNTAX"}};
    }

    void expect(std::string_view p) {
        if (!accept(p)) fail(peek(), "expected '" + std::string(p) + "', found " + describe(peek()));
    }
    void expect_word(std::string_view w) {
        if (!word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()));
        take();
    }

    std::string ident(const char* what) {
        if (peek().kind != Tok::Ident) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
        const Token& t = take();
        map_.note_token(path_, t.text, t.at);
        return t.text;
    }
    Symbol symbol(const char* what = "a symbol") { return Symbol(ident(what)); }

    std::int64_t integer(const char* what, bool allow_negative = false) {
        bool negative = false;
        const Token& start = peek();
        if (allow_negative && punct("-") && peek(1).kind == Tok::Int) {
            take();
            negative = true;
        }
        if (peek().kind != Tok::Int) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
        const Token& t = take();
        return to_int(t, negative, start);
    }

    std::int64_t to_int(const Token& t, bool negative, const Token& start) const {
        const std::string text = (negative ? "-" : "") + t.text;
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) fail(start, "integer " + text + " is out of range");
        return v;
    }

    std::size_t index(const char* what) { return static_cast<std::size_t>(integer(what)); }

    std::string optional_name() { return peek().kind == Tok::Ident ? ident("a name") : ""; }

    struct PathScope {
        Parser& p;
        std::string saved;
        PathScope(Parser& parser, std::string path, Location at) : p(parser), saved(parser.path_) {
            p.path_ = std::move(path);
            p.map_.note_path(p.path_, at);
        }
        ~PathScope() { p.path_ = saved; }
    };

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxDepth) p.fail(p.peek(), "nesting is deeper than " + std::to_string(kMaxDepth));
        }
        ~DepthGuard() { --p.depth_; }
    };

    // -- shared pieces ------------------------------------------------------

    Multiset multiset() {
        const Token& open = peek();
        expect("{");
        Multiset out;
        if (accept("}")) return out;
        do {
            const Token& at = peek();
            Symbol s = symbol("an object name");
            Count n = 1;
            if (accept(":")) {
                n = integer("a count");
                if (n < 1) fail(at, "count of '" + s.name() + "' must be positive");
            }
            try {
                out.add(s, n);
            } catch (const OverflowError&) {
                fail(at, "count of '" + s.name() + "' overflows");
            }
        } while (accept(","));
        if (!punct("}")) fail(peek(), "expected ',' or '}' in multiset opened at line " + std::to_string(open.at.line));
        take();
        return out;
    }

    std::vector<Symbol> symbols_until_semicolon() {
        std::vector<Symbol> out;
        while (!punct(";")) out.push_back(symbol());
        take();
        return out;
    }

    xm::Value value() {
        DepthGuard guard(*this);
        const Token& t = peek();
        if (t.kind == Tok::Int || (punct("-") && peek(1).kind == Tok::Int)) {
            return xm::Value::integer(integer("a number", true));
        }
        if (t.kind == Tok::Sym) {
            take();
            map_.note_token(path_, t.text, t.at);
            return xm::Value::symbol(Symbol(t.text));
        }
        if (word("true") || word("false")) {
            take();
            return xm::Value::boolean(t.text == "true");
        }
        if (accept("(")) {
            std::vector<xm::Value> items;
            bool trailing = false;
            while (!punct(")")) {
                items.push_back(value());
                trailing = false;
                if (!accept(",")) break;
                trailing = true;
            }
            expect(")");
            if (items.size() == 1 && !trailing) return items.front();
            return xm::Value::tuple(std::move(items));
        }
        if (punct("[") || punct("{")) {
            const bool seq = punct("[");
            take();
            std::vector<xm::Value> items;
            const char* close = seq ? "]" : "}";
            if (!punct(close)) {
                do items.push_back(value());
                while (accept(","));
            }
            expect(close);
            return seq ? xm::Value::seq(std::move(items)) : xm::Value::set(std::move(items));
        }
        fail(t, "expected a value, found " + describe(t));
    }

    // -- expressions ----------------------------------------------------------

    xm::Expr expr() {
        DepthGuard guard(*this);
        if (word("if")) {
            take();
            xm::Expr c = expr();
            expect_word("then");
            xm::Expr a = expr();
            expect_word("else");
            xm::Expr b = expr();
            return xm::Expr::conditional(std::move(c), std::move(a), std::move(b));
        }
        return binary(1);
    }

    static int binary_level(const Token& t) {
        if (t.kind == Tok::Ident) return t.text == "in" ? 3 : 0;
        if (t.kind != Tok::Punct) return 0;
        const std::string& s = t.text;
        if (s == "||") return 1;
        if (s == "&&") return 2;
        if (s == "==" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=") return 3;
        if (s == "+" || s == "-") return 4;
        if (s == "*" || s == "/" || s == "%") return 5;
        return 0;
    }

    xm::Expr binary(int level) {
        if (level > 5) return unary();
        DepthGuard guard(*this);
        xm::Expr lhs = binary(level + 1);
        while (binary_level(peek()) == level) {
            const std::string op = take().text;
            xm::Expr rhs = binary(level + 1);
            lhs = xm::Expr::binary(op, std::move(lhs), std::move(rhs));
            if (level == 3 && binary_level(peek()) == 3) fail(peek(), "comparisons do not chain; add parentheses");
        }
        return lhs;
    }

    xm::Expr unary() {
        DepthGuard guard(*this);
        if (punct("-") && peek(1).kind == Tok::Int) {
            const Token& start = take();
            const Token& t = take();
            return postfix(xm::Expr::lit(xm::Value::integer(to_int(t, true, start))));
        }
        if (punct("-") || punct("!")) {
            const std::string op = take().text;
            return xm::Expr::unary(op, unary());
        }
        return postfix(primary());
    }

    xm::Expr postfix(xm::Expr base) {
        while (punct(".") && peek(1).kind == Tok::Int) {
            take();
            const Token& t = take();
            base = xm::Expr::tuple_index(std::move(base), to_int(t, false, t));
        }
        return base;
    }

    std::vector<xm::Expr> expr_list(const char* close) {
        std::vector<xm::Expr> out;
        if (!punct(close)) {
            do out.push_back(expr());
            while (accept(","));
        }
        expect(close);
        return out;
    }

    xm::Expr primary() {
        using K = xm::Expr::Kind;
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int: take(); return xm::Expr::lit(xm::Value::integer(to_int(t, false, t)));
            case Tok::Sym:
                take();
                map_.note_token(path_, t.text, t.at);
                return xm::Expr::lit(xm::Value::symbol(Symbol(t.text)));
            case Tok::Ident: break;
            case Tok::Punct:
                if (accept("(")) {
                    std::vector<xm::Expr> items;
                    bool trailing = false;
                    while (!punct(")")) {
                        items.push_back(expr());
                        trailing = false;
                        if (!accept(",")) break;
                        trailing = true;
                    }
                    expect(")");
                    if (items.size() == 1 && !trailing) return std::move(items.front());
                    return xm::Expr::collection(K::Tuple, std::move(items));
                }
                if (accept("[")) return xm::Expr::collection(K::Seq, expr_list("]"));
                if (accept("{")) return xm::Expr::collection(K::Set, expr_list("}"));
                [[fallthrough]];
            default: fail(t, "expected an expression, found " + describe(t));
        }
        const std::string& w = t.text;
        if (w == "true" || w == "false") {
            take();
            return xm::Expr::lit(xm::Value::boolean(w == "true"));
        }
        static const std::pair<const char*, K> leaves[] = {{"input", K::Input}, {"roll", K::Roll},
                                                           {"peers", K::Peers}, {"state", K::State},
                                                           {"width", K::Width}, {"height", K::Height}};
        for (const auto& [name, kind] : leaves) {
            if (w == name) {
                take();
                return xm::Expr::leaf(kind);
            }
        }
        if (w == "m" && peek(1).kind == Tok::Punct && peek(1).text == ".") {
            take();
            take();
            return xm::Expr::field(ident("a memory field"));
        }
        if (peek(1).kind == Tok::Punct && peek(1).text == "(") {
            take();
            take();
            auto arity = xm::builtin_arity(w);
            if (!arity) fail(t, "unknown function '" + w + "'");
            std::vector<xm::Expr> args = expr_list(")");
            if (args.size() != *arity) {
                fail(t, "'" + w + "' takes " + std::to_string(*arity) + " argument(s), got " +
                            std::to_string(args.size()));
            }
            return xm::Expr::call(w, std::move(args));
        }
        fail(t, "unexpected " + describe(t) + " in expression; memory fields are written m." + w);
    }

    // -- pps ----------------------------------------------------------------

    pps::Model pps_body() {
        pps::Model m;
        expect("{");
        while (!accept("}")) {
            const Token& kw = peek();
            const std::string w = kw.kind == Tok::Ident ? kw.text : "";
            if (w == "alphabet" || w == "types") {
                take();
                PathScope scope(*this, w, kw.at);
                for (Symbol s : symbols_until_semicolon()) (w == "alphabet" ? m.alphabet : m.types).insert(s);
            } else if (w == "environment") {
                take();
                PathScope scope(*this, "environment", kw.at);
                m.environment.add(multiset());
                expect(";");
            } else if (w == "cell") {
                take();
                PathScope scope(*this, "cell[" + std::to_string(m.cells.size()) + "]", kw.at);
                pps::InitialCell c;
                c.type = symbol("a cell type");
                c.contents = multiset();
                expect(";");
                m.cells.push_back(std::move(c));
            } else if (w == "edge") {
                take();
                PathScope scope(*this, "edge[" + std::to_string(m.initial_edges.size()) + "]", kw.at);
                const std::size_t a = index("a cell index");
                const std::size_t b = index("a cell index");
                expect(";");
                m.initial_edges.emplace_back(a, b);
            } else if (w == "bond") {
                take();
                PathScope scope(*this, "bond[" + std::to_string(m.bond_rules.size()) + "]", kw.at);
                pps::BondRule b;
                b.left_type = symbol("a cell type");
                b.left_required = multiset();
                expect("-");
                b.right_required = multiset();
                b.right_type = symbol("a cell type");
                expect(";");
                m.bond_rules.push_back(std::move(b));
            } else if (w == "rule") {
                take();
                PathScope scope(*this, "rule[" + std::to_string(m.rules.size()) + "]", kw.at);
                m.rules.push_back(pps_rule());
            } else {
                fail(kw, "expected a pps statement (alphabet, types, environment, cell, edge, bond, rule), found " +
                             describe(kw));
            }
        }
        return m;
    }

    std::optional<Symbol> trigger() {
        if (peek().kind == Tok::Lambda) {
            take();
            return std::nullopt;
        }
        return symbol("a trigger object or '_'");
    }

    pps::Rule pps_rule() {
        const Token& kind_tok = peek();
        const std::string kind = ident("a rule kind");
        const Symbol type = symbol("a cell type");
        expect(":");
        pps::Rule rule;
        if (kind == "transform") {
            pps::Transform r;
            r.type = type;
            r.consumed = symbol();
            expect("->");
            while (!punct(";")) r.produced.add(symbol(), 1);
            rule = r;
        } else if (kind == "in" || kind == "enter") {
            std::optional<Symbol> trig = trigger();
            expect(";");
            Symbol moved = symbol();
            if (kind == "in") {
                rule = pps::CommIn{trig, moved, type};
            } else {
                rule = pps::CommEnter{trig, moved, type};
            }
        } else if (kind == "exit") {
            rule = pps::CommExit{symbol(), type};
        } else if (kind == "differentiate") {
            pps::Differentiate r;
            r.from_type = type;
            r.consumed = symbol();
            expect("->");
            r.produced = symbol();
            expect(":");
            r.to_type = symbol("a cell type");
            rule = r;
        } else if (kind == "divide") {
            pps::Divide r;
            r.type = type;
            r.consumed = symbol();
            expect("->");
            r.left_product = symbol();
            expect("|");
            r.right_product = symbol();
            if (accept(":")) r.right_type = symbol("a cell type");
            rule = r;
        } else if (kind == "die") {
            rule = pps::Die{symbol(), type};
        } else {
            fail(kind_tok, "unknown rule kind '" + kind + "'");
        }
        expect(";");
        return rule;
    }

    // -- xm -------------------------------------------------------------------

    static std::optional<xm::ValueKind> value_kind(const std::string& w) {
        using VK = xm::ValueKind;
        static const std::pair<const char*, VK> kinds[] = {{"int", VK::Int},     {"bool", VK::Bool},
                                                          {"sym", VK::Sym},     {"tuple", VK::Tuple},
                                                          {"seq", VK::Seq},     {"set", VK::Set}};
        for (const auto& [name, k] : kinds) {
            if (w == name) return k;
        }
        return std::nullopt;
    }

    xm::Port port() {
        if (word("stream")) {
            take();
            return xm::Port::stream();
        }
        if (word("peer")) {
            take();
            return xm::Port::peer();
        }
        if (word("channel")) {
            take();
            return xm::Port::on_channel(ident("a channel name"));
        }
        fail(peek(), "expected 'stream', 'channel' or 'peer', found " + describe(peek()));
    }

    xm::MachineDef machine(bool standalone, std::vector<Symbol>* stream) {
        const Token& name_tok = peek();
        xm::MachineDef def;
        def.name = ident("a machine name");
        const std::string base = "machine " + def.name;
        PathScope scope(*this, base, name_tok.at);
        expect("{");
        while (!accept("}")) {
            const Token& kw = peek();
            const std::string w = kw.kind == Tok::Ident ? kw.text : "";
            if (w == "inputs" || w == "outputs") {
                take();
                for (Symbol s : symbols_until_semicolon()) (w == "inputs" ? def.inputs : def.outputs).insert(s);
            } else if (w == "states") {
                take();
                while (!punct(";")) def.states.push_back(ident("a state name"));
                take();
            } else if (w == "initial") {
                take();
                PathScope inner(*this, base + "/initial", kw.at);
                def.initial_state = ident("a state name");
                expect(";");
            } else if (w == "memory") {
                take();
                expect("{");
                while (!accept("}")) {
                    const Token& field_tok = peek();
                    xm::FieldDecl f;
                    f.name = ident("a field name");
                    PathScope inner(*this, base + "/field " + f.name, field_tok.at);
                    map_.note_token(path_, f.name, field_tok.at);
                    expect(":");
                    const Token& kind_tok = peek();
                    auto k = value_kind(ident("a field kind"));
                    if (!k) fail(kind_tok, "unknown kind '" + kind_tok.text + "'; use int, bool, sym, tuple, seq or set");
                    f.kind = *k;
                    expect("=");
                    f.initial = value();
                    expect(";");
                    def.memory.push_back(std::move(f));
                }
            } else if (w == "function") {
                take();
                def.functions.push_back(function(base));
            } else if (w == "transition") {
                take();
                PathScope inner(*this, base + "/transition[" + std::to_string(def.transitions.size()) + "]", kw.at);
                xm::Transition t;
                t.from = ident("a state name");
                expect("->");
                t.to = ident("a state name");
                expect_word("via");
                t.function = ident("a function name");
                expect(";");
                def.transitions.push_back(std::move(t));
            } else if (w == "stream" && standalone) {
                take();
                PathScope inner(*this, base + "/stream", kw.at);
                for (Symbol s : symbols_until_semicolon()) stream->push_back(s);
            } else {
                fail(kw, "expected a machine statement (inputs, outputs, states, initial, memory, function, "
                         "transition" + std::string(standalone ? ", stream" : "") + "), found " + describe(kw));
            }
        }
        return def;
    }

    xm::Function function(const std::string& base) {
        const Token& name_tok = peek();
        xm::Function fn;
        fn.name = ident("a function name");
        PathScope scope(*this, base + "/function " + fn.name, name_tok.at);
        map_.note_token(path_, fn.name, name_tok.at);
        expect(":");
        fn.input = port();
        expect("->");
        fn.output = port();
        expect("{");
        while (!accept("}")) {
            const Token& kw = peek();
            const std::string w = kw.kind == Tok::Ident ? kw.text : "";
            if (w == "guard") {
                take();
                if (fn.guard) fail(kw, "function '" + fn.name + "' has two guards");
                fn.guard = expr();
            } else if (w == "output") {
                take();
                if (fn.output_value) fail(kw, "function '" + fn.name + "' has two outputs");
                fn.output_value = expr();
            } else if (w == "set") {
                take();
                std::string field = ident("a field name");
                expect("=");
                fn.updates.emplace_back(std::move(field), expr());
            } else if (w == "put" || w == "take") {
                take();
                xm::EnvEffect e;
                e.op = w == "put" ? xm::EnvEffect::Op::Put : xm::EnvEffect::Op::Take;
                e.object = symbol("an object name");
                e.amount = expr();
                fn.effects.push_back(std::move(e));
            } else {
                fail(kw, "expected guard, output, set, put or take, found " + describe(kw));
            }
            expect(";");
        }
        return fn;
    }

    std::vector<std::pair<std::string, xm::Value>> overrides(std::vector<Symbol>* stream) {
        std::vector<std::pair<std::string, xm::Value>> out;
        if (accept(";")) return out;
        expect("{");
        while (!accept("}")) {
            const Token& kw = peek();
            if (word("set")) {
                take();
                std::string field = ident("a field name");
                expect("=");
                out.emplace_back(std::move(field), value());
                expect(";");
            } else if (stream && word("stream")) {
                take();
                for (Symbol s : symbols_until_semicolon()) stream->push_back(s);
            } else {
                fail(kw, std::string("expected 'set'") + (stream ? " or 'stream'" : "") + ", found " + describe(kw));
            }
        }
        return out;
    }

    // -- cxm ------------------------------------------------------------------

    xm::CxmSpec cxm_body() {
        xm::CxmSpec spec;
        expect("{");
        while (!accept("}")) {
            const Token& kw = peek();
            const std::string w = kw.kind == Tok::Ident ? kw.text : "";
            if (w == "xm") {
                take();
                spec.defs.push_back(machine(false, nullptr));
            } else if (w == "machine") {
                take();
                const Token& id_tok = peek();
                xm::MachineDecl d;
                d.id = ident("an instance name");
                PathScope scope(*this, "instance " + d.id, id_tok.at);
                map_.note_token(path_, d.id, id_tok.at);
                expect(":");
                d.def = ident("a machine name");
                d.overrides = overrides(&d.stream);
                spec.machines.push_back(std::move(d));
            } else if (w == "channel") {
                take();
                const Token& id_tok = peek();
                xm::ChannelDecl c;
                c.id = ident("a channel name");
                PathScope scope(*this, "channel " + c.id, id_tok.at);
                map_.note_token(path_, c.id, id_tok.at);
                expect(":");
                c.from = ident("an instance name");
                expect("->");
                c.to = ident("an instance name");
                expect(";");
                spec.channels.push_back(std::move(c));
            } else {
                fail(kw, "expected a cxm statement (xm, machine, channel), found " + describe(kw));
            }
        }
        return spec;
    }

    // -- operas -----------------------------------------------------------------

    operas::Selector selector(operas::Action& a) {
        if (word("self")) {
            take();
            return operas::Selector::Self;
        }
        if (word("peer")) {
            take();
            return operas::Selector::Peer;
        }
        if (word("nearest_peer")) {
            take();
            return operas::Selector::NearestPeer;
        }
        if (word("nearest")) {
            take();
            a.radius = integer("a radius", true);
            return operas::Selector::Nearest;
        }
        fail(peek(), "expected self, peer, nearest_peer or nearest, found " + describe(peek()));
    }

    operas::ReconfigRule reconfig_rule() {
        operas::ReconfigRule r;
        r.name = ident("a rule name");
        if (word("for")) {
            take();
            r.for_type = ident("an agent type");
        }
        expect_word("when");
        r.condition = expr();
        expect("=>");
        const Token& kw = peek();
        const std::string w = ident("an action");
        using AK = operas::Action::Kind;
        if (w == "add_agent") {
            r.action.kind = AK::AddAgent;
            r.action.agent_type = ident("an agent type");
            if (accept("{")) {
                while (!accept("}")) {
                    std::string field = ident("a field name");
                    expect("=");
                    r.action.initializer.emplace_back(std::move(field), expr());
                    expect(";");
                }
            }
        } else if (w == "remove_agent" || w == "add_channel" || w == "remove_channel") {
            r.action.kind = w == "remove_agent" ? AK::RemoveAgent : w == "add_channel" ? AK::AddChannel : AK::RemoveChannel;
            r.action.selector = selector(r.action);
        } else {
            fail(kw, "expected add_agent, remove_agent, add_channel or remove_channel, found " + describe(kw));
        }
        expect(";");
        return r;
    }

    operas::Spec operas_body() {
        operas::Spec spec;
        expect("{");
        while (!accept("}")) {
            const Token& kw = peek();
            const std::string w = kw.kind == Tok::Ident ? kw.text : "";
            if (w == "grid") {
                take();
                PathScope scope(*this, "grid", kw.at);
                spec.width = integer("a width", true);
                spec.height = integer("a height", true);
                expect(";");
            } else if (w == "place") {
                take();
                PathScope scope(*this, "place[" + std::to_string(spec.placements.size()) + "]", kw.at);
                operas::Placement p;
                p.x = integer("an x coordinate", true);
                p.y = integer("a y coordinate", true);
                p.objects = multiset();
                expect(";");
                spec.placements.push_back(std::move(p));
            } else if (w == "globals") {
                take();
                PathScope scope(*this, "globals", kw.at);
                spec.globals.add(multiset());
                expect(";");
            } else if (w == "xm") {
                take();
                spec.behaviours.push_back(machine(false, nullptr));
            } else if (w == "type") {
                take();
                const Token& name_tok = peek();
                operas::AgentType t;
                t.name = ident("a type name");
                PathScope scope(*this, "type " + t.name, name_tok.at);
                map_.note_token(path_, t.name, name_tok.at);
                expect(":");
                t.behaviour = ident("a machine name");
                expect("{");
                while (!accept("}")) {
                    const Token& inner = peek();
                    if (word("percepts")) {
                        take();
                        for (Symbol s : symbols_until_semicolon()) t.percept_filter.insert(s);
                    } else if (word("rule")) {
                        take();
                        PathScope rs(*this, "type " + t.name + "/rule[" + std::to_string(t.str_mut.size()) + "]",
                                     inner.at);
                        t.str_mut.push_back(reconfig_rule());
                    } else {
                        fail(inner, "expected 'percepts' or 'rule', found " + describe(inner));
                    }
                }
                spec.types.push_back(std::move(t));
            } else if (w == "global") {
                take();
                PathScope scope(*this, "global[" + std::to_string(spec.global_rules.size()) + "]", kw.at);
                expect_word("rule");
                spec.global_rules.push_back(reconfig_rule());
            } else if (w == "agent") {
                take();
                PathScope scope(*this, "agent[" + std::to_string(spec.agents.size()) + "]", kw.at);
                operas::AgentDecl a;
                a.type = ident("an agent type");
                a.overrides = overrides(nullptr);
                spec.agents.push_back(std::move(a));
            } else if (w == "link") {
                take();
                PathScope scope(*this, "link[" + std::to_string(spec.links.size()) + "]", kw.at);
                const std::size_t a = index("an agent index");
                const std::size_t b = index("an agent index");
                expect(";");
                spec.links.emplace_back(a, b);
            } else {
                fail(kw, "expected an operas statement (grid, place, globals, xm, type, global, agent, link), found " +
                             describe(kw));
            }
        }
        return spec;
    }
};

std::vector<Issue> stream_issues(const XmModel& m) {
    std::vector<Issue> out;
    for (Symbol s : m.stream) {
        if (!m.def.inputs.contains(s)) {
            out.push_back({"E-UNDECLARED-SYMBOL", "stream symbol '" + s.name() + "' is not an input of " + m.def.name,
                           "machine " + m.def.name + "/stream", s.name()});
        }
    }
    return out;
}

}  // namespace

std::vector<Diagnostic> check(const ModelDocument& doc) {
    std::vector<Issue> issues;
    switch (doc.kind) {
        case Kind::Pps: issues = pps::validation_issues(std::get<pps::Model>(doc.body)); break;
        case Kind::Xm: {
            const auto& m = std::get<XmModel>(doc.body);
            issues = xm::validation_issues(m.def, xm::MachineContext::Standalone);
            auto more = stream_issues(m);
            issues.insert(issues.end(), more.begin(), more.end());
            break;
        }
        case Kind::Cxm: issues = xm::validation_issues(std::get<xm::CxmSpec>(doc.body)); break;
        case Kind::Operas: issues = operas::validation_issues(std::get<operas::Spec>(doc.body)); break;
    }
    std::vector<Diagnostic> out;
    for (const auto& i : issues) {
        out.push_back({Severity::Error, i.message, doc.source_map.locate(i.path, i.token), i.code});
    }
    return out;
}

ParseResult parse(std::string_view source) {
    ParseResult result;
    try {
        auto lexed = detail::lex(source);
        if (!lexed.diagnostics.empty()) {
            result.diagnostics = std::move(lexed.diagnostics);
            return result;
        }
        SourceMap map;
        Parser parser(std::move(lexed.tokens), map);
        ModelDocument doc = parser.document();
        doc.source_map = std::move(map);
        result.diagnostics = check(doc);
        if (result.diagnostics.empty()) result.document = std::move(doc);
    } catch (const SyntaxError& e) {
        result.diagnostics.push_back(e.diagnostic);
    } catch (const std::exception& e) {
        result.diagnostics.push_back({Severity::Error, std::string("internal parser error: ") + e.what(), {}, "E-INTERNAL"});
    }
    return result;
}

xm::Expr parse_expression(std::string_view source) {
    auto lexed = detail::lex(source);
    auto report = [&](const Diagnostic& d) {
        return ValidationError(format_diagnostic(d) + " in expression '" + std::string(source) + "'");
    };
    if (!lexed.diagnostics.empty()) throw report(lexed.diagnostics.front());
    SourceMap map;
    Parser parser(std::move(lexed.tokens), map);
    try {
        return parser.lone_expression();
    } catch (const SyntaxError& e) {
        throw report(e.diagnostic);
    }
}

ParseResult parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({Severity::Error, "cannot read '" + path + "'", {}, "E-IO"});
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

}  // namespace opsim::dsl
