#include <doctest.h>

#include <filesystem>
#include <string>

#include "opsim/dsl/parser.hpp"
#include "opsim/models/models.hpp"

using namespace opsim;
using namespace opsim::dsl;

namespace {

const char* const kCorpus[] = {"tumour", "ants", "food_exchange", "echo", "diffusion", "colony"};

std::string corpus_path(const std::string& name) { return std::string(OPSIM_CORPUS_DIR) + "/" + name + ".opml"; }

const Diagnostic& first_error(const ParseResult& r) {
    REQUIRE_FALSE(r.ok());
    REQUIRE_FALSE(r.diagnostics.empty());
    return r.diagnostics.front();
}

}  // namespace

TEST_SUITE("dsl") {

TEST_CASE("a small pps document") {
    const auto r = parse(R"(pps demo {
    alphabet a b;
    types t;
    environment {b:2};
    cell t {a:3};
    cell t {};
    edge 1 2;
    rule transform t: a -> b b;
    rule enter t: a ; b;
    rule exit t: b;
    rule divide t: a -> a | b;
    rule die t: b;
})");
    REQUIRE(r.ok());
    CHECK(r.document->kind == Kind::Pps);
    CHECK(r.document->name == "demo");
    const auto& m = std::get<pps::Model>(r.document->body);
    CHECK(m.alphabet.size() == 2);
    CHECK(m.cells.size() == 2);
    CHECK(m.cells[0].contents == Multiset{{"a", 3}});
    CHECK(m.environment == Multiset{{"b", 2}});
    CHECK(m.initial_edges == std::vector<pps::InitialEdge>{{1, 2}});
    REQUIRE(m.rules.size() == 5);
    const auto& t = std::get<pps::Transform>(m.rules[0]);
    CHECK(t.produced == Multiset{{"b", 2}});
    CHECK(std::get<pps::CommEnter>(m.rules[1]).trigger == std::optional<Symbol>(Symbol("a")));
}

TEST_CASE("a trigger written as underscore is absent") {
    const auto r = parse("pps { alphabet a; types t; cell t {}; rule enter t: _ ; a; }");
    REQUIRE(r.ok());
    const auto& m = std::get<pps::Model>(r.document->body);
    CHECK_FALSE(std::get<pps::CommEnter>(m.rules[0]).trigger);
}

TEST_CASE("every corpus model parses, checks and round-trips") {
    for (const char* name : kCorpus) {
        CAPTURE(name);
        const ParseResult r = parse_file(corpus_path(name));
        REQUIRE(r.ok());
        CHECK(check(*r.document).empty());
        const std::string once = print(*r.document);
        const ParseResult again = parse(once);
        REQUIRE(again.ok());
        CHECK(*again.document == *r.document);
        CHECK(print(*again.document) == once);
        CHECK(digest(*again.document) == digest(*r.document));
    }
}

TEST_CASE("built models round-trip through text") {
    const ModelDocument tumour = make_document(models::build_tumour(), "tumour");
    const ParseResult t = parse(print(tumour));
    REQUIRE(t.ok());
    CHECK(*t.document == tumour);

    models::AntParams ap;
    ap.seed = 9;
    const ModelDocument ants = make_document(models::build_ants(ap), "ants");
    const ParseResult a = parse(print(ants));
    REQUIRE(a.ok());
    CHECK(*a.document == ants);

    const ModelDocument fx = make_document(models::build_food_exchange(), "fx");
    const ParseResult f = parse(print(fx));
    REQUIRE(f.ok());
    CHECK(*f.document == fx);
}

TEST_CASE("digests depend on content only") {
    const auto a = parse("pps { alphabet a; types t; cell t {a}; }");
    const auto b = parse("// comment\npps {\n  alphabet a;\n  types t;\n  cell t {a:1};\n}\n");
    const auto c = parse("pps { alphabet a; types t; cell t {a:2}; }");
    REQUIRE((a.ok() && b.ok() && c.ok()));
    CHECK(digest(*a.document) == digest(*b.document));
    CHECK(digest(*a.document) != digest(*c.document));
    CHECK(digest(*a.document).size() == 16);
}

TEST_CASE("empty documents are reported") {
    CHECK(first_error(parse("")).code == "E-EMPTY-DOCUMENT");
    CHECK(first_error(parse("  // nothing\n /* at all */ ")).code == "E-EMPTY-DOCUMENT");
}

TEST_CASE("syntax errors point at the offending token") {
    const Diagnostic& d = first_error(parse("pps {\n  alphabet a;\n  cell t {a:};\n}"));
    CHECK(d.code == "E-SYNTAX");
    CHECK(d.location == Location{3, 13});
}

TEST_CASE("lexical errors") {
    CHECK(first_error(parse("pps { alphabet a; } $")).code == "E-LEXICAL");
    CHECK(first_error(parse("pps { /* never closed")).code == "E-LEXICAL");
    CHECK(first_error(parse("pps { alphabet 3x; }")).code == "E-LEXICAL");
}

TEST_CASE("only one model per document") {
    CHECK(first_error(parse("pps { alphabet a; } pps { alphabet b; }")).code == "E-SYNTAX");
    CHECK(first_error(parse("widget { }")).code == "E-SYNTAX");
}

TEST_CASE("semantic errors are located at the offending name") {
    const auto r = parse("pps {\n    alphabet a;\n    types t;\n    cell t {a, zz};\n}");
    const Diagnostic& d = first_error(r);
    CHECK(d.code == "E-UNDECLARED-SYMBOL");
    CHECK(d.location == Location{4, 16});
    CHECK(format_diagnostic(d, "m.opml") == "m.opml:4:16: error[E-UNDECLARED-SYMBOL]: " + d.message);
}

TEST_CASE("xm documents carry their stream") {
    const auto r = parse(R"(xm Toggle {
    inputs flip;
    states Off On;
    initial Off;
    function up : stream -> stream { }
    function down : stream -> stream { }
    transition Off -> On via up;
    transition On -> Off via down;
    stream flip flip flip;
})");
    REQUIRE(r.ok());
    const auto& x = std::get<XmModel>(r.document->body);
    CHECK(x.stream.size() == 3);
    CHECK(x.def.transitions.size() == 2);
    CHECK(r.document->name == "Toggle");
}

TEST_CASE("stream symbols must be inputs") {
    const auto r = parse("xm M { inputs a; states S; initial S; stream a b; }");
    CHECK(first_error(r).code == "E-UNDECLARED-SYMBOL");
}

TEST_CASE("values and literals") {
    const auto r = parse(R"(xm M {
    inputs a;
    states S;
    initial S;
    memory {
        n: int = -4;
        ok: bool = true;
        tag: sym = 'x;
        one: tuple = (1,);
        xs: seq = [1, 2];
        bag: set = {3, 1};
    }
})");
    REQUIRE(r.ok());
    const auto& mem = std::get<XmModel>(r.document->body).def.memory;
    CHECK(mem[0].initial == xm::Value::integer(-4));
    CHECK(mem[3].initial == xm::Value::tuple({xm::Value::integer(1)}));
    CHECK(mem[5].initial.to_string() == "{1, 3}");
}

TEST_CASE("expression parsing") {
    CHECK(xm::to_source(parse_expression("1+2*3")) == "1 + 2 * 3");
    CHECK_THROWS_AS(parse_expression("1 +"), ValidationError);
    CHECK_THROWS_AS(parse_expression("1 < 2 < 3"), ValidationError);
    CHECK_THROWS_AS(parse_expression("len(1, 2)"), ValidationError);
    CHECK_THROWS_AS(parse_expression("nosuch(1)"), ValidationError);
    CHECK_THROWS_AS(parse_expression("1 2"), ValidationError);
}

TEST_CASE("deep nesting is refused without exhausting the stack") {
    const std::string deep = std::string(5000, '(') + "1" + std::string(5000, ')');
    CHECK_THROWS_AS(parse_expression(deep), ValidationError);
    const std::string doc = "xm M { inputs a; states S; initial S; memory { n: int = 0; } "
                            "function f : stream -> stream { set n = " + deep + "; } }";
    CHECK(first_error(parse(doc)).code == "E-SYNTAX");
}

TEST_CASE("large counts and integers") {
    CHECK(first_error(parse("pps { alphabet a; types t; cell t {a:99999999999999999999}; }")).code == "E-SYNTAX");
    CHECK(first_error(parse("pps { alphabet a; types t; cell t {a:0}; }")).code == "E-SYNTAX");
}

TEST_CASE("unreadable files") {
    const auto r = parse_file(std::string(OPSIM_CORPUS_DIR) + "/does-not-exist.opml");
    CHECK(first_error(r).code == "E-IO");
}

TEST_CASE("cxm and operas documents") {
    const auto fx = parse_file(corpus_path("food_exchange"));
    REQUIRE(fx.ok());
    const auto& spec = std::get<xm::CxmSpec>(fx.document->body);
    CHECK(spec.machines.size() == 2);
    CHECK(spec.channels.size() == 1);

    const auto colony = parse_file(corpus_path("colony"));
    REQUIRE(colony.ok());
    const auto& o = std::get<operas::Spec>(colony.document->body);
    CHECK(o.width == 4);
    CHECK(o.types.at(0).str_mut.size() == 4);
    CHECK(o.links.size() == 1);
}

TEST_CASE("operas semantic errors are located") {
    const std::string text = R"(operas {
    grid 2 2;
    xm B {
        inputs tick;
        states S;
        initial S;
        memory {
            pos: tuple = (0, 0);
        }
    }
    type t : B {
        rule r when true => add_channel self;
    }
    agent t;
})";
    const Diagnostic& d = first_error(parse(text));
    CHECK(d.code == "E-BAD-SELECTOR");
    CHECK(d.location.line == 12);
}

TEST_CASE("source maps fall back to enclosing paths") {
    SourceMap m;
    m.note_path("machine A", {3, 1});
    m.note_token("machine A/function f", "x", {5, 9});
    m.note_token("machine A/function f", "x", {8, 2});
    CHECK(m.locate("machine A/function f", "x") == Location{5, 9});
    CHECK(m.locate("machine A/function g", "x") == Location{3, 1});
    CHECK(m.locate("elsewhere", "") == Location{1, 1});
}

TEST_CASE("comments and unicode columns") {
    const auto r = parse("/* λ */ pps { alphabet a; types t; cell t {a, q}; }");
    const Diagnostic& d = first_error(r);
    CHECK(d.location == Location{1, 47});
}

}
