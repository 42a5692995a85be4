#include <doctest.h>

#include <algorithm>

#include "opsim/dsl/parser.hpp"
#include "opsim/xm/expr.hpp"
#include "opsim/xm/machine.hpp"
#include "opsim/xm/value.hpp"

using namespace opsim;
using namespace opsim::xm;
using opsim::dsl::parse_expression;

namespace {

Value eval(const std::string& src, const Memory& memory = {}, const Value* input = nullptr) {
    EvalContext ctx;
    ctx.memory = &memory;
    ctx.input = input;
    ctx.roll = 42;
    return evaluate(parse_expression(src), ctx);
}

Function fn(const std::string& name, const std::string& guard,
            std::vector<std::pair<std::string, std::string>> updates = {}, const std::string& output = "") {
    Function f;
    f.name = name;
    if (!guard.empty()) f.guard = parse_expression(guard);
    for (auto& [field, e] : updates) f.updates.emplace_back(field, parse_expression(e));
    if (!output.empty()) f.output_value = parse_expression(output);
    return f;
}

// Counter: `up` on 'inc, `reset` on 'zero; both loop on state Run.
MachineDef counter() {
    MachineDef d;
    d.name = "Counter";
    d.inputs = {Symbol("inc"), Symbol("zero")};
    d.states = {"Run"};
    d.initial_state = "Run";
    d.memory = {{"n", ValueKind::Int, Value::integer(0)}};
    d.functions = {fn("up", "input == 'inc", {{"n", "m.n + 1"}}, "m.n + 1"),
                   fn("reset", "input == 'zero", {{"n", "0"}})};
    d.transitions = {{"Run", "up", "Run"}, {"Run", "reset", "Run"}};
    return d;
}

bool has_code(const std::vector<Issue>& issues, const std::string& code) {
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

}  // namespace

TEST_SUITE("xm") {

TEST_CASE("values print as literals") {
    CHECK(Value::integer(-3).to_string() == "-3");
    CHECK(Value::boolean(true).to_string() == "true");
    CHECK(Value::symbol(Symbol("go")).to_string() == "'go");
    CHECK(Value::tuple({Value::integer(1)}).to_string() == "(1,)");
    CHECK(Value().to_string() == "()");
    CHECK(Value().is_unit());
    CHECK(Value::seq({Value::integer(2), Value::integer(1)}).to_string() == "[2, 1]");
    CHECK(Value::set({Value::integer(2), Value::integer(1), Value::integer(2)}).to_string() == "{1, 2}");
}

TEST_CASE("value accessors check the kind") {
    CHECK_THROWS_AS(Value::boolean(true).as_int(), EvalError);
    CHECK_THROWS_AS(Value::integer(1).as_symbol(), EvalError);
    CHECK_THROWS_AS(Value::integer(1).items(), EvalError);
    CHECK(Value::integer(1) < Value::integer(2));
    CHECK(Value::integer(5) != Value::boolean(true));
}

TEST_CASE("arithmetic, comparison and logic") {
    CHECK(eval("1 + 2 * 3") == Value::integer(7));
    CHECK(eval("(1 + 2) * 3") == Value::integer(9));
    CHECK(eval("7 / 2") == Value::integer(3));
    CHECK(eval("-7 % 3") == Value::integer(-1));
    CHECK(eval("10 - 4 - 3") == Value::integer(3));
    CHECK(eval("1 < 2 && !(3 <= 2)") == Value::boolean(true));
    CHECK(eval("false || 2 != 2") == Value::boolean(false));
    CHECK(eval("if 1 > 0 then 'yes else 'no") == Value::symbol(Symbol("yes")));
    CHECK(eval("roll % 10") == Value::integer(2));
}

TEST_CASE("arithmetic faults are evaluation errors") {
    CHECK_THROWS_AS(eval("1 / 0"), EvalError);
    CHECK_THROWS_AS(eval("1 % 0"), EvalError);
    CHECK_THROWS_AS(eval("9223372036854775807 + 1"), EvalError);
    CHECK_THROWS_AS(eval("-9223372036854775807 - 2"), EvalError);
    CHECK_THROWS_AS(eval("4611686018427387904 * 2"), EvalError);
    CHECK_THROWS_AS(eval("1 + true"), EvalError);
    CHECK_THROWS_AS(eval("if 1 then 2 else 3"), EvalError);
}

TEST_CASE("collections and builtins") {
    CHECK(eval("(4, 5).1") == Value::integer(5));
    CHECK_THROWS_AS(eval("(4, 5).2"), EvalError);
    CHECK(eval("len([1, 2, 3])") == Value::integer(3));
    CHECK(eval("append([1], 2)") == Value::seq({Value::integer(1), Value::integer(2)}));
    CHECK(eval("insert({3}, 1)") == Value::set({Value::integer(1), Value::integer(3)}));
    CHECK(eval("remove({1, 3}, 1)") == Value::set({Value::integer(3)}));
    CHECK(eval("2 in {1, 2}") == Value::boolean(true));
    CHECK(eval("'a in ['b]") == Value::boolean(false));
    CHECK(eval("min(3, -1) + max(3, -1) + abs(-5)") == Value::integer(7));
    CHECK_THROWS_AS(eval("append({1}, 2)"), EvalError);
    CHECK_THROWS_AS(eval("env('food)"), EvalError);
}

TEST_CASE("memory and input are read from the context") {
    const Memory mem{{"n", Value::integer(4)}, {"p", Value::tuple({Value::integer(1), Value::integer(2)})}};
    const Value in = Value::integer(10);
    CHECK(eval("m.n + input", mem, &in) == Value::integer(14));
    CHECK(eval("m.p.1 * m.n", mem) == Value::integer(8));
    CHECK_THROWS_AS(eval("m.q", mem), EvalError);
    CHECK_THROWS_AS(eval("input"), EvalError);
}

TEST_CASE("expressions print canonically with minimal parentheses") {
    CHECK(to_source(parse_expression("(1 + 2) * 3")) == "(1 + 2) * 3");
    CHECK(to_source(parse_expression("1 + (2 * 3)")) == "1 + 2 * 3");
    CHECK(to_source(parse_expression("1 - (2 - 3)")) == "1 - (2 - 3)");
    CHECK(to_source(parse_expression("(1 - 2) - 3")) == "1 - 2 - 3");
    CHECK(to_source(parse_expression("!(m.a == 1)")) == "!(m.a == 1)");
    for (const char* src : {"m.x.0 + -1", "if m.a then m.b else m.c", "len(append([], (1,)))", "m.x in {1, 2} || !m.y"}) {
        const std::string once = to_source(parse_expression(src));
        CHECK(to_source(parse_expression(once)) == once);
    }
}

TEST_CASE("a deterministic machine folds its stream") {
    const MachineDef d = counter();
    REQUIRE(validation_issues(d, MachineContext::Standalone).empty());
    const StreamResult r = run_stream(d, {Symbol("inc"), Symbol("inc"), Symbol("zero"), Symbol("inc")});
    CHECK(r.state == "Run");
    CHECK(r.memory.at("n") == Value::integer(1));
    REQUIRE(r.outputs.size() == 4);
    CHECK(r.outputs[0] == Value::integer(1));
    CHECK(r.outputs[1] == Value::integer(2));
    CHECK(r.outputs[2].is_unit());
    CHECK(r.outputs[3] == Value::integer(1));
}

TEST_CASE("updates read the pre-firing memory") {
    MachineDef d = counter();
    d.memory.push_back({"prev", ValueKind::Int, Value::integer(0)});
    d.functions[0].updates.emplace_back("prev", parse_expression("m.n"));
    const StreamResult r = run_stream(d, {Symbol("inc"), Symbol("inc")});
    CHECK(r.memory.at("n") == Value::integer(2));
    CHECK(r.memory.at("prev") == Value::integer(1));
}

TEST_CASE("a missing function is reported with its position") {
    MachineDef d = counter();
    d.transitions.pop_back();
    try {
        run_stream(d, {Symbol("inc"), Symbol("zero")});
        FAIL("expected NoApplicableFunction");
    } catch (const NoApplicableFunction& e) {
        CHECK(e.state() == "Run");
        CHECK(e.input_index == std::optional<std::size_t>(1));
        CHECK(e.outputs.size() == 1);
        CHECK(e.machine == "Counter");
    }
}

TEST_CASE("inputs outside the alphabet are rejected") {
    CHECK_THROWS_AS(run_stream(counter(), {Symbol("boom")}), InvalidInput);
}

TEST_CASE("overlapping guards raise a nondeterminism error") {
    MachineDef d = counter();
    d.functions.push_back(fn("also_up", "input == 'inc && m.n >= 1"));
    d.transitions.push_back({"Run", "also_up", "Run"});
    try {
        run_stream(d, {Symbol("inc"), Symbol("zero"), Symbol("inc"), Symbol("inc")});
        FAIL("expected NondeterminismError");
    } catch (const NondeterminismError& e) {
        CHECK(e.state() == "Run");
        CHECK(e.input_index == std::optional<std::size_t>(3));
        CHECK(e.functions() == std::vector<std::string>{"up", "also_up"});
        CHECK(e.code() == "E-NONDETERMINISM");
        CHECK(e.describe().find("[input index 3]") != std::string::npos);
    }
}

TEST_CASE("field kinds and symbolic outputs are enforced when firing") {
    MachineDef d = counter();
    d.functions[1].updates = {{"n", parse_expression("true")}};
    CHECK_THROWS_AS(run_stream(d, {Symbol("zero")}), EvalError);

    MachineDef s = counter();
    s.outputs = {Symbol("ok")};
    s.functions[1].output_value = parse_expression("'nope");
    CHECK_THROWS_AS(run_stream(s, {Symbol("zero")}), EvalError);
    s.functions[1].output_value = parse_expression("'ok");
    CHECK(run_stream(s, {Symbol("zero")}).outputs.at(0) == Value::symbol(Symbol("ok")));
}

TEST_CASE("a single step exposes the fired function") {
    const MachineDef d = counter();
    const StepOutcome o = xm_step(d, "Run", d.initial_memory(), Symbol("inc"));
    CHECK(o.function == "up");
    CHECK(o.memory.at("n") == Value::integer(1));
    CHECK(d.next_state("Run", "up") == std::optional<std::string>("Run"));
    CHECK_FALSE(d.next_state("Run", "nothing"));
    CHECK(d.outgoing("Run").size() == 2);
}

TEST_CASE("static checks on machine definitions") {
    MachineDef d = counter();
    d.initial_state = "Nowhere";
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-UNDECLARED-STATE"));

    d = counter();
    d.transitions.push_back({"Run", "ghost", "Run"});
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-UNDECLARED-FUNCTION"));

    d = counter();
    d.functions[0].updates.emplace_back("missing", parse_expression("1"));
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-UNDECLARED-FIELD"));

    d = counter();
    d.memory[0].initial = Value::boolean(false);
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-TYPE-MISMATCH"));

    d = counter();
    d.functions[0].input = Port::peer();
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-BAD-PORT"));
    CHECK_FALSE(has_code(validation_issues(d, MachineContext::Operas), "E-BAD-PORT"));

    d = counter();
    d.functions[0].output = Port::on_channel("c");
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-BAD-PORT"));

    d = counter();
    d.functions[0].guard = parse_expression("peers > 0");
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-BAD-CONTEXT"));

    d = counter();
    d.functions.push_back(d.functions[0]);
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-DUPLICATE"));

    d = counter();
    d.states.clear();
    CHECK(has_code(validation_issues(d, MachineContext::Standalone), "E-NO-STATES"));
}

TEST_CASE("builtin table") {
    CHECK(builtin_arity("len") == std::optional<std::size_t>(1));
    CHECK(builtin_arity("min") == std::optional<std::size_t>(2));
    CHECK_FALSE(builtin_arity("sqrt"));
    CHECK(is_binary_operator("in"));
    CHECK(binary_precedence("*") > binary_precedence("+"));
}

}
