#include <doctest.h>

#include <algorithm>

#include "opsim/dsl/parser.hpp"
#include "opsim/models/models.hpp"
#include "opsim/xm/cxm.hpp"

using namespace opsim;
using namespace opsim::xm;

namespace {

bool has_code(const std::vector<Issue>& issues, const std::string& code) {
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

// Relay: a producer emits its counter, a consumer accumulates what arrives.
CxmSpec relay(int ticks) {
    MachineDef producer;
    producer.name = "Producer";
    producer.inputs = {Symbol("tick")};
    producer.states = {"On"};
    producer.initial_state = "On";
    producer.memory = {{"n", ValueKind::Int, Value::integer(0)}};
    Function send;
    send.name = "send";
    send.output = Port::on_channel("link");
    send.output_value = dsl::parse_expression("m.n + 1");
    send.updates = {{"n", dsl::parse_expression("m.n + 1")}};
    producer.functions = {send};
    producer.transitions = {{"On", "send", "On"}};

    MachineDef consumer;
    consumer.name = "Consumer";
    consumer.states = {"On"};
    consumer.initial_state = "On";
    consumer.memory = {{"sum", ValueKind::Int, Value::integer(0)}};
    Function recv;
    recv.name = "recv";
    recv.input = Port::on_channel("link");
    recv.updates = {{"sum", dsl::parse_expression("m.sum + input")}};
    consumer.functions = {recv};
    consumer.transitions = {{"On", "recv", "On"}};

    CxmSpec spec;
    spec.defs = {producer, consumer};
    spec.machines = {{"p", "Producer", std::vector<Symbol>(ticks, Symbol("tick")), {}}, {"c", "Consumer", {}, {}}};
    spec.channels = {{"link", "p", "c"}};
    return spec;
}

}  // namespace

TEST_SUITE("cxm") {

TEST_CASE("a relay spec validates and instantiates") {
    const CxmSpec spec = relay(3);
    REQUIRE(validation_issues(spec).empty());
    const CxmSystem sys = instantiate(spec);
    REQUIRE(sys.machines.size() == 2);
    CHECK(sys.machines[0].state == "On");
    REQUIRE(sys.find_channel("link"));
    CHECK_FALSE(sys.find_channel("link")->buffer);
    CHECK(sys.find_channel("nope") == nullptr);
}

TEST_CASE("messages are read one round after they are written") {
    CxmSystem sys = instantiate(relay(3));
    Rng rng(0);

    RoundResult r1 = cxm_step(sys, rng);
    CHECK(r1.activity[0].fired == std::optional<std::string>("send"));
    CHECK(r1.activity[0].wrote == std::optional<std::string>("link"));
    CHECK(r1.activity[1].idle_reason == "channel-empty");
    CHECK(r1.system.find_channel("link")->buffer == std::optional<Value>(Value::integer(1)));

    RoundResult r2 = cxm_step(r1.system, rng);
    // The buffer was full at round start, so the producer blocks while the consumer drains it.
    CHECK(r2.activity[0].idle_reason == "channel-full");
    CHECK(r2.activity[1].fired == std::optional<std::string>("recv"));
    CHECK(r2.system.machines[1].memory.at("sum") == Value::integer(1));
    CHECK_FALSE(r2.system.find_channel("link")->buffer);

    CxmSystem s = r2.system;
    for (int i = 0; i < 6; ++i) s = cxm_step(s, rng).system;
    CHECK(s.machines[1].memory.at("sum") == Value::integer(1 + 2 + 3));
    CHECK(s.machines[0].cursor == 3);
    CHECK(s.round == 8);
}

TEST_CASE("a system with nothing to do is all idle") {
    CxmSystem sys = instantiate(relay(0));
    Rng rng(0);
    const RoundResult r = cxm_step(sys, rng);
    CHECK(r.all_idle());
    CHECK(r.activity[0].idle_reason == "stream-exhausted");
}

TEST_CASE("terminal states idle") {
    const CxmSpec spec = models::build_food_exchange();
    CxmSystem sys = instantiate(spec);
    Rng rng(3);
    for (int i = 0; i < 3; ++i) sys = cxm_step(sys, rng).system;
    const RoundResult r = cxm_step(sys, rng);
    CHECK(r.all_idle());
    CHECK(r.activity[0].idle_reason == "terminal-state");
    CHECK(r.activity[1].idle_reason == "terminal-state");
}

TEST_CASE("static checks on communicating systems") {
    CxmSpec s = relay(1);
    s.channels[0].to = "ghost";
    CHECK(has_code(validation_issues(s), "E-BAD-CHANNEL"));
    CHECK_THROWS_AS(instantiate(s), ValidationError);

    s = relay(1);
    s.machines[1].def = "Missing";
    CHECK(has_code(validation_issues(s), "E-UNDECLARED-MACHINE"));

    s = relay(1);
    s.machines.push_back(s.machines[0]);
    CHECK(has_code(validation_issues(s), "E-DUPLICATE"));

    s = relay(1);
    s.machines[0].stream.push_back(Symbol("tock"));
    CHECK(has_code(validation_issues(s), "E-UNDECLARED-SYMBOL"));

    s = relay(1);
    s.machines[0].overrides = {{"n", Value::boolean(true)}};
    CHECK(has_code(validation_issues(s), "E-TYPE-MISMATCH"));

    s = relay(1);
    s.machines[0].overrides = {{"zz", Value::integer(1)}};
    CHECK(has_code(validation_issues(s), "E-UNDECLARED-FIELD"));

    s = relay(1);
    s.defs[0].functions[0].output = Port::on_channel("other");
    CHECK(has_code(validation_issues(s), "E-BAD-CHANNEL"));
}

TEST_CASE("overlapping guards in a system name the machine") {
    CxmSpec s = relay(2);
    Function dup = s.defs[0].functions[0];
    dup.name = "send_too";
    s.defs[0].functions.push_back(dup);
    s.defs[0].transitions.push_back({"On", "send_too", "On"});
    CxmSystem sys = instantiate(s);
    Rng rng(0);
    try {
        cxm_step(sys, rng);
        FAIL("expected NondeterminismError");
    } catch (const NondeterminismError& e) {
        CHECK(e.machine == "p");
        CHECK(e.input_index == std::optional<std::size_t>(0));
    }
}

}
