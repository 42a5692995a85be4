#include <doctest.h>

#include "opsim/models/models.hpp"
#include "opsim/operas/system.hpp"
#include "opsim/xm/cxm.hpp"

using namespace opsim;
using namespace opsim::models;

TEST_SUITE("models") {

TEST_CASE("tumour parameters are checked") {
    TumourParams p;
    p.metatransitory_death_age = p.transitory_death_age;
    CHECK_THROWS_AS(build_tumour(p), ParameterError);
    p = {};
    p.maturity_age = -1;
    CHECK_THROWS_AS(build_tumour(p), ParameterError);
    p = {};
    p.grid_width = 0;
    CHECK_THROWS_AS(build_tumour(p), ParameterError);
    CHECK_NOTHROW(build_tumour());
}

TEST_CASE("a single stem cell divides every step") {
    const pps::Model m = build_tumour();
    REQUIRE(m.cells.size() == 1);
    CHECK(m.cells[0].type == Symbol(kStem));
    const auto r = pps::run(m, 2, {}, 1);
    CHECK(r.snapshots[1].cells.size() == 2);
    std::size_t stems = 0;
    for (const auto& [id, c] : r.snapshots[1].cells) stems += c.type == Symbol(kStem);
    CHECK(stems >= 1);
}

TEST_CASE("offspring age one level per step and die at their death age") {
    TumourParams p;
    p.maturity_age = 0;
    p.transitory_death_age = 3;
    p.metatransitory_death_age = 2;
    const pps::Model m = build_tumour(p);
    const auto r = pps::run(m, 12, {}, 5);
    for (const auto& snap : r.snapshots) {
        for (const auto& [id, c] : snap.cells) {
            const auto age = tumour_age(c);
            REQUIRE(age);
            if (c.type == Symbol(kTransitory)) CHECK(*age <= 3);
            if (c.type == Symbol(kMetatransitory)) CHECK(*age <= 2);
        }
    }
}

TEST_CASE("tumour ages read the level object") {
    CHECK(tumour_age({1, Symbol(kStem), Multiset{{"s", 1}}}) == std::optional<int>(0));
    CHECK(tumour_age({1, Symbol(kTransitory), Multiset{{"a4", 1}}}) == std::optional<int>(4));
    CHECK(tumour_age({1, Symbol(kMetatransitory), Multiset{{"m12", 1}}}) == std::optional<int>(12));
    CHECK_FALSE(tumour_age({1, Symbol(kTransitory), Multiset{}}));
}

TEST_CASE("ant colonies depend only on their parameters") {
    AntParams p;
    p.seed = 4;
    CHECK(build_ants(p) == build_ants(p));
    AntParams q = p;
    q.seed = 5;
    CHECK_FALSE(build_ants(p) == build_ants(q));
    const operas::Spec s = build_ants(p);
    CHECK(s.agents.size() == 6);
    CHECK(operas::validation_issues(s).empty());
}

TEST_CASE("ant parameters are checked") {
    AntParams p;
    p.threshold = 0;
    CHECK_THROWS_AS(build_ants(p), ParameterError);
    p = {};
    p.pile_size = 0;
    CHECK_THROWS_AS(build_ants(p), ParameterError);
    p = {};
    p.ants = -2;
    CHECK_THROWS_AS(build_ants(p), ParameterError);
}

TEST_CASE("ant colonies run without nondeterminism") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        AntParams p;
        p.seed = seed;
        operas::System sys = operas::instantiate(build_ants(p));
        Rng rng(seed);
        for (int k = 0; k < 40; ++k) {
            CAPTURE(seed);
            CAPTURE(k);
            REQUIRE_NOTHROW(sys = operas::operas_step(sys, rng).system);
        }
    }
}

TEST_CASE("ants without foraging never leave the nest") {
    AntParams p;
    p.foraging = false;
    const xm::MachineDef def = ant_behaviour(p);
    CHECK(def.find_function("go_out") == nullptr);
    CHECK(def.states.size() == 3);
}

TEST_CASE("the food exchange moves the surplus in two rounds") {
    xm::CxmSystem sys = xm::instantiate(build_food_exchange());
    Rng rng(0);
    sys = xm::cxm_step(sys, rng).system;
    CHECK(sys.machines[0].memory.at("food") == xm::Value::integer(5));
    CHECK(sys.find_channel("c")->buffer == std::optional<xm::Value>(xm::Value::integer(5)));
    sys = xm::cxm_step(sys, rng).system;
    CHECK(sys.machines[1].memory.at("food") == xm::Value::integer(7));

    FoodExchangeParams bad;
    bad.donor_food = -1;
    CHECK_THROWS_AS(build_food_exchange(bad), ParameterError);
}

}
