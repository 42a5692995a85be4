#include <initializer_list>

#include "opsim/core/rng.hpp"
#include "opsim/dsl/parser.hpp"
#include "opsim/models/models.hpp"

namespace opsim::models {

namespace {

using dsl::parse_expression;

struct FnSpec {
    const char* name;
    const char* guard;
    std::initializer_list<std::pair<const char*, const char*>> updates;
};

xm::Function stream_fn(const FnSpec& spec) {
    xm::Function fn;
    fn.name = spec.name;
    if (spec.guard) fn.guard = parse_expression(spec.guard);
    for (const auto& [field, expr] : spec.updates) fn.updates.emplace_back(field, parse_expression(expr));
    return fn;
}

xm::EnvEffect effect(xm::EnvEffect::Op op, const char* object, std::int64_t amount) {
    return {op, Symbol(object), xm::Expr::lit(xm::Value::integer(amount))};
}

constexpr const char* kHungry = "m.food < m.threshold";
constexpr const char* kOnEdge = "m.pos.0 == 0 || m.pos.1 == 0 || m.pos.0 == width - 1 || m.pos.1 == height - 1";

}  // namespace

xm::MachineDef ant_behaviour(const AntParams& p) {
    xm::MachineDef def;
    def.name = "Ant";
    for (const char* object : {"food", "pheromone"}) {
        for (const char* dir : {"here", "N", "E", "S", "W"}) def.inputs.insert(Symbol(std::string(object) + "_" + dir));
    }
    def.inputs.insert(Symbol("tick"));
    def.states = {"Inactive", "Active", "Outside"};
    def.initial_state = "Inactive";
    def.memory = {
        {"pos", xm::ValueKind::Tuple, xm::Value::tuple({xm::Value::integer(0), xm::Value::integer(0)})},
        {"food", xm::ValueKind::Int, xm::Value::integer(p.threshold)},
        {"threshold", xm::ValueKind::Int, xm::Value::integer(p.threshold)},
    };

    const std::string edge_roll = std::string("(") + kOnEdge + ") && roll % 10 == 0";
    const std::string wander_guard = std::string("input == 'tick && ") + kHungry + " && !(" +
                                     (p.foraging ? edge_roll : std::string("false")) + ")";
    const char* clamp_x = "min(max(m.pos.0 + (if roll % 4 == 1 then 1 else if roll % 4 == 3 then -1 else 0), 0), width - 1)";
    const char* clamp_y = "min(max(m.pos.1 + (if roll % 4 == 2 then 1 else if roll % 4 == 0 then -1 else 0), 0), height - 1)";
    const std::string wander_pos = std::string("(") + clamp_x + ", " + clamp_y + ")";

    auto add = [&](xm::Function fn, const char* from, const char* to) {
        def.transitions.push_back({from, fn.name, to});
        def.functions.push_back(std::move(fn));
    };

    // Resting inside the nest.
    add(stream_fn({"rest", "input == 'tick && m.food >= m.threshold && (peers == 0 || m.food == m.threshold)", {}}),
        "Inactive", "Inactive");
    {
        xm::Function give = stream_fn({"give_food", "input == 'tick && m.food > m.threshold && peers > 0",
                                       {{"food", "m.threshold"}}});
        give.output = xm::Port::peer();
        give.output_value = parse_expression("m.food - m.threshold");
        add(std::move(give), "Inactive", "Inactive");
    }
    add(stream_fn({"wake", "input == 'tick && m.food < m.threshold", {}}), "Inactive", "Active");

    // Receiving food over a link, in any state.
    {
        xm::Function accept = stream_fn({"accept_food", nullptr, {{"food", "m.food + input"}}});
        accept.input = xm::Port::peer();
        def.functions.push_back(accept);
        for (const char* s : {"Inactive", "Active", "Outside"}) def.transitions.push_back({s, "accept_food", s});
    }

    // Searching.
    {
        xm::Function eat = stream_fn({"eat", "input == 'food_here && m.food < m.threshold", {{"food", "m.food + 1"}}});
        eat.effects = {effect(xm::EnvEffect::Op::Take, "food", 1), effect(xm::EnvEffect::Op::Put, "pheromone", 1)};
        add(std::move(eat), "Active", "Active");
    }
    struct Move {
        const char* dir;
        const char* pos;
    };
    const Move moves[] = {{"N", "(m.pos.0, m.pos.1 - 1)"},
                          {"E", "(m.pos.0 + 1, m.pos.1)"},
                          {"S", "(m.pos.0, m.pos.1 + 1)"},
                          {"W", "(m.pos.0 - 1, m.pos.1)"}};
    for (const Move& mv : moves) {
        const std::string name = std::string("seek_food_") + mv.dir;
        const std::string guard = std::string("input == 'food_") + mv.dir + " && " + kHungry;
        add(stream_fn({name.c_str(), guard.c_str(), {{"pos", mv.pos}}}), "Active", "Active");
    }
    for (const Move& mv : moves) {
        const std::string name = std::string("follow_") + mv.dir;
        const std::string guard = std::string("input == 'pheromone_") + mv.dir + " && " + kHungry + " && roll % 2 == 0";
        add(stream_fn({name.c_str(), guard.c_str(), {{"pos", mv.pos}}}), "Active", "Active");
    }
    add(stream_fn({"wander", wander_guard.c_str(), {{"pos", wander_pos.c_str()}}}), "Active", "Active");
    add(stream_fn({"settle", "input == 'tick && m.food >= m.threshold", {}}), "Active", "Inactive");

    // Foraging outside the nest, left and re-entered at the boundary.
    if (p.foraging) {
        const std::string out_guard = std::string("input == 'tick && ") + kHungry + " && " + edge_roll;
        add(stream_fn({"go_out", out_guard.c_str(), {}}), "Active", "Outside");
        add(stream_fn({"stay_out", "input == 'tick && roll % 3 != 0", {}}), "Outside", "Outside");
        const std::string gain = "m.food + " + std::to_string(p.forage_gain);
        add(stream_fn({"enter_nest", "input == 'tick && roll % 3 == 0", {{"food", gain.c_str()}}}), "Outside",
            "Active");
    }
    return def;
}

operas::Spec build_ants(const AntParams& p) {
    if (p.grid_width < 1 || p.grid_height < 1) throw ParameterError("grid must be at least 1x1");
    if (p.threshold <= 0) throw ParameterError("threshold must be positive");
    if (p.ants < 0) throw ParameterError("ant count must be non-negative");
    if (p.max_initial_food < 0) throw ParameterError("initial food bound must be non-negative");
    if (p.food_piles < 0 || p.pile_size < 1) throw ParameterError("food piles need a non-negative count and positive size");
    if (p.forage_gain < 0) throw ParameterError("forage gain must be non-negative");

    operas::Spec spec;
    spec.width = p.grid_width;
    spec.height = p.grid_height;
    spec.behaviours.push_back(ant_behaviour(p));

    operas::AgentType ant;
    ant.name = "ant";
    ant.behaviour = "Ant";
    ant.percept_filter = {Symbol("food"), Symbol("pheromone")};
    ant.str_mut.push_back({"link_up", std::nullopt, parse_expression("state == 'Active && peers == 0"),
                           {operas::Action::Kind::AddChannel, "", {}, operas::Selector::Nearest, 1}});
    ant.str_mut.push_back({"unlink", std::nullopt,
                           parse_expression("peers > 0 && (state == 'Inactive && m.food <= m.threshold || "
                                            "state == 'Outside || state == 'Active && roll % 5 == 0)"),
                           {operas::Action::Kind::RemoveChannel, "", {}, operas::Selector::NearestPeer, 1}});
    spec.types.push_back(std::move(ant));

    Rng rng(p.seed);
    auto coord = [&](std::int64_t bound) { return static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(bound))); };
    for (int i = 0; i < p.food_piles; ++i) {
        const std::int64_t x = coord(p.grid_width);
        const std::int64_t y = coord(p.grid_height);
        bool merged = false;
        for (auto& pl : spec.placements) {
            if (pl.x == x && pl.y == y) {
                pl.objects.add(Symbol("food"), p.pile_size);
                merged = true;
            }
        }
        if (!merged) spec.placements.push_back({x, y, Multiset::of(Symbol("food"), p.pile_size)});
    }
    for (int i = 0; i < p.ants; ++i) {
        operas::AgentDecl a;
        a.type = "ant";
        const std::int64_t x = coord(p.grid_width);
        const std::int64_t y = coord(p.grid_height);
        const std::int64_t food = coord(p.max_initial_food + 1);
        a.overrides = {{"pos", xm::Value::tuple({xm::Value::integer(x), xm::Value::integer(y)})},
                       {"food", xm::Value::integer(food)}};
        spec.agents.push_back(std::move(a));
    }
    throw_if_issues(operas::validation_issues(spec));
    return spec;
}

xm::CxmSpec build_food_exchange(const FoodExchangeParams& p) {
    if (p.threshold <= 0) throw ParameterError("threshold must be positive");
    if (p.donor_food < 0 || p.receiver_food < 0) throw ParameterError("food reserves must be non-negative");

    auto ant_def = [&](const char* name) {
        xm::MachineDef def;
        def.name = name;
        def.inputs = {Symbol("tick")};
        def.states = {"Ready", "Done"};
        def.initial_state = "Ready";
        def.memory = {{"food", xm::ValueKind::Int, xm::Value::integer(0)},
                      {"threshold", xm::ValueKind::Int, xm::Value::integer(p.threshold)}};
        return def;
    };

    xm::MachineDef donor = ant_def("Donor");
    {
        xm::Function give = stream_fn({"giveFood", "input == 'tick && m.food > m.threshold", {{"food", "m.threshold"}}});
        give.output = xm::Port::on_channel("c");
        give.output_value = parse_expression("m.food - m.threshold");
        donor.functions.push_back(std::move(give));
        donor.transitions.push_back({"Ready", "giveFood", "Done"});
    }

    xm::MachineDef receiver = ant_def("Receiver");
    {
        xm::Function take = stream_fn({"takeEnoughFood", nullptr, {{"food", "m.food + input"}}});
        take.input = xm::Port::on_channel("c");
        receiver.functions.push_back(std::move(take));
        receiver.transitions.push_back({"Ready", "takeEnoughFood", "Done"});
    }

    xm::CxmSpec spec;
    spec.defs = {donor, receiver};
    spec.machines.push_back({"donor", "Donor", {Symbol("tick"), Symbol("tick")}, {{"food", xm::Value::integer(p.donor_food)}}});
    spec.machines.push_back({"receiver", "Receiver", {}, {{"food", xm::Value::integer(p.receiver_food)}}});
    spec.channels.push_back({"c", "donor", "receiver"});
    throw_if_issues(xm::validation_issues(spec));
    return spec;
}

}  // namespace opsim::models
