#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opsim/core/issue.hpp"
#include "opsim/core/multiset.hpp"
#include "opsim/core/rng.hpp"
#include "opsim/xm/expr.hpp"
#include "opsim/xm/machine.hpp"

namespace opsim::operas {

using AgentId = std::uint64_t;
/// Unordered pair, stored with first < second.
using Link = std::pair<AgentId, AgentId>;

Link make_link(AgentId a, AgentId b);

/// Target of a reconfiguration action.
///  - Self: the evaluating agent.
///  - Peer: its unique communication partner; several partners is SelectorAmbiguous.
///  - NearestPeer: the partner closest on the grid (Manhattan), lowest id on ties.
///  - Nearest: the closest other agent within `radius` (Manhattan), lowest id on ties;
///    for AddChannel only agents not already linked are considered.
enum class Selector { Self, Peer, NearestPeer, Nearest };

struct Action {
    enum class Kind { AddAgent, RemoveAgent, AddChannel, RemoveChannel };
    Kind kind = Kind::AddAgent;
    std::string agent_type;                                    // AddAgent
    std::vector<std::pair<std::string, xm::Expr>> initializer;  // AddAgent, evaluated in the creator's context
    Selector selector = Selector::Self;
    std::int64_t radius = 1;  // Selector::Nearest

    bool structural() const noexcept { return kind == Kind::AddAgent || kind == Kind::RemoveAgent; }
    friend bool operator==(const Action&, const Action&) = default;
};

/// condition => action
struct ReconfigRule {
    std::string name;
    std::optional<std::string> for_type;  // global rules only; unset applies to every agent
    xm::Expr condition;
    Action action;
    friend bool operator==(const ReconfigRule&, const ReconfigRule&) = default;
};

struct AgentType {
    std::string name;
    std::string behaviour;             // name of the machine definition
    std::set<Symbol> percept_filter;   // grid objects this type perceives
    std::vector<ReconfigRule> str_mut;
    friend bool operator==(const AgentType&, const AgentType&) = default;
};

struct Placement {
    std::int64_t x = 0;
    std::int64_t y = 0;
    Multiset objects;
    friend bool operator==(const Placement&, const Placement&) = default;
};

struct AgentDecl {
    std::string type;
    std::vector<std::pair<std::string, xm::Value>> overrides;
    friend bool operator==(const AgentDecl&, const AgentDecl&) = default;
};

/// Declarative OPERAS_XC system (O, P, E, R, A, S) as written in a model file.
struct Spec {
    std::vector<xm::MachineDef> behaviours;
    std::vector<AgentType> types;          // S
    std::vector<ReconfigRule> global_rules;  // O
    std::int64_t width = 1;
    std::int64_t height = 1;
    std::vector<Placement> placements;     // E
    Multiset globals;
    std::vector<AgentDecl> agents;         // A, ids 1..n in order
    std::vector<std::pair<std::size_t, std::size_t>> links;  // R, 1-based
    friend bool operator==(const Spec&, const Spec&) = default;
};

std::vector<Issue> validation_issues(const Spec& spec);

struct Environment {
    std::int64_t width = 1;
    std::int64_t height = 1;
    std::vector<Multiset> grid;  // row-major, y * width + x
    Multiset globals;

    bool in_bounds(std::int64_t x, std::int64_t y) const noexcept;
    Multiset& at(std::int64_t x, std::int64_t y);
    const Multiset& at(std::int64_t x, std::int64_t y) const;
    /// Sum of every grid cell (globals excluded).
    Multiset totals() const;
    friend bool operator==(const Environment&, const Environment&) = default;
};

struct Agent {
    AgentId id = 0;
    std::string type;
    std::string state;
    xm::Memory memory;
    friend bool operator==(const Agent&, const Agent&) = default;
};

struct RegisteredType {
    AgentType type;
    xm::MachineDef behaviour;
};

struct System {
    std::map<std::string, RegisteredType> registry;  // S
    std::vector<ReconfigRule> global_rules;         // O
    Environment env;                                // E
    std::map<AgentId, Agent> agents;                // A
    std::set<Link> relation;                        // R
    /// Pending message per directed link (sender, receiver).
    std::map<std::pair<AgentId, AgentId>, xm::Value> pending;
    AgentId next_id = 1;
    std::uint64_t step_index = 0;

    std::vector<AgentId> peers(AgentId id) const;
};

/// Throws ValidationError.
System instantiate(const Spec& spec);

/// Percept symbols a type can receive: `<object>_<dir>` for each filtered
/// object and dir in here, N, E, S, W; plus `tick`.
std::set<Symbol> percept_alphabet(const AgentType& type);
/// P as a tagged union: (type name, percept symbol).
std::set<std::pair<std::string, Symbol>> system_percepts(const System& system);

class OutOfBounds : public Error {
   public:
    explicit OutOfBounds(const std::string& message) : Error("E-OUT-OF-BOUNDS", message) {}
};

class SelectorAmbiguous : public Error {
   public:
    explicit SelectorAmbiguous(const std::string& message) : Error("E-SELECTOR-AMBIGUOUS", message) {}
};

/// Agent's grid position from its `pos` memory field.
std::pair<std::int64_t, std::int64_t> position(const Agent& agent, const Environment& env);

/// Filtered objects at the agent's cell and its 4-neighbourhood, one symbol
/// per object copy, ordered by object name, then by direction here, N, E,
/// S, W; `tick` last. North is y - 1.
std::vector<Symbol> perceive(const Agent& agent, const AgentType& type, const Environment& env);

struct AgentActivity {
    AgentId agent = 0;
    std::optional<std::string> fired;
    std::string idle_reason;
    std::optional<AgentId> sent_to;
    std::optional<AgentId> received_from;
};

struct Mutation {
    AgentId agent = 0;
    std::string rule;
    Action::Kind action = Action::Kind::AddAgent;
    std::optional<AgentId> target;  // removed agent, link peer, or created agent
};

struct StepRecord {
    std::vector<AgentActivity> activity;
    std::vector<Mutation> mutations;  // effective ones only
    std::vector<std::string> warnings;
    std::size_t added = 0;
    std::size_t removed = 0;

    bool quiescent() const;
};

struct StepResult {
    System system;
    StepRecord record;
};

/// Behaviour phase then mutation phase; deterministic given `rng`'s state.
///
/// Behaviour: agents act in ascending id order, each firing at most one
/// function. Inputs are tried in order: the oldest pending message (lowest
/// sender id) for peer-input functions, then the percept sequence for
/// stream-input functions; the first input enabling any function decides,
/// two enabled functions on it is a NondeterminismError. Guards, percepts
/// and channel availability read the pre-step snapshot. Environment takes
/// are committed in id order; a take that can no longer be met idles the
/// agent ("contention").
///
/// Mutation: every agent's type rules and the applicable global rules are
/// evaluated on the post-behaviour snapshot. At most one structural action
/// (add/remove agent) fires per agent, drawn uniformly when several hold;
/// channel actions all fire. Removing a link that still carries a pending
/// message is deferred with a warning.
StepResult operas_step(const System& system, Rng& rng);

}  // namespace opsim::operas
