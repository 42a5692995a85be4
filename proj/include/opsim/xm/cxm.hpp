#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opsim/core/issue.hpp"
#include "opsim/core/rng.hpp"
#include "opsim/xm/machine.hpp"

namespace opsim::xm {

// Declarative form of a communicating system, as written in a model file.

struct MachineDecl {
    std::string id;
    std::string def;
    std::vector<Symbol> stream;
    std::vector<std::pair<std::string, Value>> overrides;  // initial memory
    friend bool operator==(const MachineDecl&, const MachineDecl&) = default;
};

struct ChannelDecl {
    std::string id;
    std::string from;
    std::string to;
    friend bool operator==(const ChannelDecl&, const ChannelDecl&) = default;
};

struct CxmSpec {
    std::vector<MachineDef> defs;
    std::vector<MachineDecl> machines;
    std::vector<ChannelDecl> channels;
    friend bool operator==(const CxmSpec&, const CxmSpec&) = default;
};

std::vector<Issue> validation_issues(const CxmSpec& spec);

// Runtime state.

struct MachineInstance {
    std::string id;
    std::shared_ptr<const MachineDef> def;
    std::string state;
    Memory memory;
    std::vector<Symbol> stream;
    std::size_t cursor = 0;       // next stream symbol
    std::vector<Value> outputs;   // stream-bound outputs so far
};

/// Single-slot directed channel.
struct Channel {
    std::string id;
    std::size_t sender = 0;
    std::size_t receiver = 0;
    std::optional<Value> buffer;
};

struct CxmSystem {
    std::vector<MachineInstance> machines;
    std::vector<Channel> channels;
    std::uint64_t round = 0;

    const Channel* find_channel(const std::string& id) const;
};

/// Throws ValidationError.
CxmSystem instantiate(const CxmSpec& spec);

struct Activity {
    std::string machine;
    std::optional<std::string> fired;
    std::string idle_reason;  // set when nothing fired
    std::optional<Value> output;
    std::optional<std::string> wrote;
    std::optional<std::string> read;
};

struct RoundResult {
    CxmSystem system;
    std::vector<Activity> activity;
    bool all_idle() const;
};

/// One synchronous round. Each machine fires at most one function, chosen
/// against the pre-round snapshot: channel reads need a message present at
/// round start, channel writes need the buffer empty at round start, so a
/// message written in round k is read in round k+1 at the earliest. `rng`
/// supplies each machine's `roll`, drawn in machine order.
RoundResult cxm_step(const CxmSystem& system, Rng& rng);

}  // namespace opsim::xm
