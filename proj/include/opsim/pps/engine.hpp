#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "opsim/core/error.hpp"
#include "opsim/core/multiset.hpp"
#include "opsim/core/rng.hpp"
#include "opsim/pps/model.hpp"

namespace opsim::pps {

using CellId = std::uint64_t;
/// Undirected bond, stored with first < second.
using Bond = std::pair<CellId, CellId>;

Bond make_bond(CellId a, CellId b);

struct Cell {
    CellId id = 0;
    CellType type;
    Multiset contents;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Configuration {
    std::map<CellId, Cell> cells;
    std::set<Bond> bonds;
    Multiset environment;
    std::uint64_t step_index = 0;
    /// Next fresh id; ids are never reused within a run.
    CellId next_id = 1;

    std::vector<CellId> neighbours(CellId id) const;
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

enum class StepMode { MaximalParallel, ArbitraryParallel };
enum class BondMode { Dynamic, Static };

/// Dynamic when the model has bond-making rules, static otherwise.
BondMode default_bond_mode(const Model& model);

struct EngineOptions {
    StepMode mode = StepMode::MaximalParallel;
    std::optional<BondMode> bonds;  // unset: default_bond_mode(model)
    bool death_releases_objects = false;
};

/// One grounded application of `rule` in `cell`. `source` is the neighbour a
/// CommIn instance pulls from.
struct RuleInstance {
    std::size_t rule = 0;
    CellId cell = 0;
    std::optional<CellId> source;
    friend auto operator<=>(const RuleInstance&, const RuleInstance&) = default;
};

/// Instances applied in one step; repeated instances appear repeatedly. Kept sorted.
struct StepSelection {
    std::vector<RuleInstance> instances;
    bool empty() const noexcept { return instances.empty(); }
    friend bool operator==(const StepSelection&, const StepSelection&) = default;
};

class UnknownCell : public Error {
   public:
    explicit UnknownCell(CellId id)
        : Error("E-UNKNOWN-CELL", "no live cell with id " + std::to_string(id)) {}
};

/// Step 0: cells get ids 1..n in declaration order, bonds are the initial graph.
Configuration initial_configuration(const Model& model);

/// Every instance applicable to `cell_id` in isolation.
std::vector<RuleInstance> applicable_instances(const Model& model, const Configuration& config,
                                               CellId cell_id);

/// Randomised greedy construction of a maximal selection: repeatedly draw an
/// instance uniformly among those still applicable to the residual objects
/// and charge its consumption, until none is left. Promoters (communication
/// triggers) are checked against the pre-step contents. A cell holding a
/// structural instance holds nothing else. Under ArbitraryParallel a uniform
/// non-empty subset of the maximal selection is kept.
StepSelection select_step(const Model& model, const Configuration& config, StepMode mode,
                          Rng& rng);

/// Atomic application of a selection followed by bond maintenance.
/// Throws InternalError when the selection does not fit `config`.
Configuration apply_step(const Model& model, const Configuration& config,
                         const StepSelection& selection, const EngineOptions& options = {});
/// Same, reusing the storage of `config`, which is unspecified after a throw.
Configuration apply_step(const Model& model, Configuration&& config, const StepSelection& selection,
                         const EngineOptions& options = {});

/// Dynamic mode: bonds rebuilt from the bond-making rules. Static mode: bonds
/// with a dead endpoint are dropped.
Configuration recompute_bonds(const Configuration& config, const Model& model, BondMode mode);

struct RunResult {
    std::vector<Configuration> snapshots;
    /// fired[k] took snapshots[k] to snapshots[k+1].
    std::vector<StepSelection> fired;
    std::optional<std::uint64_t> halted_at;
};

/// Deterministic in (model, steps, options, seed). Throws ValidationError.
RunResult run(const Model& model, std::uint64_t steps, const EngineOptions& options,
              std::uint64_t seed);

}  // namespace opsim::pps
