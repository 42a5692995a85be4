#pragma once

#include <optional>
#include <string>

#include "opsim/core/rng.hpp"
#include "opsim/operas/system.hpp"
#include "opsim/pps/engine.hpp"

namespace opsim::testing {

/// At most 3 cells, 4 rules and 6 objects (cells plus environment).
pps::Model random_small_pps(Rng& rng);

/// Communication rules only (in, enter, exit), so the object total is invariant.
pps::Model random_communication_pps(Rng& rng);

/// Total objects in cells and environment.
Multiset all_objects(const pps::Configuration& config);

/// Checks `selection` against `config` by enumerating every selection that
/// fits the pre-step objects and the one-structural-rule-per-cell limit.
/// Returns a description of the first violation, if any.
std::optional<std::string> brute_force_check(const pps::Model& model, const pps::Configuration& config,
                                             const pps::StepSelection& selection);

/// Model source for an OPERAS system whose agents bud, die, link and unlink often.
std::string random_mutation_operas(Rng& rng);

/// Structural invariants between two consecutive OPERAS states.
std::optional<std::string> operas_integrity(const operas::System& before, const operas::System& after,
                                            const operas::StepRecord& record);

}  // namespace opsim::testing
