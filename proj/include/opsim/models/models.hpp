#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "opsim/core/error.hpp"
#include "opsim/operas/system.hpp"
#include "opsim/pps/engine.hpp"
#include "opsim/pps/model.hpp"
#include "opsim/xm/cxm.hpp"

namespace opsim::models {

class ParameterError : public Error {
   public:
    explicit ParameterError(const std::string& message) : Error("E-PARAMETER", message) {}
};

// Tumour growth as a population P system.
//
// Types stem, transitory and metatransitory. A stem cell holds `s` (or `ms`
// once it carries the metastasis marker) and divides every step, either
// asymmetrically (a stem plus an age-0 offspring) or symmetrically (two
// stems, the right one marked). Offspring age through level objects a0..aD
// (transitory) or m0..mD (metatransitory): while younger than the maturity
// age they divide into two older cells, afterwards they only age, and they
// die on reaching their death age.

struct TumourParams {
    std::int64_t grid_width = 10;
    std::int64_t grid_height = 10;
    int maturity_age = 3;               // T_mat
    int transitory_death_age = 6;       // D_t
    int metatransitory_death_age = 4;   // D_m, below D_t
};

inline constexpr const char* kStem = "stem";
inline constexpr const char* kTransitory = "transitory";
inline constexpr const char* kMetatransitory = "metatransitory";

/// Throws ParameterError.
pps::Model build_tumour(const TumourParams& params = {});

/// Age of a tumour cell: the index of its level object; 0 for stem cells,
/// nullopt when the cell carries no level object.
std::optional<int> tumour_age(const pps::Cell& cell);

// Ant colony as an OPERAS system: X-machine ants on a grid with food and
// pheromone objects, linking to a nearby ant when hungry so fed ants can
// pass their surplus over the link.

struct AntParams {
    std::int64_t grid_width = 10;
    std::int64_t grid_height = 10;
    int ants = 6;
    std::int64_t threshold = 5;
    std::int64_t max_initial_food = 10;  // initial reserve uniform in [0, max]
    int food_piles = 3;
    std::int64_t pile_size = 5;
    std::int64_t forage_gain = 3;  // food brought back from outside the nest
    bool foraging = true;          // allow leaving the nest at the boundary
    std::uint64_t seed = 0;        // placement and initial reserves
};

/// Throws ParameterError.
operas::Spec build_ants(const AntParams& params = {});

/// The ant behaviour machine alone.
xm::MachineDef ant_behaviour(const AntParams& params = {});

// Two ants exchanging food over one channel: the donor sends everything
// above its threshold, the receiver adds what arrives.

struct FoodExchangeParams {
    std::int64_t donor_food = 10;
    std::int64_t receiver_food = 2;
    std::int64_t threshold = 5;
};

/// Throws ParameterError.
xm::CxmSpec build_food_exchange(const FoodExchangeParams& params = {});

}  // namespace opsim::models
