#include "opsim/core/rng.hpp"

#include "opsim/core/error.hpp"

namespace opsim {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw InternalError("Rng::below called with empty range");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = next();
        if (r >= threshold) return r % n;
    }
}

}  // namespace opsim
