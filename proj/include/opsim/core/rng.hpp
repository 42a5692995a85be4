#pragma once

#include <cstdint>
#include <random>

namespace opsim {

/// Seedable generator shared by every engine.
///
/// The raw stream is `std::mt19937_64` seeded with the 64-bit run seed; its
/// output sequence is fixed by the C++ standard. Bounded draws do not go
/// through `std::uniform_int_distribution` (whose algorithm is
/// implementation-defined) but use rejection sampling: a raw word `r` is
/// rejected while `r < 2^64 mod n`, then `r mod n` is returned. Any
/// implementation reproducing these two rules reproduces our traces.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). `n` must be positive.
    std::uint64_t below(std::uint64_t n);

    bool coin() { return (next() >> 63) != 0; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace opsim
