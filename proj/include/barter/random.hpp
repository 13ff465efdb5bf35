#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace barter {

/// Every seeded component draws from this engine. mt19937_64 output is fixed
/// by the standard, and the helpers below avoid std::*_distribution so that
/// datasets and tie-breaks are identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi] by rejection sampling.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    if (hi < lo) {
        throw std::invalid_argument("uniform_int: empty range");
    }
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(rng());
    }
    const std::uint64_t limit = Rng::max() - (Rng::max() % span + 1) % span;
    std::uint64_t draw = rng();
    while (draw > limit) {
        draw = rng();
    }
    return lo + static_cast<std::int64_t>(draw % span);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
}

/// True with probability percent/100.
inline bool chance_percent(Rng& rng, int percent) { return uniform_int(rng, 0, 99) < percent; }

}  // namespace barter
