#include "hybrid_tetris/random.hpp"

#include "hybrid_tetris/hash.hpp"

namespace hybrid_tetris {

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling over the largest multiple of n.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) {
        x = next();
    }
    return x % n;
}

std::uint64_t Rng::digest() const noexcept {
    Fnv1a h;
    h.u64(seed_);
    h.u64(draws_);
    return h.value();
}

}  // namespace hybrid_tetris
