#pragma once

#include <cstdint>
#include <random>

namespace hybrid_tetris {

// Seeded generator with portable bounded draws. Standard distributions are
// implementation-defined, so all draws go through below()/unit() to keep
// logs identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t next() {
        ++draws_;
        return engine_();
    }

    // Uniform in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Uniform in [0, 1) with 53 bits of resolution.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return draws_; }

    // (seed, draws) identifies the engine state exactly.
    std::uint64_t digest() const noexcept;

    bool operator==(const Rng& other) const noexcept {
        return seed_ == other.seed_ && draws_ == other.draws_;
    }

private:
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace hybrid_tetris
