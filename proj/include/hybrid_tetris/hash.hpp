#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

namespace hybrid_tetris {

// Incremental 64-bit FNV-1a. Multi-byte integers are fed little-endian so
// digests are stable across hosts.
class Fnv1a {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t kPrime = 0x00000100000001b3ULL;

    void bytes(std::span<const std::uint8_t> data) noexcept {
        for (const auto b : data) {
            byte(b);
        }
    }

    void byte(std::uint8_t b) noexcept {
        hash_ ^= b;
        hash_ *= kPrime;
    }

    void u64(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            byte(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    void i64(std::int64_t v) noexcept { u64(static_cast<std::uint64_t>(v)); }

    void f64(double v) noexcept {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }

    // Length-prefixed so ("ab","c") and ("a","bc") differ.
    void str(std::string_view s) noexcept {
        u64(s.size());
        for (const char ch : s) {
            byte(static_cast<std::uint8_t>(ch));
        }
    }

    std::uint64_t value() const noexcept { return hash_; }

private:
    std::uint64_t hash_ = kOffset;
};

// 16 lowercase hex digits.
std::string to_hex(std::uint64_t value);

// Throws std::invalid_argument on malformed input.
std::uint64_t from_hex(std::string_view text);

}  // namespace hybrid_tetris
