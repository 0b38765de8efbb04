#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hybrid_tetris::engine {

// A board cell holds 0 when empty, otherwise the color code of the piece
// that locked there.
using Cell = std::uint8_t;
inline constexpr Cell kEmpty = 0;

enum class Color : std::uint8_t {
    yellow = 1,
    cyan,
    purple,
    green,
    red,
    blue,
    orange,
    // custom(n) is encoded as custom_base + n
    custom_base,
};

inline constexpr int kMaxCustomColors = 255 - static_cast<int>(Color::custom_base);

constexpr Color custom_color(int n) {
    return static_cast<Color>(static_cast<int>(Color::custom_base) + n);
}

constexpr bool is_custom(Color c) {
    return static_cast<int>(c) >= static_cast<int>(Color::custom_base);
}

constexpr Cell to_cell(Color c) { return static_cast<Cell>(c); }

// "yellow", ..., "custom(3)"
std::string color_name(Color c);

// Inverse of color_name; also accepts "custom" as custom(0).
// Throws Error(invalid_piece) on unknown names.
Color parse_color(std::string_view name);

}  // namespace hybrid_tetris::engine
