#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "hybrid_tetris/engine/color.hpp"

namespace hybrid_tetris::engine {

struct Offset {
    int row = 0;
    int col = 0;

    auto operator<=>(const Offset&) const = default;
};

// Cell offsets of one orientation, normalized so the minimum row and column
// are both 0 and sorted row-major.
using Shape = std::vector<Offset>;

enum class Provenance { standard, novel };

struct PieceDef {
    std::string id;
    std::string display_name;
    Color color = Color::yellow;
    std::vector<Shape> rotations;
    Provenance provenance = Provenance::standard;

    int cell_count() const { return static_cast<int>(rotations.front().size()); }
    int rotation_count() const { return static_cast<int>(rotations.size()); }

    bool operator==(const PieceDef&) const = default;
};

Shape normalize_shape(Shape shape);

// Clockwise quarter turn, normalized.
Shape rotate_clockwise(const Shape& shape);

int shape_width(const Shape& shape);
int shape_height(const Shape& shape);

// Builds a validated piece: every rotation is normalized and rotations that
// coincide after normalization are dropped (first occurrence wins).
// Throws Error(invalid_piece) when an invariant cannot be met.
PieceDef make_piece(std::string id, std::string display_name, Color color,
                    std::vector<Shape> rotations, Provenance provenance);

// Same as make_piece but generates the rotations from a single base shape.
PieceDef make_rotating_piece(std::string id, std::string display_name, Color color,
                             const Shape& base, Provenance provenance);

// Guideline I, O, T, S, Z, J, L with guideline colors.
const std::vector<PieceDef>& standard_pieces();

// The shipped novel pieces: "P5" (P pentomino) and "L3" (tromino L).
const std::vector<PieceDef>& novel_pieces();

// standard_pieces() followed by novel_pieces().
std::vector<PieceDef> default_catalog();

// nullptr when absent.
const PieceDef* find_piece(const std::vector<PieceDef>& pieces, std::string_view id);

std::vector<std::string> piece_ids(const std::vector<PieceDef>& pieces);

}  // namespace hybrid_tetris::engine
