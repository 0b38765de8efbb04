#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hybrid_tetris/engine/color.hpp"
#include "hybrid_tetris/engine/piece.hpp"

namespace hybrid_tetris::engine {

inline constexpr int kDefaultWidth = 10;
inline constexpr int kDefaultHeight = 20;

// Row 0 is the top of the well; row height-1 is the floor.
class Board {
public:
    explicit Board(int width = kDefaultWidth, int height = kDefaultHeight);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool inside(int row, int col) const noexcept {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    Cell at(int row, int col) const { return cells_[index(row, col)]; }
    bool filled(int row, int col) const { return at(row, col) != kEmpty; }
    void set(int row, int col, Cell value) { cells_[index(row, col)] = value; }

    std::span<const Cell> row(int r) const {
        return std::span<const Cell>(cells_).subspan(static_cast<std::size_t>(r * width_),
                                                     static_cast<std::size_t>(width_));
    }
    std::span<const Cell> cells() const noexcept { return cells_; }

    bool row_full(int r) const;
    int filled_count() const;

    bool operator==(const Board&) const = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row * width_ + col);
    }

    int width_;
    int height_;
    std::vector<Cell> cells_;
};

// True when every cell of `shape` anchored at (row, col) is inside and empty.
bool shape_fits(const Board& board, const Shape& shape, int row, int col);

// Hard drop: the shape enters with its top row at row 0 and falls until it
// rests. Returns the resting anchor row, or nullopt when the column is blocked
// at entry or the shape does not fit horizontally.
std::optional<int> drop_row(const Board& board, const Shape& shape, int col);

}  // namespace hybrid_tetris::engine
