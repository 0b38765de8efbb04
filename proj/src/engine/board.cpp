#include "hybrid_tetris/engine/board.hpp"

#include <algorithm>
#include <string>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::engine {

Board::Board(int width, int height)
    : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::invalid_config,
                    "board dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), kEmpty);
}

bool Board::row_full(int r) const {
    const auto cells = row(r);
    return std::none_of(cells.begin(), cells.end(), [](Cell c) { return c == kEmpty; });
}

int Board::filled_count() const {
    return static_cast<int>(
        std::count_if(cells_.begin(), cells_.end(), [](Cell c) { return c != kEmpty; }));
}

bool shape_fits(const Board& board, const Shape& shape, int row, int col) {
    for (const auto& o : shape) {
        const int r = row + o.row;
        const int c = col + o.col;
        if (!board.inside(r, c) || board.filled(r, c)) {
            return false;
        }
    }
    return true;
}

std::optional<int> drop_row(const Board& board, const Shape& shape, int col) {
    if (!shape_fits(board, shape, 0, col)) {
        return std::nullopt;
    }
    int row = 0;
    while (shape_fits(board, shape, row + 1, col)) {
        ++row;
    }
    return row;
}

}  // namespace hybrid_tetris::engine
