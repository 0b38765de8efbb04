#include "hybrid_tetris/learner/features.hpp"

#include <algorithm>
#include <cstdlib>

namespace hybrid_tetris::learner {

std::vector<int> column_heights(const engine::Board& board) {
    std::vector<int> heights(static_cast<std::size_t>(board.width()), 0);
    for (int c = 0; c < board.width(); ++c) {
        for (int r = 0; r < board.height(); ++r) {
            if (board.filled(r, c)) {
                heights[static_cast<std::size_t>(c)] = board.height() - r;
                break;
            }
        }
    }
    return heights;
}

int count_holes(const engine::Board& board) {
    int holes = 0;
    for (int c = 0; c < board.width(); ++c) {
        bool covered = false;
        for (int r = 0; r < board.height(); ++r) {
            if (board.filled(r, c)) {
                covered = true;
            } else if (covered) {
                ++holes;
            }
        }
    }
    return holes;
}

FeatureVector extract_features(const engine::Board& board) {
    const FeatureLayout layout{board.width()};
    const double h = board.height();
    FeatureVector f(layout.size(), 0.0);
    const auto heights = column_heights(board);
    for (int c = 0; c < board.width(); ++c) {
        f[layout.height_index(c)] = heights[static_cast<std::size_t>(c)] / h;
    }
    for (int c = 0; c + 1 < board.width(); ++c) {
        f[layout.diff_index(c)] =
            std::abs(heights[static_cast<std::size_t>(c)] - heights[static_cast<std::size_t>(c + 1)]) / h;
    }
    f[layout.max_height_index()] = *std::max_element(heights.begin(), heights.end()) / h;
    f[layout.holes_index()] = count_holes(board) / (static_cast<double>(board.width()) * h);
    return f;
}

}  // namespace hybrid_tetris::learner
