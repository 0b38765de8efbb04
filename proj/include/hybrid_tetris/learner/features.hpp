#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hybrid_tetris/engine/board.hpp"

namespace hybrid_tetris::learner {

// Afterstate features, all in [0, 1]:
//   [0, W)        column heights / H
//   [W, 2W-1)     |h[c] - h[c+1]| / H
//   2W-1          max height / H
//   2W            holes / (W * H)
// A hole is an empty cell with a filled cell somewhere above it in the same
// column.
using FeatureVector = std::vector<double>;

struct FeatureLayout {
    int width = engine::kDefaultWidth;

    std::size_t size() const { return static_cast<std::size_t>(2 * width + 1); }
    std::size_t height_index(int col) const { return static_cast<std::size_t>(col); }
    std::size_t diff_index(int col) const { return static_cast<std::size_t>(width + col); }
    std::size_t max_height_index() const { return static_cast<std::size_t>(2 * width - 1); }
    std::size_t holes_index() const { return static_cast<std::size_t>(2 * width); }
};

inline std::size_t feature_count(int board_width) { return FeatureLayout{board_width}.size(); }

FeatureVector extract_features(const engine::Board& board);

// Unnormalized column heights and hole count, shared by the feature
// extractor and diagnostics.
std::vector<int> column_heights(const engine::Board& board);
int count_holes(const engine::Board& board);

}  // namespace hybrid_tetris::learner
