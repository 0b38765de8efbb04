#pragma once

#include <span>
#include <vector>

#include "hybrid_tetris/engine/board.hpp"
#include "hybrid_tetris/learner/features.hpp"

namespace hybrid_tetris::learner {

// Penalties per raw unit: per cell of column height, per cell of adjacent
// height difference, per cell of max height, per hole.
struct HeuristicPenalties {
    double height = -0.5;
    double height_diff = -0.2;
    double max_height = -0.5;
    double holes = -4.0;
};

// Converts raw-unit penalties into weights over the normalized feature
// vector, so that dot(weights, features) equals the raw-unit score.
std::vector<double> heuristic_weights(const HeuristicPenalties& penalties, int width, int height);

// The shipped synthetic-trainer heuristic for a board geometry.
std::vector<double> default_oracle_weights(int width = engine::kDefaultWidth,
                                           int height = engine::kDefaultHeight);

double dot(std::span<const double> weights, std::span<const double> features);

// Heuristic value of a board: dot(weights, extract_features(board)).
double evaluate_board(std::span<const double> weights, const engine::Board& board);

}  // namespace hybrid_tetris::learner
