#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hybrid_tetris/engine/game.hpp"
#include "hybrid_tetris/learner/features.hpp"
#include "hybrid_tetris/learner/reward_model.hpp"

namespace hybrid_tetris::learner {

// Board that results from a placement, after line clears.
struct Afterstate {
    engine::Placement placement;
    engine::Board board;
    int lines_cleared = 0;
    FeatureVector features;
};

// In enumerate_placements order.
std::vector<Afterstate> enumerate_afterstates(const engine::Board& board, const engine::PieceDef& piece);

// Component-wise mean; empty input gives an empty vector.
FeatureVector mean_features(std::span<const Afterstate> afterstates);

// Index of the first maximum; ties therefore go to the lowest column, then
// the lowest rotation. Requires a non-empty span.
std::size_t first_argmax(std::span<const double> values);

struct Decision {
    engine::Placement placement;
    FeatureVector chosen_features;
    FeatureVector reference_features;
};

// Greedy afterstate choice under the model.
// Throws Error(game_not_active) or Error(no_legal_placement).
Decision decide(const RewardModel& model, const engine::GameState& state);

engine::Placement select_action(const RewardModel& model, const engine::GameState& state);

// Greedy choice under a fixed linear board evaluator (no bias).
engine::Placement select_by_weights(std::span<const double> weights, const engine::Board& board,
                                    const engine::PieceDef& piece);

}  // namespace hybrid_tetris::learner
