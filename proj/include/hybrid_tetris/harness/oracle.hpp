#pragma once

#include <cstdint>
#include <vector>

#include "hybrid_tetris/engine/game.hpp"
#include "hybrid_tetris/random.hpp"

namespace hybrid_tetris::harness {

// Synthetic stand-in for a human trainer.
struct OracleTrainer {
    std::vector<double> weights;  // over the feature vector; default_oracle_weights() if empty
    int top_m = 1;
    double press_probability = 1.0;
    std::int64_t reaction_ticks = 20;  // delay between the decision and the ENTER press
};

// 1 + the number of legal placements whose afterstate the oracle strictly
// prefers to `chosen` (ties share a rank). Throws Error(illegal_placement)
// when `chosen` is not among the legal placements.
int oracle_rank(const std::vector<double>& weights, const engine::Board& board, const engine::PieceDef& piece,
                const engine::Placement& chosen);

// Press iff chosen ranks within the top M, then a Bernoulli(pressProbability)
// gate. rng is only drawn from when pressProbability < 1.
bool oracle_decide(const OracleTrainer& oracle, const engine::GameState& state, const engine::Placement& chosen,
                   Rng& rng);

// weights, or the default oracle for the board geometry when empty.
std::vector<double> oracle_weights(const OracleTrainer& oracle, int width, int height);

}  // namespace hybrid_tetris::harness
