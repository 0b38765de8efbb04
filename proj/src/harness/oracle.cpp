#include "hybrid_tetris/harness/oracle.hpp"

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/learner/heuristic.hpp"

namespace hybrid_tetris::harness {

std::vector<double> oracle_weights(const OracleTrainer& oracle, int width, int height) {
    return oracle.weights.empty() ? learner::default_oracle_weights(width, height) : oracle.weights;
}

int oracle_rank(const std::vector<double>& weights, const engine::Board& board, const engine::PieceDef& piece,
                const engine::Placement& chosen) {
    const auto placements = engine::enumerate_placements(board, piece);
    std::vector<double> values;
    values.reserve(placements.size());
    std::optional<double> mine;
    for (const auto& p : placements) {
        const double v = learner::evaluate_board(weights, engine::lock_and_clear(board, piece, p).board);
        values.push_back(v);
        if (p == chosen) {
            mine = v;
        }
    }
    if (!mine) {
        throw Error(ErrorCode::illegal_placement, "chosen placement is not legal");
    }
    int rank = 1;
    for (const double v : values) {
        rank += v > *mine;
    }
    return rank;
}

bool oracle_decide(const OracleTrainer& oracle, const engine::GameState& state, const engine::Placement& chosen,
                   Rng& rng) {
    const auto w = oracle_weights(oracle, state.board.width(), state.board.height());
    if (oracle_rank(w, state.board, state.current_piece, chosen) > oracle.top_m) {
        return false;
    }
    return oracle.press_probability >= 1.0 || rng.unit() < oracle.press_probability;
}

}  // namespace hybrid_tetris::harness
