#include "hybrid_tetris/learner/heuristic.hpp"

#include <string>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::learner {

std::vector<double> heuristic_weights(const HeuristicPenalties& penalties, int width, int height) {
    const FeatureLayout layout{width};
    std::vector<double> w(layout.size(), 0.0);
    for (int c = 0; c < width; ++c) {
        w[layout.height_index(c)] = penalties.height * height;
    }
    for (int c = 0; c + 1 < width; ++c) {
        w[layout.diff_index(c)] = penalties.height_diff * height;
    }
    w[layout.max_height_index()] = penalties.max_height * height;
    w[layout.holes_index()] = penalties.holes * width * height;
    return w;
}

std::vector<double> default_oracle_weights(int width, int height) {
    return heuristic_weights(HeuristicPenalties{}, width, height);
}

double dot(std::span<const double> weights, std::span<const double> features) {
    if (weights.size() != features.size()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "weight/feature size mismatch: " + std::to_string(weights.size()) + " vs " +
                        std::to_string(features.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        sum += weights[i] * features[i];
    }
    return sum;
}

double evaluate_board(std::span<const double> weights, const engine::Board& board) {
    return dot(weights, extract_features(board));
}

}  // namespace hybrid_tetris::learner
