#include "hybrid_tetris/learner/policy.hpp"

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/learner/heuristic.hpp"

namespace hybrid_tetris::learner {

std::vector<Afterstate> enumerate_afterstates(const engine::Board& board, const engine::PieceDef& piece) {
    std::vector<Afterstate> out;
    for (auto& placement : engine::enumerate_placements(board, piece)) {
        auto locked = engine::lock_and_clear(board, piece, placement);
        auto features = extract_features(locked.board);
        out.push_back({std::move(placement), std::move(locked.board),
                       static_cast<int>(locked.cleared_rows.size()), std::move(features)});
    }
    return out;
}

FeatureVector mean_features(std::span<const Afterstate> afterstates) {
    if (afterstates.empty()) {
        return {};
    }
    FeatureVector mean(afterstates.front().features.size(), 0.0);
    for (const auto& a : afterstates) {
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean[i] += a.features[i];
        }
    }
    for (auto& v : mean) {
        v /= static_cast<double>(afterstates.size());
    }
    return mean;
}

std::size_t first_argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

Decision decide(const RewardModel& model, const engine::GameState& state) {
    if (state.status != engine::GameStatus::active) {
        throw Error(ErrorCode::game_not_active, "cannot select an action for an inactive game");
    }
    auto afterstates = enumerate_afterstates(state.board, state.current_piece);
    if (afterstates.empty()) {
        throw Error(ErrorCode::no_legal_placement, "no legal placement for " + state.current_piece.id);
    }
    std::vector<double> values;
    values.reserve(afterstates.size());
    for (const auto& a : afterstates) {
        values.push_back(predict(model, a.features));
    }
    const std::size_t best = first_argmax(values);
    FeatureVector reference = mean_features(afterstates);
    return {std::move(afterstates[best].placement), std::move(afterstates[best].features),
            std::move(reference)};
}

engine::Placement select_action(const RewardModel& model, const engine::GameState& state) {
    return decide(model, state).placement;
}

engine::Placement select_by_weights(std::span<const double> weights, const engine::Board& board,
                                    const engine::PieceDef& piece) {
    auto afterstates = enumerate_afterstates(board, piece);
    if (afterstates.empty()) {
        throw Error(ErrorCode::no_legal_placement, "no legal placement for " + piece.id);
    }
    std::vector<double> values;
    values.reserve(afterstates.size());
    for (const auto& a : afterstates) {
        values.push_back(dot(weights, a.features));
    }
    return afterstates[first_argmax(values)].placement;
}

}  // namespace hybrid_tetris::learner
