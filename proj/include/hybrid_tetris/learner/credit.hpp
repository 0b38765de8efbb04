#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hybrid_tetris/learner/features.hpp"
#include "hybrid_tetris/learner/reward_model.hpp"

namespace hybrid_tetris::learner {

enum class FeedbackSource { human, rule, oracle };

std::string_view source_name(FeedbackSource source);
FeedbackSource parse_source(std::string_view name);

// A timestamped evaluative signal bound to one game.
struct FeedbackEvent {
    std::string game_id;
    std::int64_t tick = 0;
    double polarity = 1.0;
    FeedbackSource source = FeedbackSource::human;
    std::string player_id;  // empty for rule-synthesized feedback
};

struct DecisionRecord {
    std::string game_id;
    int turn = 0;
    FeatureVector chosen_features;
    // Mean afterstate over the legal placements of the same decision.
    FeatureVector reference_features;
    std::int64_t tick = 0;
};

// Decisions whose delay (feedback tick - decision tick) lies in
// [min_delay_ticks, max_delay_ticks] are eligible.
struct CreditWindow {
    std::int64_t min_delay_ticks = 10;
    std::int64_t max_delay_ticks = 200;

    bool contains(std::int64_t delay) const noexcept {
        return delay >= min_delay_ticks && delay <= max_delay_ticks;
    }
    bool operator==(const CreditWindow&) const = default;
};

// Default window: the last 0.2 to 4.0 seconds of decisions.
CreditWindow default_credit_window(int tick_hz);

// Uniform credit: one sample per eligible decision of feedback.game_id with
// weight 1/k and label = polarity.
// Throws Error(no_eligible_decisions) when the window is empty.
std::vector<CreditedSample> credit_assign(std::span<const DecisionRecord> history,
                                          const FeedbackEvent& feedback, CreditWindow window);

}  // namespace hybrid_tetris::learner
