#include "hybrid_tetris/learner/credit.hpp"

#include <cmath>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::learner {

std::string_view source_name(FeedbackSource source) {
    switch (source) {
        case FeedbackSource::human: return "human";
        case FeedbackSource::rule: return "rule";
        case FeedbackSource::oracle: return "oracle";
    }
    return "human";
}

FeedbackSource parse_source(std::string_view name) {
    if (name == "rule") {
        return FeedbackSource::rule;
    }
    if (name == "oracle") {
        return FeedbackSource::oracle;
    }
    return FeedbackSource::human;
}

CreditWindow default_credit_window(int tick_hz) {
    return {static_cast<std::int64_t>(std::lround(0.2 * tick_hz)),
            static_cast<std::int64_t>(std::lround(4.0 * tick_hz))};
}

std::vector<CreditedSample> credit_assign(std::span<const DecisionRecord> history,
                                          const FeedbackEvent& feedback, CreditWindow window) {
    std::vector<const DecisionRecord*> eligible;
    for (const auto& d : history) {
        if (d.game_id == feedback.game_id && window.contains(feedback.tick - d.tick)) {
            eligible.push_back(&d);
        }
    }
    if (eligible.empty()) {
        throw Error(ErrorCode::no_eligible_decisions,
                    "no decision of game '" + feedback.game_id + "' within the credit window at tick " +
                        std::to_string(feedback.tick));
    }
    const double weight = 1.0 / static_cast<double>(eligible.size());
    std::vector<CreditedSample> samples;
    samples.reserve(eligible.size());
    for (const auto* d : eligible) {
        samples.push_back({d->chosen_features, d->reference_features, feedback.polarity, weight, d->turn});
    }
    return samples;
}

}  // namespace hybrid_tetris::learner
