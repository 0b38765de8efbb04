#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hybrid_tetris/engine/game.hpp"
#include "hybrid_tetris/learner/credit.hpp"

namespace hybrid_tetris::rules {

// Fires when some cleared row holds more than min_count_exclusive cells of
// `color`.
struct Trigger {
    engine::Cell color = static_cast<engine::Cell>(engine::Color::yellow);
    int min_count_exclusive = 3;

    bool operator==(const Trigger&) const = default;
};

enum class EffectKind { next_piece_bias, synthetic_reward, score_bonus };
enum class BonusTiming { immediate, end_of_game };
enum class BiasSelection { favorable, fixed };

struct RuleEffect {
    EffectKind kind = EffectKind::score_bonus;
    // next_piece_bias
    BiasSelection selection = BiasSelection::favorable;
    std::string piece_id;  // for BiasSelection::fixed
    // synthetic_reward
    double polarity = 1.0;
    // score_bonus; timing applies only when nobody is disclosed
    double multiplier = 10.0;
    BonusTiming timing = BonusTiming::end_of_game;

    bool operator==(const RuleEffect&) const = default;
};

struct HiddenRule {
    std::string rule_id;
    Trigger trigger;
    std::vector<RuleEffect> effects;
    std::set<std::string> disclosed_to_players;
    std::set<std::string> disclosed_to_agents;
    // Shown to disclosed players when the rule fires.
    std::string notice_text;

    bool operator==(const HiddenRule&) const = default;
};

// Throws Error(invalid_config).
void validate_rule(const HiddenRule& rule);

struct FiredRule {
    std::string rule_id;
    std::size_t rule_index = 0;
};

bool triggers(const Trigger& trigger, const engine::ClearResult& clear);

// Fired rules in config order, at most once each per placement.
std::vector<FiredRule> evaluate_rules(std::span<const HiddenRule> rules, const engine::ClearResult& clear);

struct Notice {
    std::string rule_id;
    std::string player_id;
    std::string game_id;
    std::string text;
    std::int64_t bonus = 0;  // immediate bonus shown with the notice

    bool operator==(const Notice&) const = default;
};

using BoardEvaluator = std::function<double(const engine::Board&)>;

struct GameContext {
    std::string game_id;
    std::string agent_id;
    std::optional<std::string> guiding_player;
    std::int64_t tick = 0;
    BoardEvaluator evaluator;  // empty means the default oracle heuristic
};

struct BonusAward {
    std::string rule_id;
    std::int64_t amount = 0;
    BonusTiming timing = BonusTiming::immediate;
};

struct EffectsOutcome {
    engine::GameState state;
    std::vector<Notice> notices;
    std::vector<learner::FeedbackEvent> feedback;
    std::vector<BonusAward> bonuses;
};

// Applies the effects of rules fired by `clear`. A Notice goes to every
// disclosed player of each fired rule. Score bonuses are
// multiplier * clear.points_awarded, paid immediately when the guiding player
// is disclosed, accrued to the end-of-game ledger when only the agent is, and
// otherwise follow the effect's own timing.
// Throws Error(unknown_piece_for_bias).
EffectsOutcome apply_effects(engine::GameState state, std::span<const HiddenRule> rules,
                             std::span<const FiredRule> fired, const engine::ClearResult& clear,
                             const GameContext& context);

// Score including the end-of-game ledger.
std::int64_t final_score(const engine::GameState& state);

// The piece whose best placement scores highest under `evaluator`; ties go to
// the lexicographically smallest id. Pieces with no legal placement rank
// last. Throws Error(empty_piece_set).
engine::PieceDef favorable_piece(const engine::Board& board, std::span<const engine::PieceDef> pieces,
                                 const BoardEvaluator& evaluator = {});

struct RegimeEvent {
    std::int64_t at_tick = 0;
    std::vector<std::string> add_pieces;
    std::vector<std::string> remove_pieces;
    std::optional<engine::ScoringTable> new_scoring;

    bool operator==(const RegimeEvent&) const = default;
};

struct RegimeSchedule {
    std::vector<RegimeEvent> events;

    bool operator==(const RegimeSchedule&) const = default;
};

// Throws Error(invalid_config) unless at_tick is strictly increasing.
void validate_schedule(const RegimeSchedule& schedule);

// Applies every pending event with at_tick <= tick. Added pieces are looked
// up in `catalog`. The bag is rebuilt when the piece set changes.
// Throws Error(removal_would_empty_piece_set) and Error(invalid_piece).
engine::GameState advance_regime(const RegimeSchedule& schedule, std::int64_t tick, engine::GameState state,
                                 const std::vector<engine::PieceDef>& catalog);

std::string_view effect_name(EffectKind kind);

void to_json(nlohmann::json& j, const HiddenRule& rule);
void from_json(const nlohmann::json& j, HiddenRule& rule);
void to_json(nlohmann::json& j, const RegimeSchedule& schedule);
void from_json(const nlohmann::json& j, RegimeSchedule& schedule);

}  // namespace hybrid_tetris::rules
