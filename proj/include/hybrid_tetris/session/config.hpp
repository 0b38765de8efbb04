#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hybrid_tetris/engine/game.hpp"
#include "hybrid_tetris/learner/credit.hpp"
#include "hybrid_tetris/learner/reward_model.hpp"
#include "hybrid_tetris/rules/rules.hpp"
#include "hybrid_tetris/team/topology.hpp"

namespace hybrid_tetris::session {

inline constexpr int kMaxBoardsPerPlayer = 10;

// period(level) = max(min_ticks, floor(initial_ticks * decay^level))
struct DecisionPeriodCurve {
    int initial_ticks = 50;
    int min_ticks = 10;
    double decay_factor_per_level = 0.8;

    int period(int level) const;
    bool operator==(const DecisionPeriodCurve&) const = default;
};

struct LearnerConfig {
    learner::Architecture architecture = learner::Architecture::linear;
    std::size_t hidden_width = 32;
    learner::Hyperparams hyperparams;

    bool operator==(const LearnerConfig&) const = default;
};

struct ModeFlags {
    bool superhuman = false;
    bool integrated = false;

    bool operator==(const ModeFlags&) const = default;
};

struct SessionConfig {
    std::string session_id = "session";
    int boards_per_player = 2;
    int board_width = engine::kDefaultWidth;
    int board_height = engine::kDefaultHeight;
    team::TeamTopology topology = team::figure1_topology();
    LearnerConfig learner;
    // Extra piece definitions on top of the built-in catalog.
    std::vector<engine::PieceDef> pieces;
    std::vector<std::string> initial_pieces{"I", "O", "T", "S", "Z", "J", "L"};
    engine::ScoringTable scoring;
    std::vector<rules::HiddenRule> rules;
    rules::RegimeSchedule regime;
    std::uint64_t master_seed = 1;
    int tick_hz = 50;
    DecisionPeriodCurve decision_period;
    learner::CreditWindow feedback_window = learner::default_credit_window(50);
    std::optional<std::int64_t> freeze_budget_ticks;
    ModeFlags mode;
    // A finished game starts a fresh one (next seed generation) instead of
    // staying over; used by long headless runs.
    bool restart_on_game_over = false;
    // 0 means unlimited.
    int max_placements_per_game = 0;

    // Built-in catalog plus `pieces`, later ids replacing earlier ones.
    std::vector<engine::PieceDef> catalog() const;
    engine::GameSetup game_setup() const;

    bool operator==(const SessionConfig&) const = default;
};

// Throws Error(invalid_config) listing every violation.
void validate_config(const SessionConfig& config);

void to_json(nlohmann::json& j, const SessionConfig& config);
// Missing keys take defaults; feedbackWindow defaults to 0.2-4.0 s at the
// configured tick rate. Validates the result.
// Throws Error(invalid_config).
void from_json(const nlohmann::json& j, SessionConfig& config);

// Throws Error(io_failure) or Error(invalid_config).
SessionConfig load_config(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace hybrid_tetris::session
