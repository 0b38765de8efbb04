#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hybrid_tetris/engine/game.hpp"
#include "hybrid_tetris/learner/reward_model.hpp"
#include "hybrid_tetris/session/config.hpp"
#include "hybrid_tetris/session/events.hpp"
#include "hybrid_tetris/team/topology.hpp"

namespace hybrid_tetris::session {

struct PlayerConsole {
    std::string player_id;
    int selected_board = 0;
    std::optional<int> frozen_board;
    std::int64_t freeze_ticks_used = 0;
};

// One board; the game id equals the id of the agent playing it.
struct GameSlot {
    std::string game_id;
    std::size_t index = 0;
    team::AgentKind kind = team::AgentKind::guided;
    std::optional<std::string> owner;
    int generation = 0;
    engine::GameState state;
    std::int64_t next_decision_tick = 0;
    bool frozen = false;
};

// Handed to the decision observer before the placement is applied.
struct DecisionInfo {
    const GameSlot& slot;
    std::int64_t tick;
    const engine::Placement& chosen;
};
using DecisionObserver = std::function<void(const DecisionInfo&)>;

// Game seed for (game index, restart generation); the top bit is always
// clear so evaluation seeds, which set it, never collide.
std::uint64_t game_seed(std::uint64_t master_seed, std::size_t index, int generation);

// Lockstep session. Every mutation appends to one ordered event log; each
// call returns the events it appended.
class Session {
public:
    // Emits SessionStart and ConfigSnapshot. Throws Error(invalid_config).
    explicit Session(SessionConfig config);

    const SessionConfig& config() const noexcept { return config_; }
    std::int64_t tick() const noexcept { return tick_; }
    bool ended() const noexcept { return ended_; }
    std::int64_t decisions() const noexcept { return decisions_; }
    const std::vector<SessionEvent>& events() const noexcept { return events_; }

    // Throws Error(unknown_player), Error(invalid_board_index),
    // Error(freeze_unsupported), Error(freeze_budget_exhausted),
    // Error(game_not_active) and Error(session_ended).
    std::vector<SessionEvent> handle_key(const std::string& player_id, Key key);

    // Advances the lockstep clock tick by tick. Throws Error(session_ended).
    std::vector<SessionEvent> advance(std::int64_t ticks = 1);

    // Emits the final SessionEnd. Throws Error(session_ended).
    std::vector<SessionEvent> end();

    void set_observer(DecisionObserver observer) { observer_ = std::move(observer); }

    const std::vector<GameSlot>& games() const noexcept { return games_; }
    const GameSlot& game(const std::string& game_id) const;
    const learner::RewardModel& model(const std::string& agent_id) const;
    // Replaces an agent's model outside the event log; test and tooling hook.
    void set_model(const std::string& agent_id, learner::RewardModel model);
    const PlayerConsole& console(const std::string& player_id) const;
    const std::vector<PlayerConsole>& consoles() const noexcept { return consoles_; }
    // Game id behind a player's board index, if any.
    std::optional<std::string> board_game(const std::string& player_id, int board) const;

private:
    struct Agent {
        learner::RewardModel model;
        std::vector<std::vector<learner::CreditedSample>> pending;
    };

    SessionEvent& emit(EventKind kind, nlohmann::json payload);
    void step_tick();
    void decide(GameSlot& slot);
    void finish_game(GameSlot& slot, const std::string& reason);
    void deliver(const std::vector<team::RoutedSamples>& routed, const learner::FeedbackEvent& feedback);
    void apply_pending();
    void checkpoint();
    void unfreeze(PlayerConsole& console, bool input, const std::string& reason);
    PlayerConsole& console_mut(const std::string& player_id);
    GameSlot& slot_mut(const std::string& game_id);
    bool all_over() const;
    nlohmann::json final_scores() const;

    SessionConfig config_;
    std::vector<engine::PieceDef> catalog_;
    engine::GameSetup setup_;
    std::int64_t tick_ = 0;
    std::int64_t decisions_ = 0;
    bool ended_ = false;
    std::vector<SessionEvent> events_;
    std::size_t mark_ = 0;  // start of the current call's events
    std::vector<GameSlot> games_;
    std::map<std::string, Agent> agents_;
    std::vector<PlayerConsole> consoles_;
    team::GameHistories histories_;
    DecisionObserver observer_;
};

// The player input an event records, for replay. Only events carrying
// payload.input == true are inputs; forced SessionEnd is reported as nullopt
// key with the player left empty.
struct RecordedInput {
    std::int64_t tick = 0;
    std::string player_id;
    std::optional<Key> key;  // nullopt: forced end
};
std::optional<RecordedInput> recorded_input(const SessionEvent& event);

}  // namespace hybrid_tetris::session
