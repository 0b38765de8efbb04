#include "hybrid_tetris/session/session.hpp"

#include <algorithm>

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/engine/piece_io.hpp"
#include "hybrid_tetris/hash.hpp"
#include "hybrid_tetris/learner/features.hpp"
#include "hybrid_tetris/learner/policy.hpp"
#include "hybrid_tetris/random.hpp"
#include "hybrid_tetris/rules/rules.hpp"

namespace hybrid_tetris::session {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTopBit = 1ULL << 63;
constexpr std::uint64_t kModelSalt = 0x6a09e667f3bcc908ULL;
constexpr std::int64_t kCheckpointEvery = 100;

json placement_json(const engine::Placement& p) {
    return {{"pieceId", p.piece_id}, {"rotation", p.rotation}, {"column", p.column}, {"landingRow", p.landing_row}};
}

}  // namespace

std::uint64_t game_seed(std::uint64_t master_seed, std::size_t index, int generation) {
    return (master_seed ^ static_cast<std::uint64_t>(index) ^ (static_cast<std::uint64_t>(generation) << 32)) &
           ~kTopBit;
}

Session::Session(SessionConfig config) : config_(std::move(config)) {
    validate_config(config_);
    catalog_ = config_.catalog();
    setup_ = config_.game_setup();
    const auto inputs = learner::feature_count(config_.board_width);
    const auto& topo = config_.topology;
    for (std::size_t i = 0; i < topo.agents.size(); ++i) {
        const auto& a = topo.agents[i];
        const std::uint64_t seed = mix_seed(config_.master_seed ^ kModelSalt ^ i);
        auto model = config_.learner.architecture == learner::Architecture::linear
                         ? learner::RewardModel::linear(inputs, config_.learner.hyperparams, seed)
                         : learner::RewardModel::mlp(inputs, config_.learner.hidden_width,
                                                     config_.learner.hyperparams, seed);
        agents_.emplace(a.agent_id, Agent{std::move(model), {}});

        GameSlot slot;
        slot.game_id = a.agent_id;
        slot.index = i;
        slot.kind = a.kind;
        slot.owner = topo.guiding_player(a.agent_id);
        slot.state = engine::new_game(setup_, game_seed(config_.master_seed, i, 0));
        slot.next_decision_tick = config_.decision_period.period(0);
        games_.push_back(std::move(slot));
    }
    for (const auto& p : topo.players) {
        consoles_.push_back({p.player_id, 0, std::nullopt, 0});
    }

    json games = json::array();
    for (const auto& g : games_) {
        games.push_back({{"gameId", g.game_id},
                         {"kind", g.kind == team::AgentKind::guided ? "guided" : "dependent"},
                         {"owner", g.owner ? json(*g.owner) : json(nullptr)}});
    }
    emit(EventKind::session_start, {{"sessionId", config_.session_id}, {"version", 1}, {"games", games}});
    emit(EventKind::config_snapshot, {{"config", config_}});
}

SessionEvent& Session::emit(EventKind kind, json payload) {
    events_.push_back({static_cast<std::int64_t>(events_.size()) + 1, tick_, kind, std::move(payload)});
    return events_.back();
}

std::vector<SessionEvent> Session::handle_key(const std::string& player_id, Key key) {
    mark_ = events_.size();
    if (ended_) {
        throw Error(ErrorCode::session_ended, "session has ended");
    }
    auto& con = console_mut(player_id);
    switch (key.kind) {
        case KeyKind::digit: {
            const auto game = board_game(player_id, key.digit);
            if (!game) {
                throw Error(ErrorCode::invalid_board_index,
                            "player " + player_id + " has no board " + std::to_string(key.digit));
            }
            con.selected_board = key.digit;
            emit(EventKind::board_selected,
                 {{"playerId", player_id}, {"board", key.digit}, {"gameId", *game}, {"input", true}});
            break;
        }
        case KeyKind::enter: {
            const auto game = *board_game(player_id, con.selected_board);
            const learner::FeedbackEvent fb{game, tick_, 1.0, learner::FeedbackSource::human, player_id};
            json payload{{"playerId", player_id}, {"board", con.selected_board}, {"gameId", game}, {"input", true}};
            try {
                auto routed = team::route_feedback(config_.topology, fb, histories_, config_.feedback_window);
                payload["credited"] = true;
                emit(EventKind::feedback_key, std::move(payload));
                deliver(routed, fb);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::no_eligible_decisions) {
                    throw;
                }
                payload["credited"] = false;
                emit(EventKind::feedback_key, std::move(payload));
            }
            break;
        }
        case KeyKind::space: {
            if (!config_.mode.superhuman) {
                throw Error(ErrorCode::freeze_unsupported, "freeze is only available in superhuman mode");
            }
            if (con.frozen_board == con.selected_board) {
                unfreeze(con, true, "key");
                break;
            }
            if (config_.freeze_budget_ticks && con.freeze_ticks_used >= *config_.freeze_budget_ticks) {
                throw Error(ErrorCode::freeze_budget_exhausted, "player " + player_id + " has no freeze budget left");
            }
            auto& slot = slot_mut(*board_game(player_id, con.selected_board));
            if (slot.state.status != engine::GameStatus::active) {
                throw Error(ErrorCode::game_not_active, "game " + slot.game_id + " is not active");
            }
            if (con.frozen_board) {
                unfreeze(con, false, "switch");
            }
            slot.frozen = true;
            slot.state.status = engine::GameStatus::frozen;
            con.frozen_board = con.selected_board;
            emit(EventKind::freeze, {{"playerId", player_id},
                                     {"board", con.selected_board},
                                     {"gameId", slot.game_id},
                                     {"ticksUsed", con.freeze_ticks_used},
                                     {"input", true}});
            break;
        }
    }
    return {events_.begin() + static_cast<std::ptrdiff_t>(mark_), events_.end()};
}

std::vector<SessionEvent> Session::advance(std::int64_t ticks) {
    mark_ = events_.size();
    if (ended_) {
        throw Error(ErrorCode::session_ended, "session has ended");
    }
    for (std::int64_t i = 0; i < ticks && !ended_; ++i) {
        ++tick_;
        step_tick();
    }
    return {events_.begin() + static_cast<std::ptrdiff_t>(mark_), events_.end()};
}

std::vector<SessionEvent> Session::end() {
    mark_ = events_.size();
    if (ended_) {
        throw Error(ErrorCode::session_ended, "session has ended");
    }
    emit(EventKind::session_end, {{"reason", "forced"}, {"finalScores", final_scores()}, {"input", true}});
    ended_ = true;
    return {events_.begin() + static_cast<std::ptrdiff_t>(mark_), events_.end()};
}

void Session::step_tick() {
    apply_pending();
    for (auto& slot : games_) {
        if (slot.state.status == engine::GameStatus::over) {
            continue;
        }
        if (slot.frozen) {
            auto& con = console_mut(*slot.owner);
            ++con.freeze_ticks_used;
            ++slot.next_decision_tick;
            if (config_.freeze_budget_ticks && con.freeze_ticks_used >= *config_.freeze_budget_ticks) {
                unfreeze(con, false, "budgetExhausted");
            }
            continue;
        }
        if (tick_ >= slot.next_decision_tick) {
            decide(slot);
        }
    }
    if (!config_.restart_on_game_over && all_over()) {
        emit(EventKind::session_end, {{"reason", "allGamesOver"}, {"finalScores", final_scores()}});
        ended_ = true;
    }
}

void Session::decide(GameSlot& slot) {
    const std::string& id = slot.game_id;
    auto& st = slot.state;

    const auto cursor = st.regime_cursor;
    st = rules::advance_regime(config_.regime, tick_, std::move(st), catalog_);
    if (st.regime_cursor != cursor) {
        emit(EventKind::regime_changed, {{"gameId", id},
                                         {"eventsApplied", st.regime_cursor},
                                         {"activePieces", engine::piece_ids(st.active_pieces)},
                                         {"scoring", st.scoring}});
    }

    emit(EventKind::decision_point, {{"gameId", id},
                                     {"turn", st.turn},
                                     {"piece", st.current_piece.id},
                                     {"nextPiece", st.next_piece.id},
                                     {"boardHash", to_hex(engine::board_hash(st))}});
    auto d = learner::decide(agents_.at(id).model, st);
    if (observer_) {
        observer_({slot, tick_, d.placement});
    }

    auto& history = histories_[id];
    history.push_back({id, st.turn, std::move(d.chosen_features), std::move(d.reference_features), tick_});
    const std::int64_t horizon = tick_ - config_.feedback_window.max_delay_ticks;
    const auto stale = std::find_if(history.begin(), history.end(),
                                    [&](const learner::DecisionRecord& r) { return r.tick >= horizon; });
    history.erase(history.begin(), stale);

    const auto score_before = st.score;
    const int turn = st.turn;
    auto [next, clear] = engine::apply_placement(st, d.placement);
    emit(EventKind::placement_chosen, {{"gameId", id},
                                       {"turn", turn},
                                       {"placement", placement_json(d.placement)},
                                       {"linesCleared", clear.lines_cleared},
                                       {"pointsAwarded", clear.points_awarded}});
    if (clear.lines_cleared > 0) {
        emit(EventKind::lines_cleared, {{"gameId", id},
                                        {"lines", clear.lines_cleared},
                                        {"totalLines", next.total_lines},
                                        {"level", next.level}});
    }

    const auto fired = rules::evaluate_rules(config_.rules, clear);
    std::vector<learner::FeedbackEvent> synthetic;
    if (!fired.empty()) {
        const rules::GameContext ctx{id, id, slot.owner, tick_, {}};
        auto out = rules::apply_effects(std::move(next), config_.rules, fired, clear, ctx);
        next = std::move(out.state);
        for (const auto& f : fired) {
            const auto& rule = config_.rules[f.rule_index];
            json effects = json::array();
            for (const auto& e : rule.effects) {
                effects.push_back(rules::effect_name(e.kind));
            }
            json bonuses = json::array();
            for (const auto& b : out.bonuses) {
                if (b.rule_id == rule.rule_id) {
                    bonuses.push_back({{"amount", b.amount},
                                       {"timing", b.timing == rules::BonusTiming::immediate ? "immediate" : "endOfGame"}});
                }
            }
            emit(EventKind::rule_fired, {{"gameId", id},
                                         {"ruleId", rule.rule_id},
                                         {"effects", effects},
                                         {"bonuses", bonuses},
                                         {"nextPiece", next.next_piece.id}});
        }
        for (const auto& n : out.notices) {
            emit(EventKind::notice, {{"ruleId", n.rule_id},
                                     {"playerId", n.player_id},
                                     {"gameId", n.game_id},
                                     {"text", n.text},
                                     {"bonus", n.bonus}});
        }
        synthetic = std::move(out.feedback);
    }
    st = std::move(next);
    for (const auto& fb : synthetic) {
        // Rule rewards refer to the placement that triggered them.
        const learner::CreditWindow exact{0, 0};
        if (slot.kind == team::AgentKind::guided) {
            deliver(team::route_feedback(config_.topology, fb, histories_, exact), fb);
        } else {
            deliver({{id, learner::credit_assign(histories_[id], fb, exact)}}, fb);
        }
    }
    if (st.score != score_before) {
        emit(EventKind::score_changed,
             {{"gameId", id}, {"score", st.score}, {"delta", st.score - score_before}, {"bonusLedger", st.bonus_ledger}});
    }

    ++decisions_;
    if (decisions_ % kCheckpointEvery == 0) {
        checkpoint();
    }
    slot.next_decision_tick = tick_ + config_.decision_period.period(st.level);
    if (st.status == engine::GameStatus::over) {
        finish_game(slot, "toppedOut");
    } else if (config_.max_placements_per_game > 0 && st.turn >= config_.max_placements_per_game) {
        finish_game(slot, "placementCap");
    }
}

void Session::finish_game(GameSlot& slot, const std::string& reason) {
    auto& st = slot.state;
    st.status = engine::GameStatus::over;
    emit(EventKind::game_over, {{"gameId", slot.game_id},
                                {"generation", slot.generation},
                                {"score", st.score},
                                {"bonusLedger", st.bonus_ledger},
                                {"finalScore", rules::final_score(st)},
                                {"lines", st.total_lines},
                                {"turns", st.turn},
                                {"reason", reason},
                                {"restarted", config_.restart_on_game_over}});
    if (config_.restart_on_game_over) {
        ++slot.generation;
        slot.state = engine::new_game(setup_, game_seed(config_.master_seed, slot.index, slot.generation));
        slot.next_decision_tick = tick_ + config_.decision_period.period(0);
    }
}

void Session::deliver(const std::vector<team::RoutedSamples>& routed, const learner::FeedbackEvent& feedback) {
    for (const auto& r : routed) {
        json samples = json::array();
        for (const auto& s : r.samples) {
            samples.push_back({{"turn", s.turn}, {"weight", s.weight}, {"label", s.label}});
        }
        emit(EventKind::credited_batch, {{"agentId", r.agent_id},
                                         {"gameId", feedback.game_id},
                                         {"source", learner::source_name(feedback.source)},
                                         {"playerId", feedback.player_id},
                                         {"feedbackTick", feedback.tick},
                                         {"samples", samples}});
        agents_.at(r.agent_id).pending.push_back(r.samples);
    }
}

void Session::apply_pending() {
    std::vector<std::string> updated;
    for (const auto& a : config_.topology.agents) {
        auto& agent = agents_.at(a.agent_id);
        if (agent.pending.empty()) {
            continue;
        }
        for (const auto& batch : agent.pending) {
            agent.model = learner::update(std::move(agent.model), batch);
        }
        agent.pending.clear();
        updated.push_back(a.agent_id);
    }
    if (updated.empty() || config_.topology.aggregation_mode != team::AggregationMode::parameter_consensus) {
        return;
    }
    for (const auto& a : config_.topology.agents) {
        if (a.kind != team::AgentKind::dependent) {
            continue;
        }
        const auto parents = config_.topology.parents(a.agent_id);
        const bool touched = std::any_of(parents.begin(), parents.end(), [&](const std::string& p) {
            return std::find(updated.begin(), updated.end(), p) != updated.end();
        });
        if (!touched) {
            continue;
        }
        std::map<std::string, learner::RewardModel> models;
        models.emplace(a.agent_id, agents_.at(a.agent_id).model);
        for (const auto& p : parents) {
            models.emplace(p, agents_.at(p).model);
        }
        agents_.at(a.agent_id).model = team::consensus_step(config_.topology, models, a.agent_id);
        updated.push_back(a.agent_id);
    }
}

void Session::checkpoint() {
    json hashes = json::object();
    for (const auto& g : games_) {
        hashes[g.game_id] = to_hex(engine::board_hash(g.state));
    }
    json digests = json::object();
    json counts = json::object();
    for (const auto& [id, agent] : agents_) {
        digests[id] = to_hex(learner::weights_digest(agent.model));
        counts[id] = agent.model.sample_count();
    }
    emit(EventKind::model_checkpoint,
         {{"decisions", decisions_}, {"boardHashes", hashes}, {"modelDigests", digests}, {"sampleCounts", counts}});
}

void Session::unfreeze(PlayerConsole& con, bool input, const std::string& reason) {
    if (!con.frozen_board) {
        return;
    }
    auto& slot = slot_mut(*board_game(con.player_id, *con.frozen_board));
    slot.frozen = false;
    if (slot.state.status == engine::GameStatus::frozen) {
        slot.state.status = engine::GameStatus::active;
    }
    emit(EventKind::unfreeze, {{"playerId", con.player_id},
                               {"board", *con.frozen_board},
                               {"gameId", slot.game_id},
                               {"reason", reason},
                               {"ticksUsed", con.freeze_ticks_used},
                               {"input", input}});
    con.frozen_board.reset();
}

const GameSlot& Session::game(const std::string& game_id) const {
    for (const auto& g : games_) {
        if (g.game_id == game_id) {
            return g;
        }
    }
    throw Error(ErrorCode::unknown_game, "no game '" + game_id + "'");
}

GameSlot& Session::slot_mut(const std::string& game_id) { return const_cast<GameSlot&>(game(game_id)); }

const learner::RewardModel& Session::model(const std::string& agent_id) const {
    const auto it = agents_.find(agent_id);
    if (it == agents_.end()) {
        throw Error(ErrorCode::unknown_game, "no agent '" + agent_id + "'");
    }
    return it->second.model;
}

void Session::set_model(const std::string& agent_id, learner::RewardModel model) {
    const auto it = agents_.find(agent_id);
    if (it == agents_.end()) {
        throw Error(ErrorCode::unknown_game, "no agent '" + agent_id + "'");
    }
    it->second.model = std::move(model);
}

const PlayerConsole& Session::console(const std::string& player_id) const {
    for (const auto& c : consoles_) {
        if (c.player_id == player_id) {
            return c;
        }
    }
    throw Error(ErrorCode::unknown_player, "no player '" + player_id + "'");
}

PlayerConsole& Session::console_mut(const std::string& player_id) {
    return const_cast<PlayerConsole&>(console(player_id));
}

std::optional<std::string> Session::board_game(const std::string& player_id, int board) const {
    if (board < 0 || board >= config_.boards_per_player) {
        return std::nullopt;
    }
    const auto boards = config_.topology.guided_by(player_id);
    if (static_cast<std::size_t>(board) >= boards.size()) {
        return std::nullopt;
    }
    return boards[static_cast<std::size_t>(board)];
}

bool Session::all_over() const {
    return std::all_of(games_.begin(), games_.end(),
                       [](const GameSlot& g) { return g.state.status == engine::GameStatus::over; });
}

json Session::final_scores() const {
    json out = json::object();
    for (const auto& g : games_) {
        out[g.game_id] = rules::final_score(g.state);
    }
    return out;
}

std::optional<RecordedInput> recorded_input(const SessionEvent& e) {
    if (!e.payload.is_object() || !e.payload.value("input", false)) {
        return std::nullopt;
    }
    RecordedInput in;
    in.tick = e.tick;
    in.player_id = e.payload.value("playerId", std::string());
    switch (e.kind) {
        case EventKind::board_selected:
            in.key = Key::digit_key(e.payload.value("board", 0));
            return in;
        case EventKind::feedback_key:
            in.key = Key::enter();
            return in;
        case EventKind::freeze:
        case EventKind::unfreeze:
            in.key = Key::space();
            return in;
        case EventKind::session_end:
            return in;
        default:
            return std::nullopt;
    }
}

}  // namespace hybrid_tetris::session
