#include "hybrid_tetris/rules/rules.hpp"

#include <algorithm>
#include <limits>

#include "hybrid_tetris/engine/piece_io.hpp"
#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/learner/heuristic.hpp"
#include "hybrid_tetris/learner/policy.hpp"

namespace hybrid_tetris::rules {

using nlohmann::json;

void validate_rule(const HiddenRule& rule) {
    if (rule.rule_id.empty()) {
        throw Error(ErrorCode::invalid_config, "rule without ruleId");
    }
    if (rule.trigger.min_count_exclusive < 0) {
        throw Error(ErrorCode::invalid_config, "rule " + rule.rule_id + ": minCountExclusive < 0");
    }
    if (rule.effects.empty()) {
        throw Error(ErrorCode::invalid_config, "rule " + rule.rule_id + " has no effects");
    }
    for (const auto& e : rule.effects) {
        if (e.kind == EffectKind::score_bonus && !(e.multiplier > 0.0)) {
            throw Error(ErrorCode::invalid_config, "rule " + rule.rule_id + ": multiplier must be > 0");
        }
        if (e.kind == EffectKind::next_piece_bias && e.selection == BiasSelection::fixed && e.piece_id.empty()) {
            throw Error(ErrorCode::invalid_config, "rule " + rule.rule_id + ": fixed bias needs pieceId");
        }
    }
}

bool triggers(const Trigger& trigger, const engine::ClearResult& clear) {
    for (const auto& row : clear.cleared_rows) {
        const auto n = std::count(row.colors.begin(), row.colors.end(), trigger.color);
        if (n > trigger.min_count_exclusive) {
            return true;
        }
    }
    return false;
}

std::vector<FiredRule> evaluate_rules(std::span<const HiddenRule> rules, const engine::ClearResult& clear) {
    std::vector<FiredRule> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (triggers(rules[i].trigger, clear)) {
            out.push_back({rules[i].rule_id, i});
        }
    }
    return out;
}

namespace {

std::string notice_text(const HiddenRule& rule) {
    return rule.notice_text.empty() ? "Hidden rule " + rule.rule_id + " triggered" : rule.notice_text;
}

const engine::PieceDef& active_piece(const engine::GameState& state, const std::string& id) {
    for (const auto& p : state.active_pieces) {
        if (p.id == id) {
            return p;
        }
    }
    throw Error(ErrorCode::unknown_piece_for_bias, "bias piece '" + id + "' is not in the active set");
}

}  // namespace

EffectsOutcome apply_effects(engine::GameState state, std::span<const HiddenRule> rules,
                             std::span<const FiredRule> fired, const engine::ClearResult& clear,
                             const GameContext& context) {
    EffectsOutcome out;
    for (const auto& f : fired) {
        const HiddenRule& rule = rules[f.rule_index];
        const bool player_disclosed =
            context.guiding_player && rule.disclosed_to_players.count(*context.guiding_player) > 0;
        const bool agent_disclosed = rule.disclosed_to_agents.count(context.agent_id) > 0;
        std::int64_t shown_bonus = 0;
        for (const auto& effect : rule.effects) {
            switch (effect.kind) {
                case EffectKind::next_piece_bias:
                    state.next_piece = effect.selection == BiasSelection::fixed
                                           ? active_piece(state, effect.piece_id)
                                           : favorable_piece(state.board, state.active_pieces, context.evaluator);
                    break;
                case EffectKind::synthetic_reward:
                    if (agent_disclosed) {
                        out.feedback.push_back({context.game_id, context.tick, effect.polarity,
                                                learner::FeedbackSource::rule, ""});
                    }
                    break;
                case EffectKind::score_bonus: {
                    const auto amount =
                        static_cast<std::int64_t>(effect.multiplier * static_cast<double>(clear.points_awarded));
                    BonusTiming timing = effect.timing;
                    if (player_disclosed) {
                        timing = BonusTiming::immediate;
                    } else if (agent_disclosed) {
                        timing = BonusTiming::end_of_game;
                    }
                    if (timing == BonusTiming::immediate) {
                        state.score += amount;
                        shown_bonus += amount;
                    } else {
                        state.bonus_ledger += amount;
                    }
                    out.bonuses.push_back({rule.rule_id, amount, timing});
                    break;
                }
            }
        }
        for (const auto& player : rule.disclosed_to_players) {
            out.notices.push_back({rule.rule_id, player, context.game_id, notice_text(rule), shown_bonus});
        }
    }
    out.state = std::move(state);
    return out;
}

std::int64_t final_score(const engine::GameState& state) { return state.score + state.bonus_ledger; }

engine::PieceDef favorable_piece(const engine::Board& board, std::span<const engine::PieceDef> pieces,
                                 const BoardEvaluator& evaluator) {
    if (pieces.empty()) {
        throw Error(ErrorCode::empty_piece_set, "favorable_piece needs at least one piece");
    }
    static const auto oracle = learner::default_oracle_weights();
    const auto weights = board.width() == engine::kDefaultWidth && board.height() == engine::kDefaultHeight
                             ? oracle
                             : learner::default_oracle_weights(board.width(), board.height());
    auto value = [&](const engine::Board& b) {
        return evaluator ? evaluator(b) : learner::evaluate_board(weights, b);
    };

    std::vector<const engine::PieceDef*> order;
    for (const auto& p : pieces) {
        order.push_back(&p);
    }
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });

    const engine::PieceDef* best = order.front();
    double best_value = -std::numeric_limits<double>::infinity();
    for (const auto* p : order) {
        double v = -std::numeric_limits<double>::infinity();
        for (const auto& placement : engine::enumerate_placements(board, *p)) {
            v = std::max(v, value(engine::lock_and_clear(board, *p, placement).board));
        }
        if (v > best_value) {
            best_value = v;
            best = p;
        }
    }
    return *best;
}

void validate_schedule(const RegimeSchedule& schedule) {
    for (std::size_t i = 1; i < schedule.events.size(); ++i) {
        if (schedule.events[i].at_tick <= schedule.events[i - 1].at_tick) {
            throw Error(ErrorCode::invalid_config, "regime events must have strictly increasing atTick");
        }
    }
    for (const auto& e : schedule.events) {
        if (e.new_scoring) {
            e.new_scoring->validate();
        }
    }
}

engine::GameState advance_regime(const RegimeSchedule& schedule, std::int64_t tick, engine::GameState state,
                                 const std::vector<engine::PieceDef>& catalog) {
    bool pieces_changed = false;
    while (state.regime_cursor < schedule.events.size() && schedule.events[state.regime_cursor].at_tick <= tick) {
        const auto& e = schedule.events[state.regime_cursor];
        for (const auto& id : e.add_pieces) {
            const auto* p = engine::find_piece(catalog, id);
            if (!p) {
                throw Error(ErrorCode::invalid_piece, "regime adds unknown piece '" + id + "'");
            }
            if (!engine::find_piece(state.active_pieces, id)) {
                state.active_pieces.push_back(*p);
                pieces_changed = true;
            }
        }
        for (const auto& id : e.remove_pieces) {
            auto it = std::find_if(state.active_pieces.begin(), state.active_pieces.end(),
                                   [&](const engine::PieceDef& p) { return p.id == id; });
            if (it == state.active_pieces.end()) {
                continue;
            }
            if (state.active_pieces.size() == 1) {
                throw Error(ErrorCode::removal_would_empty_piece_set,
                            "removing '" + id + "' would empty the active piece set");
            }
            state.active_pieces.erase(it);
            pieces_changed = true;
        }
        if (e.new_scoring) {
            state.scoring = *e.new_scoring;
        }
        ++state.regime_cursor;
    }
    if (pieces_changed) {
        state.bag.rebuild(state.active_pieces);
    }
    return state;
}

std::string_view effect_name(EffectKind kind) {
    switch (kind) {
        case EffectKind::next_piece_bias: return "nextPieceBias";
        case EffectKind::synthetic_reward: return "syntheticReward";
        case EffectKind::score_bonus: return "scoreBonus";
    }
    return "scoreBonus";
}

void to_json(json& j, const HiddenRule& rule) {
    json effects = json::array();
    for (const auto& e : rule.effects) {
        json x{{"kind", effect_name(e.kind)}};
        switch (e.kind) {
            case EffectKind::next_piece_bias:
                x["selection"] = e.selection == BiasSelection::favorable ? "favorable" : "fixed";
                if (e.selection == BiasSelection::fixed) {
                    x["pieceId"] = e.piece_id;
                }
                break;
            case EffectKind::synthetic_reward:
                x["polarity"] = e.polarity;
                break;
            case EffectKind::score_bonus:
                x["multiplier"] = e.multiplier;
                x["timing"] = e.timing == BonusTiming::immediate ? "immediate" : "endOfGame";
                break;
        }
        effects.push_back(std::move(x));
    }
    j = {{"ruleId", rule.rule_id},
         {"trigger",
          {{"kind", "clearedRowColorCount"},
           {"color", engine::color_name(static_cast<engine::Color>(rule.trigger.color))},
           {"minCountExclusive", rule.trigger.min_count_exclusive}}},
         {"effects", effects},
         {"disclosedToPlayers", rule.disclosed_to_players},
         {"disclosedToAgents", rule.disclosed_to_agents},
         {"notice", rule.notice_text}};
}

void from_json(const json& j, HiddenRule& rule) {
    try {
        rule = HiddenRule{};
        rule.rule_id = j.at("ruleId").get<std::string>();
        const auto& t = j.at("trigger");
        if (t.value("kind", std::string("clearedRowColorCount")) != "clearedRowColorCount") {
            throw Error(ErrorCode::invalid_config, "unsupported trigger kind in rule " + rule.rule_id);
        }
        rule.trigger.color = engine::to_cell(engine::parse_color(t.at("color").get<std::string>()));
        rule.trigger.min_count_exclusive = t.at("minCountExclusive").get<int>();
        for (const auto& x : j.at("effects")) {
            RuleEffect e;
            const auto kind = x.at("kind").get<std::string>();
            if (kind == "nextPieceBias") {
                e.kind = EffectKind::next_piece_bias;
                const auto sel = x.value("selection", std::string("favorable"));
                if (sel != "favorable" && sel != "fixed") {
                    throw Error(ErrorCode::invalid_config, "unknown bias selection '" + sel + "'");
                }
                e.selection = sel == "fixed" ? BiasSelection::fixed : BiasSelection::favorable;
                e.piece_id = x.value("pieceId", std::string());
            } else if (kind == "syntheticReward") {
                e.kind = EffectKind::synthetic_reward;
                e.polarity = x.value("polarity", 1.0);
            } else if (kind == "scoreBonus") {
                e.kind = EffectKind::score_bonus;
                e.multiplier = x.value("multiplier", 10.0);
                const auto timing = x.value("timing", std::string("endOfGame"));
                if (timing != "immediate" && timing != "endOfGame") {
                    throw Error(ErrorCode::invalid_config, "unknown bonus timing '" + timing + "'");
                }
                e.timing = timing == "immediate" ? BonusTiming::immediate : BonusTiming::end_of_game;
            } else {
                throw Error(ErrorCode::invalid_config, "unknown effect kind '" + kind + "'");
            }
            rule.effects.push_back(e);
        }
        rule.disclosed_to_players = j.value("disclosedToPlayers", std::set<std::string>{});
        rule.disclosed_to_agents = j.value("disclosedToAgents", std::set<std::string>{});
        rule.notice_text = j.value("notice", std::string());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed rule: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_config) {
            throw;
        }
        throw Error(ErrorCode::invalid_config, e.what());
    }
    validate_rule(rule);
}

void to_json(json& j, const RegimeSchedule& schedule) {
    json events = json::array();
    for (const auto& e : schedule.events) {
        json x{{"atTick", e.at_tick}, {"addPieces", e.add_pieces}, {"removePieces", e.remove_pieces}};
        if (e.new_scoring) {
            x["newScoringTable"] = *e.new_scoring;
        }
        events.push_back(std::move(x));
    }
    j = {{"events", events}};
}

void from_json(const json& j, RegimeSchedule& schedule) {
    try {
        schedule = RegimeSchedule{};
        for (const auto& x : j.value("events", json::array())) {
            RegimeEvent e;
            e.at_tick = x.at("atTick").get<std::int64_t>();
            e.add_pieces = x.value("addPieces", std::vector<std::string>{});
            e.remove_pieces = x.value("removePieces", std::vector<std::string>{});
            if (x.contains("newScoringTable") && !x["newScoringTable"].is_null()) {
                e.new_scoring = x["newScoringTable"].get<engine::ScoringTable>();
            }
            schedule.events.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed regime: ") + e.what());
    }
    validate_schedule(schedule);
}

}  // namespace hybrid_tetris::rules
