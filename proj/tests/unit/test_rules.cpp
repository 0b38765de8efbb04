#include "doctest.h"

#include <random>

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/rules/rules.hpp"
#include "../reference/naive_features.hpp"
#include "../reference/naive_tetris.hpp"
#include "../reference/piece_art.hpp"
#include "../reference/random_boards.hpp"

using namespace hybrid_tetris;
using namespace hybrid_tetris::rules;
using engine::Board;
using engine::Cell;
using engine::Color;

namespace {

const Cell kYellow = engine::to_cell(Color::yellow);
const Cell kRed = engine::to_cell(Color::red);

engine::ClearResult clear_with_rows(std::vector<std::vector<Cell>> rows, std::int64_t points = 40) {
    engine::ClearResult c;
    int r = 19;
    for (auto& row : rows) {
        c.cleared_rows.push_back({r--, std::move(row)});
    }
    c.lines_cleared = static_cast<int>(c.cleared_rows.size());
    c.points_awarded = points;
    return c;
}

std::vector<Cell> row_with_yellow(int count) {
    std::vector<Cell> row(10, kRed);
    for (int i = 0; i < count; ++i) {
        row[i] = kYellow;
    }
    return row;
}

HiddenRule yellow_rule(std::vector<RuleEffect> effects, std::set<std::string> players = {},
                       std::set<std::string> agents = {}) {
    HiddenRule r;
    r.rule_id = "yellow";
    r.trigger = {kYellow, 3};
    r.effects = std::move(effects);
    r.disclosed_to_players = std::move(players);
    r.disclosed_to_agents = std::move(agents);
    return r;
}

RuleEffect bonus(double multiplier = 10.0, BonusTiming timing = BonusTiming::end_of_game) {
    RuleEffect e;
    e.kind = EffectKind::score_bonus;
    e.multiplier = multiplier;
    e.timing = timing;
    return e;
}

RuleEffect reward() {
    RuleEffect e;
    e.kind = EffectKind::synthetic_reward;
    return e;
}

RuleEffect bias() {
    RuleEffect e;
    e.kind = EffectKind::next_piece_bias;
    return e;
}

GameContext context_for(std::string agent, std::optional<std::string> player) {
    return {agent, agent, std::move(player), 500, {}};
}

// Raw-unit oracle evaluation on a text grid, written independently of the
// normalized feature weights.
double raw_oracle(const reference::Grid& g) {
    const auto f = reference::grid_features(g);
    const int h = static_cast<int>(g.size());
    const int w = static_cast<int>(g[0].size());
    double heights = 0, diffs = 0;
    for (int c = 0; c < w; ++c) {
        heights += f[c] * h;
    }
    for (int c = 0; c + 1 < w; ++c) {
        diffs += f[w + c] * h;
    }
    return -0.5 * heights - 0.2 * diffs - 0.5 * f[2 * w - 1] * h - 4.0 * f[2 * w] * w * h;
}

std::string brute_force_favorable(const Board& b) {
    const std::int64_t table[4] = {40, 100, 300, 1200};
    std::string best_id;
    double best = -1e300;
    // ids visited in lexicographic order; strict improvement keeps the first
    for (const std::string id : {"I", "J", "L", "O", "S", "T", "Z"}) {
        const auto rotations = reference::all_rotations(reference::piece_art().at(id));
        for (const auto& mv : reference::brute_force_moves(reference::to_grid(b), rotations)) {
            const auto out = reference::apply_move(reference::to_grid(b), rotations[mv.rotation], mv, 'x', 0, table);
            const double v = raw_oracle(out.grid);
            if (v > best + 1e-9) {
                best = v;
                best_id = id;
            }
        }
    }
    return best_id;
}

}  // namespace

TEST_CASE("trigger table for yellow counts 0..10") {
    const Trigger t{kYellow, 3};
    for (int count = 0; count <= 10; ++count) {
        CHECK(triggers(t, clear_with_rows({row_with_yellow(count)})) == (count > 3));
    }
    // monotone in the threshold too
    for (int threshold = 0; threshold <= 10; ++threshold) {
        for (int count = 0; count <= 10; ++count) {
            CHECK(triggers({kYellow, threshold}, clear_with_rows({row_with_yellow(count)})) == (count > threshold));
        }
    }
    CHECK(!triggers(t, engine::ClearResult{}));
}

TEST_CASE("evaluate_rules fires once per rule per placement") {
    const std::vector<HiddenRule> rules{yellow_rule({bonus()})};
    auto fired = evaluate_rules(rules, clear_with_rows({row_with_yellow(4)}));
    CHECK(fired.size() == 1);
    fired = evaluate_rules(rules, clear_with_rows({row_with_yellow(3)}));
    CHECK(fired.empty());
    fired = evaluate_rules(rules, clear_with_rows({row_with_yellow(1), row_with_yellow(5)}));
    REQUIRE(fired.size() == 1);
    CHECK(fired[0].rule_id == "yellow");

    auto second = yellow_rule({reward()});
    second.rule_id = "second";
    const std::vector<HiddenRule> two{rules[0], second};
    fired = evaluate_rules(two, clear_with_rows({row_with_yellow(6), row_with_yellow(7)}));
    REQUIRE(fired.size() == 2);
    CHECK(fired[0].rule_id == "yellow");
    CHECK(fired[1].rule_id == "second");
}

TEST_CASE("score bonus disclosed to the guiding player is immediate") {
    const std::vector<HiddenRule> rules{yellow_rule({bonus(10.0)}, {"A"})};
    auto state = engine::new_game(engine::GameSetup{}, 1);
    state.score = 100;
    const auto clear = clear_with_rows({row_with_yellow(5), row_with_yellow(0)}, 100);
    const auto fired = evaluate_rules(rules, clear);
    const auto out = apply_effects(state, rules, fired, clear, context_for("1", "A"));
    CHECK(out.state.score == 1100);
    CHECK(out.state.bonus_ledger == 0);
    REQUIRE(out.notices.size() == 1);
    CHECK(out.notices[0].player_id == "A");
    CHECK(out.notices[0].bonus == 1000);
    CHECK(out.feedback.empty());
}

TEST_CASE("score bonus disclosed only to the agent accrues to the ledger") {
    const std::vector<HiddenRule> rules{yellow_rule({bonus(10.0)}, {}, {"1"})};
    auto state = engine::new_game(engine::GameSetup{}, 1);
    const auto clear = clear_with_rows({row_with_yellow(4)}, 40);
    const auto out = apply_effects(state, rules, evaluate_rules(rules, clear), clear, context_for("1", "A"));
    CHECK(out.state.score == 0);
    CHECK(out.state.bonus_ledger == 400);
    CHECK(final_score(out.state) == 400);
    CHECK(out.notices.empty());
    REQUIRE(out.bonuses.size() == 1);
    CHECK(out.bonuses[0].timing == BonusTiming::end_of_game);

    // the other player's disclosure does not make it immediate for A's game
    const std::vector<HiddenRule> other{yellow_rule({bonus(10.0)}, {"B"}, {"1"})};
    const auto o2 = apply_effects(state, other, evaluate_rules(other, clear), clear, context_for("1", "A"));
    CHECK(o2.state.bonus_ledger == 400);
    REQUIRE(o2.notices.size() == 1);
    CHECK(o2.notices[0].player_id == "B");
}

TEST_CASE("undisclosed score bonus follows its own timing") {
    const auto clear = clear_with_rows({row_with_yellow(4)}, 40);
    auto state = engine::new_game(engine::GameSetup{}, 1);
    const std::vector<HiddenRule> later{yellow_rule({bonus(10.0, BonusTiming::end_of_game)})};
    auto out = apply_effects(state, later, evaluate_rules(later, clear), clear, context_for("1", "A"));
    CHECK(out.state.bonus_ledger == 400);
    const std::vector<HiddenRule> now{yellow_rule({bonus(2.5, BonusTiming::immediate)})};
    out = apply_effects(state, now, evaluate_rules(now, clear), clear, context_for("1", "A"));
    CHECK(out.state.score == 100);
    CHECK(out.notices.empty());
}

TEST_CASE("synthetic reward only for a disclosed agent") {
    const auto clear = clear_with_rows({row_with_yellow(4)});
    auto state = engine::new_game(engine::GameSetup{}, 1);
    const std::vector<HiddenRule> disclosed{yellow_rule({reward()}, {}, {"1"})};
    auto out = apply_effects(state, disclosed, evaluate_rules(disclosed, clear), clear, context_for("1", "A"));
    REQUIRE(out.feedback.size() == 1);
    CHECK(out.feedback[0].source == learner::FeedbackSource::rule);
    CHECK(out.feedback[0].polarity == 1.0);
    CHECK(out.feedback[0].game_id == "1");
    CHECK(out.feedback[0].tick == 500);

    out = apply_effects(state, disclosed, evaluate_rules(disclosed, clear), clear, context_for("2", "A"));
    CHECK(out.feedback.empty());
}

TEST_CASE("undisclosed next-piece bias still overrides the next piece") {
    // well in column 9, four rows deep
    Board b;
    for (int r = 16; r < 20; ++r) {
        for (int c = 0; c < 9; ++c) {
            b.set(r, c, kRed);
        }
    }
    auto state = engine::new_game(engine::GameSetup{}, 1);
    state.board = b;
    state.next_piece = *engine::find_piece(state.active_pieces, "S");
    const auto clear = clear_with_rows({row_with_yellow(4)});
    const std::vector<HiddenRule> rules{yellow_rule({bias()})};
    const auto out = apply_effects(state, rules, evaluate_rules(rules, clear), clear, context_for("1", "A"));
    CHECK(out.state.next_piece.id == "I");
    CHECK(out.notices.empty());
    CHECK(out.feedback.empty());

    RuleEffect fixed = bias();
    fixed.selection = BiasSelection::fixed;
    fixed.piece_id = "P5";
    const std::vector<HiddenRule> bad{yellow_rule({fixed})};
    CHECK_THROWS_AS(apply_effects(state, bad, evaluate_rules(bad, clear), clear, context_for("1", "A")), Error);
    fixed.piece_id = "O";
    const std::vector<HiddenRule> ok{yellow_rule({fixed})};
    CHECK(apply_effects(state, ok, evaluate_rules(ok, clear), clear, context_for("1", "A")).state.next_piece.id == "O");
}

TEST_CASE("favorable_piece examples") {
    const auto standard = engine::standard_pieces();
    Board well;
    for (int r = 16; r < 20; ++r) {
        for (int c = 0; c < 9; ++c) {
            well.set(r, c, kRed);
        }
    }
    CHECK(favorable_piece(well, standard).id == "I");
    CHECK(brute_force_favorable(well) == "I");

    CHECK(favorable_piece(Board{}, standard, [](const Board&) { return 0.0; }).id == "I");
    std::vector<engine::PieceDef> reversed(standard.rbegin(), standard.rend());
    CHECK(favorable_piece(Board{}, reversed, [](const Board&) { return 0.0; }).id == "I");
    CHECK(favorable_piece(well, std::vector<engine::PieceDef>{standard[3]}).id == standard[3].id);
    CHECK_THROWS_AS(favorable_piece(well, std::vector<engine::PieceDef>{}), Error);
}

TEST_CASE("favorable_piece matches brute force on random boards") {
    std::mt19937_64 gen(77);
    const auto standard = engine::standard_pieces();
    for (int i = 0; i < 150; ++i) {
        const Board b = reference::random_board(gen, 10, 20, 10);
        const std::string expected = brute_force_favorable(b);
        if (expected.empty()) {
            continue;
        }
        CHECK(favorable_piece(b, standard).id == expected);
    }
}

TEST_CASE("advance_regime examples") {
    const auto catalog = engine::default_catalog();
    RegimeSchedule schedule;
    engine::ScoringTable doubled;
    doubled.base = {80, 200, 600, 2400};
    schedule.events.push_back({6000, {"P5"}, {}, doubled});

    auto state = engine::new_game(engine::GameSetup{}, 12);
    auto before = advance_regime(schedule, 5999, state, catalog);
    CHECK(before.active_pieces.size() == 7);
    CHECK(before.regime_cursor == 0);
    CHECK(before.bag == state.bag);

    // draws before the event never produce P5
    auto s = before;
    for (int i = 0; i < 70; ++i) {
        CHECK(s.bag.draw(s.active_pieces).id != "P5");
    }

    auto after = advance_regime(schedule, 6000, state, catalog);
    CHECK(after.active_pieces.size() == 8);
    CHECK(after.regime_cursor == 1);
    CHECK(after.scoring == doubled);
    bool seen = false;
    for (int i = 0; i < 8; ++i) {
        seen = seen || after.bag.draw(after.active_pieces).id == "P5";
    }
    CHECK(seen);

    // idempotent once applied
    auto again = advance_regime(schedule, 7000, advance_regime(schedule, 6000, state, catalog), catalog);
    CHECK(again.active_pieces.size() == 8);
    CHECK(again.regime_cursor == 1);

    // single clear at level 0 under the new table
    Board b;
    for (int c = 0; c < 6; ++c) {
        b.set(19, c, kRed);
    }
    auto game = advance_regime(schedule, 6000, state, catalog);
    game.board = b;
    game.current_piece = *engine::find_piece(catalog, "I");
    const auto [next, clear] = engine::apply_placement(game, {"I", 0, 6, 19});
    CHECK(clear.lines_cleared == 1);
    CHECK(clear.points_awarded == 80);
    auto old = state;
    old.board = b;
    old.current_piece = game.current_piece;
    CHECK(engine::apply_placement(old, {"I", 0, 6, 19}).second.points_awarded == 40);
}

TEST_CASE("advance_regime errors and removals") {
    const auto catalog = engine::default_catalog();
    engine::GameSetup setup;
    setup.pieces = {*engine::find_piece(catalog, "O"), *engine::find_piece(catalog, "I")};
    auto state = engine::new_game(setup, 3);

    RegimeSchedule remove_one{{{10, {}, {"I"}, std::nullopt}}};
    auto s = advance_regime(remove_one, 10, state, catalog);
    REQUIRE(s.active_pieces.size() == 1);
    CHECK(s.active_pieces[0].id == "O");

    RegimeSchedule remove_all{{{10, {}, {"I", "O"}, std::nullopt}}};
    CHECK_THROWS_AS(advance_regime(remove_all, 10, state, catalog), Error);

    RegimeSchedule unknown{{{10, {"Q9"}, {}, std::nullopt}}};
    CHECK_THROWS_AS(advance_regime(unknown, 10, state, catalog), Error);

    RegimeSchedule unordered{{{10, {}, {}, std::nullopt}, {10, {}, {}, std::nullopt}}};
    CHECK_THROWS_AS(validate_schedule(unordered), Error);
}

TEST_CASE("advance_regime tick by tick equals one jump") {
    const auto catalog = engine::default_catalog();
    engine::ScoringTable t1, t2;
    t1.base = {50, 150, 400, 1600};
    t2.base = {10, 20, 30, 40};
    RegimeSchedule schedule{{{5, {"P5"}, {}, t1}, {9, {"L3"}, {"S"}, std::nullopt}, {14, {}, {"P5"}, t2}}};
    const auto state = engine::new_game(engine::GameSetup{}, 4);
    for (std::int64_t final_tick : {3, 5, 9, 12, 14, 20}) {
        auto stepped = state;
        for (std::int64_t t = 0; t <= final_tick; ++t) {
            stepped = advance_regime(schedule, t, stepped, catalog);
        }
        const auto jumped = advance_regime(schedule, final_tick, state, catalog);
        CHECK(engine::piece_ids(stepped.active_pieces) == engine::piece_ids(jumped.active_pieces));
        CHECK(stepped.scoring == jumped.scoring);
    }
}

TEST_CASE("rule and schedule JSON round-trip") {
    RuleEffect fixed = bias();
    fixed.selection = BiasSelection::fixed;
    fixed.piece_id = "I";
    auto rule = yellow_rule({bonus(10.0, BonusTiming::immediate), reward(), fixed}, {"A"}, {"1", "2"});
    rule.notice_text = "Yellow rows pay";
    nlohmann::json j = rule;
    CHECK(j["trigger"]["color"] == "yellow");
    CHECK(j.get<HiddenRule>() == rule);

    j["effects"][0]["multiplier"] = 0;
    CHECK_THROWS_AS(j.get<HiddenRule>(), Error);
    j = rule;
    j["effects"] = nlohmann::json::array();
    CHECK_THROWS_AS(j.get<HiddenRule>(), Error);
    j = rule;
    j["trigger"]["color"] = "mauve";
    CHECK_THROWS_AS(j.get<HiddenRule>(), Error);

    engine::ScoringTable t;
    t.base = {80, 100, 300, 1200};
    RegimeSchedule schedule{{{6000, {"P5"}, {}, t}, {9000, {}, {"P5"}, std::nullopt}}};
    nlohmann::json s = schedule;
    CHECK(s.get<RegimeSchedule>() == schedule);
}
