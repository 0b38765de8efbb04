// Acceptance run: one PASS/FAIL line per primary criterion. Tolerances and
// time budgets are fixed below. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/harness/experiment.hpp"
#include "hybrid_tetris/learner/credit.hpp"
#include "hybrid_tetris/learner/heuristic.hpp"
#include "hybrid_tetris/rules/rules.hpp"
#include "hybrid_tetris/server/core.hpp"
#include "hybrid_tetris/server/protocol.hpp"
#include "hybrid_tetris/server/replay.hpp"
#include "hybrid_tetris/session/session.hpp"
#include "../reference/disclosure.hpp"
#include "../reference/finite_diff.hpp"
#include "../reference/naive_tetris.hpp"
#include "../reference/piece_art.hpp"
#include "../reference/protocol_fuzz.hpp"
#include "../reference/random_boards.hpp"

namespace ht = hybrid_tetris;
using ht::engine::Board;

namespace {

constexpr int kEngineInstances = 1000;
constexpr int kCreditTriples = 10'000;
constexpr double kCreditSumTolerance = 1e-9;
constexpr int kGradientCases = 100;  // per architecture
constexpr double kGradientTolerance = 1e-4;
constexpr int kLearningSeeds = 5;
constexpr int kSeedsRequired = 4;
constexpr int kEvalGames = 50;
constexpr int kFeedbackEvents = 300;
constexpr double kLearningFactor = 5.0;
constexpr int kFuzzMessages = 10'000;
constexpr int kBitFlips = 25;
constexpr int kRegimeTick = 3000;
constexpr int kRegimeBags = 3;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

const std::filesystem::path kConfigDir = HT_CONFIG_DIR;

ht::session::SessionConfig base_config() { return ht::session::load_config(kConfigDir / "base.json"); }

ht::learner::RewardModel oracle_model(int width, int height) {
    auto m = ht::learner::RewardModel::linear(ht::learner::feature_count(width));
    auto w = ht::learner::default_oracle_weights(width, height);
    w.push_back(0.0);
    m.set_weights(w);
    return m;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << bytes;
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// --- engine ---------------------------------------------------------------

Outcome engine_equivalence() {
    std::mt19937_64 gen(1000);
    const auto catalog = ht::engine::default_catalog();
    const std::int64_t table[4] = {40, 100, 300, 1200};
    int mismatches = 0;
    int placements = 0;
    for (int trial = 0; trial < kEngineInstances; ++trial) {
        const Board board = reference::random_board(gen);
        const auto& piece = catalog[gen() % catalog.size()];
        const auto rotations = reference::all_rotations(reference::piece_art().at(piece.id));
        const auto grid = reference::to_grid(board);
        const auto expected = reference::brute_force_moves(grid, rotations);
        const auto got = ht::engine::enumerate_placements(board, piece);
        if (got.size() != expected.size()) {
            ++mismatches;
            continue;
        }
        const int level = static_cast<int>(gen() % 5);
        auto state = ht::engine::new_game(ht::engine::GameSetup{}, 1);
        state.board = board;
        state.current_piece = piece;
        state.level = level;
        state.total_lines = level * 10;
        for (std::size_t i = 0; i < got.size(); ++i) {
            ++placements;
            const auto& m = expected[i];
            if (got[i].rotation != m.rotation || got[i].column != m.column || got[i].landing_row != m.row) {
                ++mismatches;
                continue;
            }
            const auto [next, clear] = ht::engine::apply_placement(state, got[i]);
            const auto ref = reference::apply_move(grid, rotations[m.rotation], m,
                                                   reference::tag_for(ht::engine::to_cell(piece.color)), level, table);
            if (reference::to_grid(next.board) != ref.grid || clear.lines_cleared != ref.lines ||
                clear.points_awarded != ref.points || next.score != state.score + ref.points) {
                ++mismatches;
            }
        }
    }
    return {mismatches == 0, std::to_string(kEngineInstances) + " instances, " + std::to_string(placements) +
                                 " placements applied, " + std::to_string(mismatches) + " mismatches"};
}

// --- determinism and replay -------------------------------------------------

Outcome determinism_replay() {
    const auto config = base_config();
    const std::uint64_t seed = 11;
    std::vector<std::filesystem::path> logs;
    std::vector<std::string> csvs;
    for (int run = 0; run < 2; ++run) {
        const auto dir = fresh_dir("ht_acceptance_run" + std::to_string(run));
        ht::harness::ExperimentOptions opts;
        opts.eval.games = 5;
        opts.log_dir = dir;
        csvs.push_back(ht::harness::report_csv(ht::harness::run_experiment(config, seed, opts)));
        logs.push_back(dir / (config.session_id + "-" + std::to_string(seed) + ".jsonl"));
    }
    const auto bytes = read_bytes(logs[0]);
    const bool identical = !bytes.empty() && bytes == read_bytes(logs[1]) && csvs[0] == csvs[1];
    const auto verdict = ht::server::replay_verify(logs[0]);

    std::mt19937_64 gen(31);
    int detected = 0;
    const auto flipped = logs[1].parent_path() / "flipped.jsonl";
    for (int i = 0; i < kBitFlips; ++i) {
        auto copy = bytes;
        const auto pos = std::uniform_int_distribution<std::size_t>(0, copy.size() - 1)(gen);
        copy[pos] = static_cast<char>(copy[pos] ^ (1 << (gen() % 8)));
        write_bytes(flipped, copy);
        try {
            detected += !ht::server::replay_verify(flipped).ok;
        } catch (const ht::Error&) {
            ++detected;  // unparsable log
        }
    }
    std::ostringstream d;
    d << "log " << bytes.size() << " bytes, identical=" << identical << ", replay "
      << (verdict.ok ? "ok" : "mismatch at seq " + std::to_string(verdict.seq) + " " + verdict.field)
      << ", bit flips detected " << detected << "/" << kBitFlips;
    return {identical && verdict.ok && detected == kBitFlips, d.str()};
}

// --- credit assignment -----------------------------------------------------

Outcome credit_assignment() {
    std::mt19937_64 gen(555);
    const std::vector<std::string> games{"1", "2", "3"};
    int failures = 0;
    int empty = 0;
    for (int trial = 0; trial < kCreditTriples; ++trial) {
        std::vector<ht::learner::DecisionRecord> history;
        const int n = static_cast<int>(gen() % 40);
        std::int64_t tick = static_cast<std::int64_t>(gen() % 50);
        std::map<std::string, int> turns;
        for (int i = 0; i < n; ++i) {
            tick += static_cast<std::int64_t>(gen() % 60);
            const auto& g = games[gen() % games.size()];
            history.push_back({g, turns[g]++, ht::learner::FeatureVector(21, 0.0), {}, tick});
        }
        const auto lo = static_cast<std::int64_t>(gen() % 30);
        const ht::learner::CreditWindow window{lo, lo + static_cast<std::int64_t>(gen() % 250)};
        const double polarity = gen() % 4 == 0 ? -1.0 : 1.0;
        const ht::learner::FeedbackEvent fb{games[gen() % games.size()], tick + static_cast<std::int64_t>(gen() % 80),
                                            polarity, ht::learner::FeedbackSource::human, "A"};

        std::set<int> expected;
        for (const auto& d : history) {
            const auto delay = fb.tick - d.tick;
            if (d.game_id == fb.game_id && lo <= delay && delay <= window.max_delay_ticks) {
                expected.insert(d.turn);
            }
        }
        try {
            const auto samples = ht::learner::credit_assign(history, fb, window);
            double sum = 0.0;
            std::set<int> got;
            bool ok = true;
            for (const auto& s : samples) {
                sum += s.weight;
                got.insert(s.turn);
                ok = ok && s.label == polarity && s.weight == 1.0 / static_cast<double>(expected.size());
            }
            ok = ok && got == expected && samples.size() == expected.size() &&
                 std::abs(sum - 1.0) <= kCreditSumTolerance;
            failures += !ok;
        } catch (const ht::Error& e) {
            ++empty;
            failures += !(expected.empty() && e.code() == ht::ErrorCode::no_eligible_decisions);
        }
    }
    return {failures == 0, std::to_string(kCreditTriples) + " triples (" + std::to_string(empty) +
                               " with an empty window), " + std::to_string(failures) + " failures"};
}

// --- gradient check --------------------------------------------------------

Outcome gradient_check() {
    std::mt19937_64 gen(17);
    double worst = 0.0;
    for (const bool mlp : {false, true}) {
        for (int i = 0; i < kGradientCases; ++i) {
            const auto c = reference::random_gradient_case(gen, mlp);
            worst = std::max(worst, reference::relative_error(ht::learner::loss_gradient(c.model, c.sample),
                                                              reference::numeric_loss_gradient(c.model, c.sample)));
        }
    }
    std::ostringstream d;
    d << 2 * kGradientCases << " cases, worst relative error " << std::scientific << std::setprecision(2) << worst
      << " (tolerance " << kGradientTolerance << ")";
    return {worst < kGradientTolerance, d.str()};
}

// --- learning --------------------------------------------------------------

ht::harness::ExperimentReport learning_run(std::uint64_t seed) {
    ht::harness::ExperimentOptions opts;
    opts.eval.games = kEvalGames;
    opts.checkpoints = {0, 50, 100, 200, kFeedbackEvents};
    return ht::harness::run_experiment(base_config(), seed, opts);
}

Outcome learning_efficacy() {
    const auto config = base_config();
    int seeds_ok = 0;
    std::ostringstream d;
    for (std::uint64_t seed = 1; seed <= kLearningSeeds; ++seed) {
        const auto report = learning_run(seed);
        const auto baseline = ht::harness::baseline_random(config, kEvalGames, seed);
        const double floor = kLearningFactor * static_cast<double>(baseline.median);
        bool ok = report.completed;
        d << (seed > 1 ? "; " : "") << "seed " << seed << " baseline " << baseline.median << " guided";
        for (const auto& a : report.checkpoints.back().agents) {
            if (a.kind != "guided") {
                continue;
            }
            ok = ok && a.feedback_count == kFeedbackEvents && static_cast<double>(a.lines.median) >= floor;
            d << ' ' << a.lines.median;
        }
        seeds_ok += ok;
    }
    d << " -> " << seeds_ok << "/" << kLearningSeeds << " seeds";
    return {seeds_ok >= kSeedsRequired, d.str()};
}

Outcome dependent_learning() {
    int seeds_ok = 0;
    std::ostringstream d;
    for (std::uint64_t seed = 1; seed <= kLearningSeeds; ++seed) {
        const auto report = learning_run(seed);
        const auto& untrained = report.at(0, "5");
        const auto& trained = report.at(kFeedbackEvents, "5");
        seeds_ok += report.completed && trained.lines.median > untrained.lines.median;
        d << (seed > 1 ? "; " : "") << "seed " << seed << ": " << untrained.lines.median << " -> "
          << trained.lines.median;
    }
    d << " -> " << seeds_ok << "/" << kLearningSeeds << " seeds";
    return {seeds_ok >= kSeedsRequired, d.str()};
}

// --- hidden rules ------------------------------------------------------------

// Rows 20-k..19 filled in columns 0..8 with `yellow` yellow cells first; a
// vertical I in column 9 clears exactly k rows.
std::pair<ht::engine::GameState, ht::engine::Placement> clearing_setup(int k, int yellow, int level) {
    const auto catalog = ht::engine::default_catalog();
    Board b;
    for (int r = 20 - k; r < 20; ++r) {
        for (int c = 0; c < 9; ++c) {
            b.set(r, c, ht::engine::to_cell(c < yellow ? ht::engine::Color::yellow : ht::engine::Color::red));
        }
    }
    auto state = ht::engine::new_game(ht::engine::GameSetup{}, 7);
    state.board = b;
    state.current_piece = *ht::engine::find_piece(catalog, "I");
    state.level = level;
    state.total_lines = level * 10;
    for (const auto& p : ht::engine::enumerate_placements(b, state.current_piece)) {
        if (p.column == 9 && ht::engine::lock_and_clear(b, state.current_piece, p).cleared_rows.size() ==
                                 static_cast<std::size_t>(k)) {
            return {state, p};
        }
    }
    throw ht::Error(ht::ErrorCode::illegal_placement, "no clearing placement");
}

Outcome hidden_rules() {
    using namespace ht::rules;
    int failures = 0;
    std::ostringstream d;

    // trigger table, on the component and through real clears
    const Trigger yellow_gt3{ht::engine::to_cell(ht::engine::Color::yellow), 3};
    for (int count = 0; count <= 10; ++count) {
        ht::engine::ClearResult c;
        std::vector<ht::engine::Cell> row(10, ht::engine::to_cell(ht::engine::Color::red));
        std::fill_n(row.begin(), count, ht::engine::to_cell(ht::engine::Color::yellow));
        c.cleared_rows.push_back({19, row});
        c.lines_cleared = 1;
        failures += triggers(yellow_gt3, c) != (count > 3);
    }
    for (int count = 0; count <= 9; ++count) {
        const auto [state, p] = clearing_setup(1, count, 0);
        failures += triggers(yellow_gt3, ht::engine::apply_placement(state, p).second) != (count > 3);
    }

    HiddenRule rule;
    rule.rule_id = "yellow";
    rule.trigger = yellow_gt3;
    RuleEffect bonus;
    bonus.kind = EffectKind::score_bonus;
    bonus.multiplier = 10.0;
    bonus.timing = BonusTiming::end_of_game;
    RuleEffect reward;
    reward.kind = EffectKind::synthetic_reward;
    rule.effects = {bonus, reward};

    // every disclosure subset of {guiding player A, other player B, agent 1, agent 2}
    const ht::engine::ScoringTable table;
    int checks = 0;
    for (unsigned mask = 0; mask < 16; ++mask) {
        auto r = rule;
        r.disclosed_to_players.clear();
        r.disclosed_to_agents.clear();
        if (mask & 1u) r.disclosed_to_players.insert("A");
        if (mask & 2u) r.disclosed_to_players.insert("B");
        if (mask & 4u) r.disclosed_to_agents.insert("1");
        if (mask & 8u) r.disclosed_to_agents.insert("2");
        const std::vector<HiddenRule> rules{r};
        for (int k = 1; k <= 4; ++k) {
            for (int level = 0; level < 3; ++level) {
                ++checks;
                const auto [state, p] = clearing_setup(k, 5, level);
                const auto [after, clear] = ht::engine::apply_placement(state, p);
                const auto fired = evaluate_rules(rules, clear);
                const GameContext ctx{"1", "1", std::string("A"), 1234, {}};
                const auto out = apply_effects(after, rules, fired, clear, ctx);
                const std::int64_t expected_bonus = 10 * table.points(k, level);
                const bool immediate = mask & 1u;
                bool ok = fired.size() == 1 && clear.points_awarded == table.points(k, level);
                ok = ok && out.bonuses.size() == 1 && out.bonuses[0].amount == expected_bonus;
                ok = ok && out.bonuses[0].timing == (immediate ? BonusTiming::immediate : BonusTiming::end_of_game);
                ok = ok && out.state.score == after.score + (immediate ? expected_bonus : 0);
                ok = ok && out.state.bonus_ledger == (immediate ? 0 : expected_bonus);
                ok = ok && final_score(out.state) == after.score + expected_bonus;
                ok = ok && out.feedback.size() == ((mask & 4u) ? 1u : 0u);
                if (!out.feedback.empty()) {
                    ok = ok && out.feedback[0].source == ht::learner::FeedbackSource::rule &&
                         out.feedback[0].polarity == 1.0 && out.feedback[0].game_id == "1";
                }
                ok = ok && out.notices.size() == r.disclosed_to_players.size();
                failures += !ok;
            }
        }
    }
    d << "trigger table 0..10 and " << checks << " disclosure/clear combinations, " << failures << " failures";
    return {failures == 0, d.str()};
}

// --- regime change -----------------------------------------------------------

Outcome regime_change() {
    auto c = base_config();
    c.decision_period = {50, 10, 0.8};
    ht::engine::ScoringTable swapped;
    swapped.base = {80, 200, 600, 2400};
    c.regime.events = {{kRegimeTick, {"P5"}, {}, swapped}};
    c.restart_on_game_over = true;
    ht::session::Session s(c);
    for (const auto& g : s.games()) {
        s.set_model(g.game_id, oracle_model(c.board_width, c.board_height));
    }
    s.advance(kRegimeTick + 6000);

    struct Track {
        bool early_p5 = false;
        int draws_after = 0;
        int first_p5_after = -1;
        int level = 0;
        bool single_checked = false;
        bool single_ok = true;
        int generation = 0;
    };
    std::map<std::string, Track> games;
    const int set_size = static_cast<int>(c.initial_pieces.size()) + 1;
    for (const auto& e : s.events()) {
        using K = ht::session::EventKind;
        if (e.kind == K::game_over) {
            auto& t = games[e.payload.at("gameId").get<std::string>()];
            t.level = 0;
        }
        if (e.kind == K::decision_point) {
            auto& t = games[e.payload.at("gameId").get<std::string>()];
            const bool p5 = e.payload.at("piece") == "P5" || e.payload.at("nextPiece") == "P5";
            if (e.tick < kRegimeTick) {
                t.early_p5 = t.early_p5 || p5;
            } else {
                ++t.draws_after;
                if (p5 && t.first_p5_after < 0) {
                    t.first_p5_after = t.draws_after;
                }
            }
        }
        if (e.kind == K::placement_chosen && e.tick >= kRegimeTick) {
            auto& t = games[e.payload.at("gameId").get<std::string>()];
            if (e.payload.at("linesCleared") == 1 && !t.single_checked) {
                t.single_checked = true;
                t.single_ok = e.payload.at("pointsAwarded").get<std::int64_t>() == swapped.points(1, t.level);
            }
        }
        if (e.kind == K::lines_cleared) {
            games[e.payload.at("gameId").get<std::string>()].level = e.payload.at("level").get<int>();
        }
    }
    bool ok = games.size() == 5;
    int singles = 0;
    std::ostringstream d;
    for (const auto& [id, t] : games) {
        ok = ok && !t.early_p5 && t.first_p5_after > 0 && t.first_p5_after <= kRegimeBags * set_size + 1 &&
             t.single_ok;
        singles += t.single_checked;
        d << (id == games.begin()->first ? "" : ", ") << "game " << id << " P5 at post-event draw "
          << t.first_p5_after;
    }
    ok = ok && singles > 0;
    d << "; " << singles << " games checked a first post-event single clear";
    return {ok, d.str()};
}

// --- protocol --------------------------------------------------------------

Outcome protocol_fuzz() {
    reference::MessageFuzzer fuzz(424242);
    std::mt19937_64 gen(8);
    int round_trip_failures = 0;
    int escaped = 0;
    int rejected = 0;
    auto c = base_config();
    ht::server::ServerCore core(c);
    for (int i = 0; i < kFuzzMessages; ++i) {
        const auto m = fuzz.next();
        const auto text = ht::server::encode(m);
        try {
            const auto back = ht::server::decode(text);
            round_trip_failures += !(back == m) || ht::server::encode(back) != text;
        } catch (...) {
            ++round_trip_failures;
        }
        // malformed variants: a truncation and a bit flip
        std::string bad[2] = {text.substr(0, gen() % text.size()), text};
        const auto pos = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(gen);
        bad[1][pos] = static_cast<char>(bad[1][pos] ^ (1 << (gen() % 8)));
        for (const auto& b : bad) {
            try {
                ht::server::decode(b);
            } catch (const ht::Error& e) {
                rejected += e.code() == ht::ErrorCode::malformed_message;
                escaped += e.code() != ht::ErrorCode::malformed_message;
            } catch (...) {
                ++escaped;
            }
            try {
                core.receive(1 + (gen() % 3), b);  // the server answers with Error frames
            } catch (...) {
                ++escaped;
            }
        }
    }
    std::ostringstream d;
    d << kFuzzMessages << " messages, " << round_trip_failures << " round-trip failures, " << rejected
      << " malformed inputs rejected, " << escaped << " escaped";
    return {round_trip_failures == 0 && escaped == 0, d.str()};
}

// --- visibility --------------------------------------------------------------

Outcome visibility() {
    int failures = 0;
    std::int64_t firings = 0;
    for (unsigned mask = 0; mask < 16; ++mask) {
        const auto run = reference::run_disclosure_case(mask);
        firings += run.firings;
        failures += run.firings == 0;
        for (const std::string p : {"A", "B"}) {
            std::int64_t notices = 0;
            bool leak = false;
            for (const auto& text : run.transcripts.at(p).frames) {
                const auto m = ht::server::decode(text);
                const bool is_notice = std::holds_alternative<ht::server::RuleNotice>(m);
                notices += is_notice;
                leak = leak || (!run.disclosed_players.count(p) && text.find("yellowRow") != std::string::npos);
            }
            failures += leak || notices != (run.disclosed_players.count(p) ? run.firings : 0);
        }
    }
    return {failures == 0, "16 subsets, " + std::to_string(firings) + " firings, " + std::to_string(failures) +
                               " failures"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"engine-oracle-equivalence", 10, engine_equivalence},
        {"determinism-replay", 30, determinism_replay},
        {"credit-assignment", 5, credit_assignment},
        {"gradient-check", 5, gradient_check},
        {"learning-efficacy", 300, learning_efficacy},
        {"dependent-agent-learning", 300, dependent_learning},
        {"hidden-rule-semantics", 5, hidden_rules},
        {"regime-change", 10, regime_change},
        {"protocol-fuzz", 10, protocol_fuzz},
        {"visibility-soundness", 30, visibility},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = out.pass && secs < c.budget_seconds;
        failed += !pass;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << " [" << std::fixed << std::setprecision(2) << secs
                  << " s / " << std::setprecision(0) << c.budget_seconds << " s] " << out.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed;
}
