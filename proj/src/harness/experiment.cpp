#include "hybrid_tetris/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/hash.hpp"
#include "hybrid_tetris/learner/policy.hpp"
#include "hybrid_tetris/server/log_store.hpp"
#include "hybrid_tetris/session/session.hpp"

namespace hybrid_tetris::harness {

namespace {

constexpr std::uint64_t kTopBit = 1ULL << 63;
constexpr std::uint64_t kBaselineSalt = 0x5851f42d4c957f2dULL;
constexpr std::uint64_t kAgreementSalt = 0x14057b7ef767814fULL;
constexpr std::uint64_t kPressSalt = 0x2545f4914f6cdd1dULL;
constexpr int kStatesPerGame = 100;

struct Press {
    std::int64_t tick = 0;
    std::string player_id;
    int board = 0;
    std::string agent_id;
};

struct Snapshot {
    int checkpoint = 0;
    std::int64_t tick = 0;
    int feedback_count = 0;
    learner::RewardModel model;
};

}  // namespace

std::int64_t lower_median(std::vector<std::int64_t> values) {
    if (values.empty()) {
        return 0;
    }
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

std::uint64_t evaluation_seed(std::uint64_t seed, int game) {
    return mix_seed(seed ^ (static_cast<std::uint64_t>(game) << 40) ^ 0x9e3779b97f4a7c15ULL) | kTopBit;
}

namespace {

template <typename Choose>
LineStats play_games(const engine::GameSetup& setup, std::uint64_t seed, int games, int max_placements,
                     Choose&& choose) {
    LineStats stats;
    for (int g = 0; g < games; ++g) {
        auto state = engine::new_game(setup, evaluation_seed(seed, g));
        while (state.status == engine::GameStatus::active &&
               (max_placements <= 0 || state.turn < max_placements)) {
            state = engine::apply_placement(state, choose(state, g)).first;
        }
        stats.lines.push_back(state.total_lines);
    }
    stats.median = lower_median(stats.lines);
    stats.mean = stats.lines.empty()
                     ? 0.0
                     : static_cast<double>(std::accumulate(stats.lines.begin(), stats.lines.end(), std::int64_t{0})) /
                           static_cast<double>(stats.lines.size());
    return stats;
}

}  // namespace

LineStats evaluate_model(const learner::RewardModel& model, const engine::GameSetup& setup, std::uint64_t seed,
                         const EvalSettings& eval) {
    return play_games(setup, seed, eval.games, eval.max_placements,
                      [&](const engine::GameState& s, int) { return learner::select_action(model, s); });
}

LineStats baseline_random(const session::SessionConfig& config, int games, std::uint64_t seed, int max_placements) {
    const auto setup = config.game_setup();
    std::vector<Rng> rngs;
    for (int g = 0; g < games; ++g) {
        rngs.emplace_back(mix_seed(seed ^ kBaselineSalt ^ static_cast<std::uint64_t>(g)));
    }
    return play_games(setup, seed, games, max_placements, [&](const engine::GameState& s, int g) {
        const auto legal = engine::enumerate_placements(s.board, s.current_piece);
        if (legal.empty()) {
            throw Error(ErrorCode::no_legal_placement, "no legal placement for " + s.current_piece.id);
        }
        return legal[rngs[static_cast<std::size_t>(g)].below(legal.size())];
    });
}

std::vector<engine::GameState> oracle_states(const engine::GameSetup& setup, const std::vector<double>& weights,
                                             std::uint64_t seed, int count) {
    std::vector<engine::GameState> out;
    for (int g = 0; static_cast<int>(out.size()) < count; ++g) {
        auto state = engine::new_game(setup, evaluation_seed(seed ^ kAgreementSalt, g));
        for (int i = 0; i < kStatesPerGame && state.status == engine::GameStatus::active &&
                        static_cast<int>(out.size()) < count;
             ++i) {
            out.push_back(state);
            state = engine::apply_placement(
                        state, learner::select_by_weights(weights, state.board, state.current_piece))
                        .first;
        }
        if (g > 100 * count) {
            break;  // oracle tops out instantly; keep what we have
        }
    }
    return out;
}

double oracle_agreement(const learner::RewardModel& model, const std::vector<engine::GameState>& states,
                        const std::vector<double>& weights) {
    if (states.empty()) {
        return 0.0;
    }
    int agree = 0;
    for (const auto& s : states) {
        agree += oracle_rank(weights, s.board, s.current_piece, learner::select_action(model, s)) == 1;
    }
    return static_cast<double>(agree) / static_cast<double>(states.size());
}

const AgentMetrics& ExperimentReport::at(int checkpoint, const std::string& agent_id) const {
    for (const auto& c : checkpoints) {
        if (c.checkpoint != checkpoint) {
            continue;
        }
        for (const auto& a : c.agents) {
            if (a.agent_id == agent_id) {
                return a;
            }
        }
    }
    throw Error(ErrorCode::unknown_game, "no metrics for agent " + agent_id + " at checkpoint " +
                                             std::to_string(checkpoint));
}

std::string config_digest(const session::SessionConfig& config) {
    Fnv1a h;
    h.str(nlohmann::json(config).dump());
    return to_hex(h.value());
}

ExperimentReport run_experiment(const session::SessionConfig& config, std::uint64_t seed,
                                const ExperimentOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    if (options.checkpoints.empty() || options.oracle.top_m < 1 || options.oracle.reaction_ticks < 0 ||
        options.oracle.press_probability < 0.0 || options.oracle.press_probability > 1.0 ||
        !std::is_sorted(options.checkpoints.begin(), options.checkpoints.end())) {
        throw Error(ErrorCode::invalid_config, "invalid experiment options");
    }
    session::validate_config(config);

    ExperimentReport report;
    report.config_digest = config_digest(config);
    report.seed = seed;

    auto cfg = config;
    cfg.master_seed = seed;
    cfg.restart_on_game_over = true;
    session::Session s(cfg);
    const auto& topo = cfg.topology;
    const auto weights = oracle_weights(options.oracle, cfg.board_width, cfg.board_height);
    const int target = options.checkpoints.back();

    std::map<std::string, int> credited;  // human feedback credited, guided agents
    std::map<std::string, int> queued;    // scheduled but not yet pressed
    std::map<std::string, int> batches;   // CreditedBatches routed to each agent
    std::map<std::string, std::vector<Snapshot>> snaps;
    std::deque<Press> presses;
    Rng press_rng(mix_seed(seed ^ kPressSalt));

    s.set_observer([&](const session::DecisionInfo& d) {
        const auto& slot = d.slot;
        if (slot.kind != team::AgentKind::guided || !slot.owner) {
            return;
        }
        if (credited[slot.game_id] + queued[slot.game_id] >= target) {
            return;
        }
        if (!oracle_decide(options.oracle, slot.state, d.chosen, press_rng)) {
            return;
        }
        const auto boards = topo.guided_by(*slot.owner);
        const auto idx = std::find(boards.begin(), boards.end(), slot.game_id) - boards.begin();
        presses.push_back({d.tick + options.oracle.reaction_ticks, *slot.owner, static_cast<int>(idx), slot.game_id});
        ++queued[slot.game_id];
    });

    auto take_snapshots = [&] {
        bool done = true;
        for (const auto& a : topo.agents) {
            auto& list = snaps[a.agent_id];
            while (list.size() < options.checkpoints.size()) {
                const int cp = options.checkpoints[list.size()];
                bool reached = true;
                if (a.kind == team::AgentKind::guided) {
                    reached = credited[a.agent_id] >= cp;
                } else {
                    for (const auto& p : topo.parents(a.agent_id)) {
                        reached = reached && snaps[p].size() > list.size();
                    }
                }
                if (!reached) {
                    break;
                }
                const int count = a.kind == team::AgentKind::guided ? credited[a.agent_id] : batches[a.agent_id];
                list.push_back({cp, s.tick(), count, s.model(a.agent_id)});
            }
            done = done && list.size() == options.checkpoints.size();
        }
        return done;
    };

    bool done = take_snapshots();
    while (!done && s.tick() < options.max_ticks) {
        s.advance(1);
        done = take_snapshots();
        if (done) {
            break;
        }
        while (!presses.empty() && presses.front().tick <= s.tick()) {
            const auto p = presses.front();
            presses.pop_front();
            --queued[p.agent_id];
            if (credited[p.agent_id] >= target) {
                continue;
            }
            s.handle_key(p.player_id, session::Key::digit_key(p.board));
            for (const auto& e : s.handle_key(p.player_id, session::Key::enter())) {
                if (e.kind == session::EventKind::feedback_key && e.payload.at("credited").get<bool>()) {
                    ++credited[p.agent_id];
                }
            }
        }
        for (auto it = s.events().rbegin(); it != s.events().rend() && it->tick == s.tick(); ++it) {
            if (it->kind == session::EventKind::credited_batch) {
                ++batches[it->payload.at("agentId").get<std::string>()];
            }
        }
    }
    report.completed = done;
    report.training_ticks = s.tick();
    if (!s.ended()) {
        s.end();
    }

    if (options.log_dir) {
        server::LogStore store(*options.log_dir, cfg.session_id + "-" + std::to_string(seed));
        if (store.last_seq() != 0) {
            throw Error(ErrorCode::io_failure, "log " + store.path().string() + " already exists");
        }
        for (const auto& e : s.events()) {
            store.append(e);
        }
    }

    const auto setup = cfg.game_setup();
    const auto states = oracle_states(setup, weights, seed, options.agreement_states);
    for (std::size_t i = 0; i < options.checkpoints.size(); ++i) {
        CheckpointMetrics cm;
        cm.checkpoint = options.checkpoints[i];
        for (const auto& a : topo.agents) {
            const auto& list = snaps[a.agent_id];
            if (i >= list.size()) {
                continue;
            }
            const auto& snap = list[i];
            cm.tick = std::max(cm.tick, snap.tick);
            AgentMetrics m;
            m.agent_id = a.agent_id;
            m.kind = a.kind == team::AgentKind::guided ? "guided" : "dependent";
            m.feedback_count = snap.feedback_count;
            m.lines = evaluate_model(snap.model, setup, seed, options.eval);
            m.agreement = oracle_agreement(snap.model, states, weights);
            m.model_digest = to_hex(learner::weights_digest(snap.model));
            cm.agents.push_back(std::move(m));
        }
        report.checkpoints.push_back(std::move(cm));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "configDigest,seed,checkpoint,tick,agentId,kind,feedbackCount,medianLines,meanLines,oracleAgreement,"
           "modelDigest\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& c : report.checkpoints) {
        for (const auto& a : c.agents) {
            out << report.config_digest << ',' << report.seed << ',' << c.checkpoint << ',' << c.tick << ','
                << a.agent_id << ',' << a.kind << ',' << a.feedback_count << ',' << a.lines.median << ','
                << a.lines.mean << ',' << a.agreement << ',' << a.model_digest << '\n';
        }
    }
    return out.str();
}

void write_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << report_csv(report);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write " + path.string());
    }
}

}  // namespace hybrid_tetris::harness
