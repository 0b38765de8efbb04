#include "hybrid_tetris/session/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hybrid_tetris/engine/piece_io.hpp"
#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::session {

using nlohmann::json;

int DecisionPeriodCurve::period(int level) const {
    // the epsilon keeps 50 * 0.8 from flooring to 39
    const double raw = static_cast<double>(initial_ticks) * std::pow(decay_factor_per_level, level);
    const int floored = static_cast<int>(std::floor(raw + 1e-9));
    return std::max(min_ticks, floored);
}

std::vector<engine::PieceDef> SessionConfig::catalog() const {
    auto out = engine::default_catalog();
    for (const auto& p : pieces) {
        auto it = std::find_if(out.begin(), out.end(), [&](const engine::PieceDef& q) { return q.id == p.id; });
        if (it != out.end()) {
            *it = p;
        } else {
            out.push_back(p);
        }
    }
    return out;
}

engine::GameSetup SessionConfig::game_setup() const {
    const auto all = catalog();
    engine::GameSetup setup;
    setup.width = board_width;
    setup.height = board_height;
    setup.scoring = scoring;
    setup.pieces.clear();
    for (const auto& id : initial_pieces) {
        const auto* p = engine::find_piece(all, id);
        if (!p) {
            throw Error(ErrorCode::invalid_config, "unknown initial piece '" + id + "'");
        }
        setup.pieces.push_back(*p);
    }
    return setup;
}

void validate_config(const SessionConfig& c) {
    std::vector<std::string> problems;
    if (c.boards_per_player < 1 || c.boards_per_player > kMaxBoardsPerPlayer) {
        problems.push_back("boardsPerPlayer must be in 1..10");
    }
    if (c.board_width < 4 || c.board_height < 4 || c.board_width > 64 || c.board_height > 64) {
        problems.push_back("board dimensions must be in 4..64");
    }
    for (const auto& v : team::validate_topology(c.topology)) {
        problems.push_back(std::string("topology ") + std::string(team::violation_name(v.kind)) + ": " + v.detail);
    }
    for (const auto& p : c.topology.players) {
        const auto n = static_cast<int>(c.topology.guided_by(p.player_id).size());
        if (n != c.boards_per_player) {
            problems.push_back("player " + p.player_id + " guides " + std::to_string(n) + " agents, expected " +
                               std::to_string(c.boards_per_player));
        }
    }
    if (c.learner.architecture == learner::Architecture::mlp && c.learner.hidden_width == 0) {
        problems.push_back("mlp hiddenWidth must be positive");
    }
    if (c.learner.hyperparams.learning_rate < 0.0 || c.learner.hyperparams.buffer_capacity == 0 ||
        c.learner.hyperparams.minibatch_size == 0) {
        problems.push_back("hyperparams out of range");
    }
    if (c.initial_pieces.empty()) {
        problems.push_back("initialPieces is empty");
    }
    const auto all = c.catalog();
    for (const auto& id : c.initial_pieces) {
        if (!engine::find_piece(all, id)) {
            problems.push_back("unknown initial piece " + id);
        }
    }
    try {
        c.scoring.validate();
    } catch (const Error& e) {
        problems.push_back(e.what());
    }
    std::set<std::string> rule_ids;
    for (const auto& r : c.rules) {
        try {
            rules::validate_rule(r);
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
        if (!rule_ids.insert(r.rule_id).second) {
            problems.push_back("duplicate ruleId " + r.rule_id);
        }
    }
    try {
        rules::validate_schedule(c.regime);
    } catch (const Error& e) {
        problems.push_back(e.what());
    }
    for (const auto& e : c.regime.events) {
        for (const auto& id : e.add_pieces) {
            if (!engine::find_piece(all, id)) {
                problems.push_back("regime adds unknown piece " + id);
            }
        }
    }
    if (c.tick_hz < 1) {
        problems.push_back("tickHz must be >= 1");
    }
    if (c.decision_period.initial_ticks < 1 || c.decision_period.min_ticks < 1 ||
        !(c.decision_period.decay_factor_per_level > 0.0 && c.decision_period.decay_factor_per_level <= 1.0)) {
        problems.push_back("decisionPeriodCurve out of range");
    }
    if (c.feedback_window.min_delay_ticks < 0 || c.feedback_window.max_delay_ticks < c.feedback_window.min_delay_ticks) {
        problems.push_back("feedbackWindow must satisfy 0 <= min <= max");
    }
    if (c.freeze_budget_ticks && *c.freeze_budget_ticks < 0) {
        problems.push_back("freezeBudgetTicks must be >= 0");
    }
    if (c.max_placements_per_game < 0) {
        problems.push_back("maxPlacementsPerGame must be >= 0");
    }
    if (!problems.empty()) {
        std::string msg = "invalid session config:";
        for (const auto& p : problems) {
            msg += "\n  " + p;
        }
        throw Error(ErrorCode::invalid_config, msg);
    }
}

void to_json(json& j, const SessionConfig& c) {
    json rules = json::array();
    for (const auto& r : c.rules) {
        rules.push_back(r);
    }
    json pieces = json::array();
    for (const auto& p : c.pieces) {
        pieces.push_back(p);
    }
    j = {{"version", 1},
         {"sessionId", c.session_id},
         {"boardsPerPlayer", c.boards_per_player},
         {"boardWidth", c.board_width},
         {"boardHeight", c.board_height},
         {"topology", c.topology},
         {"learner",
          {{"architecture", c.learner.architecture == learner::Architecture::linear ? "linear" : "mlp"},
           {"hiddenWidth", c.learner.hidden_width},
           {"hyperparams", c.learner.hyperparams}}},
         {"pieces", pieces},
         {"initialPieces", c.initial_pieces},
         {"scoring", c.scoring},
         {"rules", rules},
         {"regime", c.regime},
         {"seeds", {{"masterSeed", c.master_seed}}},
         {"tickHz", c.tick_hz},
         {"decisionPeriodCurve",
          {{"initialTicks", c.decision_period.initial_ticks},
           {"minTicks", c.decision_period.min_ticks},
           {"decayFactorPerLevel", c.decision_period.decay_factor_per_level}}},
         {"feedbackWindow",
          {{"minDelayTicks", c.feedback_window.min_delay_ticks}, {"maxDelayTicks", c.feedback_window.max_delay_ticks}}},
         {"freezeBudgetTicks", c.freeze_budget_ticks ? json(*c.freeze_budget_ticks) : json(nullptr)},
         {"mode", {{"superhuman", c.mode.superhuman}, {"integrated", c.mode.integrated}}},
         {"restartOnGameOver", c.restart_on_game_over},
         {"maxPlacementsPerGame", c.max_placements_per_game}};
}

void from_json(const json& j, SessionConfig& c) {
    try {
        if (!j.is_object()) {
            throw Error(ErrorCode::invalid_config, "session config must be a JSON object");
        }
        c = SessionConfig{};
        c.session_id = j.value("sessionId", c.session_id);
        c.boards_per_player = j.value("boardsPerPlayer", c.boards_per_player);
        c.board_width = j.value("boardWidth", c.board_width);
        c.board_height = j.value("boardHeight", c.board_height);
        if (j.contains("topology")) {
            c.topology = j.at("topology").get<team::TeamTopology>();
        }
        if (j.contains("learner")) {
            const auto& l = j.at("learner");
            const auto arch = l.value("architecture", std::string("linear"));
            if (arch != "linear" && arch != "mlp") {
                throw Error(ErrorCode::invalid_config, "unknown architecture '" + arch + "'");
            }
            c.learner.architecture = arch == "linear" ? learner::Architecture::linear : learner::Architecture::mlp;
            c.learner.hidden_width = l.value("hiddenWidth", c.learner.hidden_width);
            if (l.contains("hyperparams")) {
                c.learner.hyperparams = l.at("hyperparams").get<learner::Hyperparams>();
            }
        }
        if (j.contains("pieces")) {
            c.pieces = engine::parse_pieces(j.at("pieces"));
        }
        c.initial_pieces = j.value("initialPieces", c.initial_pieces);
        if (j.contains("scoring")) {
            c.scoring = j.at("scoring").get<engine::ScoringTable>();
        }
        for (const auto& r : j.value("rules", json::array())) {
            c.rules.push_back(r.get<rules::HiddenRule>());
        }
        if (j.contains("regime")) {
            c.regime = j.at("regime").get<rules::RegimeSchedule>();
        }
        if (j.contains("seeds")) {
            c.master_seed = j.at("seeds").value("masterSeed", c.master_seed);
        }
        c.tick_hz = j.value("tickHz", c.tick_hz);
        if (j.contains("decisionPeriodCurve")) {
            const auto& d = j.at("decisionPeriodCurve");
            c.decision_period.initial_ticks = d.value("initialTicks", c.decision_period.initial_ticks);
            c.decision_period.min_ticks = d.value("minTicks", c.decision_period.min_ticks);
            c.decision_period.decay_factor_per_level =
                d.value("decayFactorPerLevel", c.decision_period.decay_factor_per_level);
        }
        c.feedback_window = learner::default_credit_window(c.tick_hz);
        if (j.contains("feedbackWindow")) {
            const auto& w = j.at("feedbackWindow");
            c.feedback_window.min_delay_ticks = w.value("minDelayTicks", c.feedback_window.min_delay_ticks);
            c.feedback_window.max_delay_ticks = w.value("maxDelayTicks", c.feedback_window.max_delay_ticks);
        }
        if (j.contains("freezeBudgetTicks") && !j.at("freezeBudgetTicks").is_null()) {
            c.freeze_budget_ticks = j.at("freezeBudgetTicks").get<std::int64_t>();
        }
        if (j.contains("mode")) {
            c.mode.superhuman = j.at("mode").value("superhuman", false);
            c.mode.integrated = j.at("mode").value("integrated", false);
        }
        c.restart_on_game_over = j.value("restartOnGameOver", c.restart_on_game_over);
        c.max_placements_per_game = j.value("maxPlacementsPerGame", c.max_placements_per_game);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed session config: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_config) {
            throw;
        }
        throw Error(ErrorCode::invalid_config, e.what());
    }
    validate_config(c);
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
    }
}

SessionConfig load_config(const std::filesystem::path& path) { return read_json_file(path).get<SessionConfig>(); }

}  // namespace hybrid_tetris::session
