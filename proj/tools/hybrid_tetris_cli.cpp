// Command-line front end: serve, headless, replay, baseline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/harness/experiment.hpp"
#include "hybrid_tetris/server/core.hpp"
#include "hybrid_tetris/server/log_store.hpp"
#include "hybrid_tetris/server/replay.hpp"
#include "hybrid_tetris/server/ws_server.hpp"
#include "hybrid_tetris/session/config.hpp"

namespace ht = hybrid_tetris;

namespace {

int run_serve(const std::string& config_path, std::uint16_t port, const std::string& log_dir, bool autostart) {
    auto config = ht::session::load_config(config_path);
    ht::server::LogStore store(log_dir, config.session_id);
    if (store.last_seq() != 0) {
        throw ht::Error(ht::ErrorCode::io_failure,
                        store.path().string() + " already holds a session; move it or pick another --log-dir");
    }
    ht::server::ServerCore core(config, &store);
    ht::server::ServeOptions opts;
    opts.port = port;
    opts.autostart = autostart;
    opts.on_listening = [&](std::uint16_t p) {
        std::cout << "session " << config.session_id << " listening on ws://0.0.0.0:" << p << "/, log "
                  << store.path().string() << std::endl;
    };
    ht::server::serve(core, opts);
    std::cout << "session ended at tick " << core.session().tick() << std::endl;
    return 0;
}

int run_headless(const std::string& config_path, int episodes, std::uint64_t seed, const std::string& out,
                 const std::string& log_dir, int top_m, double press_probability, int max_placements) {
    const auto config = ht::session::load_config(config_path);
    ht::harness::ExperimentOptions opts;
    opts.eval.games = episodes;
    opts.eval.max_placements = max_placements;
    opts.oracle.top_m = top_m;
    opts.oracle.press_probability = press_probability;
    if (!log_dir.empty()) {
        opts.log_dir = log_dir;
    }
    const auto report = ht::harness::run_experiment(config, seed, opts);
    ht::harness::write_csv(report, out);
    for (const auto& c : report.checkpoints) {
        std::cout << "checkpoint " << c.checkpoint << " (tick " << c.tick << ")";
        for (const auto& a : c.agents) {
            std::cout << "  agent " << a.agent_id << ": median " << a.lines.median << " agree " << a.agreement;
        }
        std::cout << '\n';
    }
    std::cout << "wrote " << out << " in " << report.wall_seconds << " s"
              << (report.completed ? "" : " (training stopped at the tick limit)") << std::endl;
    return report.completed ? 0 : 3;
}

int run_replay(const std::string& log_path, bool verify) {
    if (!verify) {
        const auto events = ht::server::read_log(log_path);
        std::cout << events.size() << " events, last tick " << (events.empty() ? 0 : events.back().tick) << std::endl;
        return 0;
    }
    const auto result = ht::server::replay_verify(log_path);
    if (result.ok) {
        std::cout << "ok" << std::endl;
        return 0;
    }
    std::cout << "mismatch seq=" << result.seq << " field=" << result.field << " (" << result.detail << ")"
              << std::endl;
    return 1;
}

int run_baseline(const std::string& config_path, int games, std::uint64_t seed, int max_placements) {
    const auto config = ht::session::load_config(config_path);
    const auto stats = ht::harness::baseline_random(config, games, seed, max_placements);
    nlohmann::json out{{"games", games}, {"seed", seed}, {"median", stats.median}, {"mean", stats.mean},
                       {"lines", stats.lines}};
    std::cout << out.dump() << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid Team Tetris platform"};
    app.require_subcommand(1);

    std::string config_path;
    std::string log_dir = "logs";
    std::uint16_t port = 8080;
    bool autostart = false;
    auto* serve = app.add_subcommand("serve", "Run the authoritative WebSocket server");
    serve->add_option("--config", config_path, "Session config JSON")->required()->check(CLI::ExistingFile);
    serve->add_option("--port", port, "TCP port")->envname("PORT");
    serve->add_option("--log-dir", log_dir, "Directory for {sessionId}.jsonl")->envname("LOG_DIR");
    serve->add_flag("--autostart", autostart, "Start the clock without waiting for every player's Ready");

    int episodes = 50;
    std::uint64_t seed = 1;
    std::string out = "experiment.csv";
    std::string headless_logs;
    int top_m = 1;
    double press_probability = 1.0;
    int max_placements = 500;
    auto* headless = app.add_subcommand("headless", "Train with oracle trainers and evaluate checkpoints");
    headless->add_option("--config", config_path, "Session config JSON")->required()->check(CLI::ExistingFile);
    headless->add_option("--episodes", episodes, "Evaluation games per checkpoint")->check(CLI::PositiveNumber);
    headless->add_option("--seed", seed, "Experiment seed");
    headless->add_option("--out", out, "CSV output path");
    headless->add_option("--log-dir", headless_logs, "Write the JSONL event log here")->envname("LOG_DIR");
    headless->add_option("--top-m", top_m, "Oracle presses iff the placement ranks in its top M")
        ->check(CLI::PositiveNumber);
    headless->add_option("--press-probability", press_probability, "Oracle press gate")->check(CLI::Range(0.0, 1.0));
    headless->add_option("--max-placements", max_placements, "Placement cap per evaluation game (0 = none)");

    std::string log_path;
    bool verify = false;
    auto* replay = app.add_subcommand("replay", "Read or verify a JSONL session log");
    replay->add_option("--log", log_path, "Log file")->required()->check(CLI::ExistingFile);
    replay->add_flag("--verify", verify, "Rebuild the session from the log and compare every event");

    int games = 50;
    auto* baseline = app.add_subcommand("baseline", "Random-placement baseline");
    baseline->add_option("--config", config_path, "Session config JSON")->required()->check(CLI::ExistingFile);
    baseline->add_option("--games", games, "Games")->check(CLI::PositiveNumber);
    baseline->add_option("--seed", seed, "Seed");
    baseline->add_option("--max-placements", max_placements, "Placement cap per game (0 = none)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            return run_serve(config_path, port, log_dir, autostart);
        }
        if (*headless) {
            return run_headless(config_path, episodes, seed, out, headless_logs, top_m, press_probability,
                                max_placements);
        }
        if (*replay) {
            return run_replay(log_path, verify);
        }
        if (*baseline) {
            return run_baseline(config_path, games, seed, max_placements);
        }
    } catch (const ht::Error& e) {
        std::cerr << ht::error_code_name(e.code()) << ": " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
