#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybrid_tetris/harness/oracle.hpp"
#include "hybrid_tetris/learner/reward_model.hpp"
#include "hybrid_tetris/session/config.hpp"

namespace hybrid_tetris::harness {

struct LineStats {
    std::int64_t median = 0;  // lower median
    double mean = 0.0;
    std::vector<std::int64_t> lines;  // per game, in seed order

    bool operator==(const LineStats&) const = default;
};

// Lower median of a sample (the smaller middle value for even sizes).
std::int64_t lower_median(std::vector<std::int64_t> values);

struct EvalSettings {
    int games = 50;
    int max_placements = 500;  // per game; 0 = unbounded
};

// Evaluation game seeds have the top bit set; training seeds never do.
std::uint64_t evaluation_seed(std::uint64_t seed, int game);

// Greedy play with a frozen model over the evaluation seeds. Never trains.
LineStats evaluate_model(const learner::RewardModel& model, const engine::GameSetup& setup, std::uint64_t seed,
                         const EvalSettings& eval);

// Uniform-random legal placement on the same evaluation seeds.
LineStats baseline_random(const session::SessionConfig& config, int games, std::uint64_t seed,
                          int max_placements = 500);

// States visited by the oracle's own greedy play, for agreement scoring.
std::vector<engine::GameState> oracle_states(const engine::GameSetup& setup, const std::vector<double>& weights,
                                             std::uint64_t seed, int count);

// Fraction of states where the model's choice is the oracle's top choice.
double oracle_agreement(const learner::RewardModel& model, const std::vector<engine::GameState>& states,
                        const std::vector<double>& weights);

struct ExperimentOptions {
    OracleTrainer oracle;
    std::vector<int> checkpoints{0, 50, 100, 200, 300};  // feedback events per guided agent
    EvalSettings eval;
    int agreement_states = 300;
    std::int64_t max_ticks = 5'000'000;  // safety stop for the training loop
    std::optional<std::filesystem::path> log_dir;  // JSONL event log
};

struct AgentMetrics {
    std::string agent_id;
    std::string kind;  // "guided" or "dependent"
    int feedback_count = 0;  // credited feedback events routed to the agent
    LineStats lines;
    double agreement = 0.0;
    std::string model_digest;
};

struct CheckpointMetrics {
    int checkpoint = 0;  // feedback events per guided agent
    std::int64_t tick = 0;
    std::vector<AgentMetrics> agents;  // topology order
};

struct ExperimentReport {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<CheckpointMetrics> checkpoints;
    std::int64_t training_ticks = 0;
    bool completed = true;  // false when max_ticks ran out first
    double wall_seconds = 0.0;  // not written to the CSV

    const AgentMetrics& at(int checkpoint, const std::string& agent_id) const;
};

// Runs the session loop headless with one oracle trainer per player: after
// each decision of a guided agent the oracle judges the placement and, on a
// press, its player sends the board digit then ENTER reaction_ticks later.
// Presses stop once an agent has the last checkpoint's count. A guided
// agent is snapshotted on the tick its own credited count reaches a
// checkpoint (after that update is applied); a dependent agent once all its
// parents have.
// The config's master seed is replaced by `seed`, and games restart on game
// over so training can run to the last checkpoint.
ExperimentReport run_experiment(const session::SessionConfig& config, std::uint64_t seed,
                                const ExperimentOptions& options);

// One row per (checkpoint, agent). Deterministic: no wall time.
std::string report_csv(const ExperimentReport& report);
void write_csv(const ExperimentReport& report, const std::filesystem::path& path);

std::string config_digest(const session::SessionConfig& config);

}  // namespace hybrid_tetris::harness
