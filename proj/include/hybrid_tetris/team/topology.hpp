#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hybrid_tetris/learner/credit.hpp"
#include "hybrid_tetris/learner/reward_model.hpp"

namespace hybrid_tetris::team {

enum class AgentKind { guided, dependent };
enum class AggregationMode { sample_union, parameter_consensus };

struct PlayerInfo {
    std::string player_id;
    std::string name;

    bool operator==(const PlayerInfo&) const = default;
};

struct AgentInfo {
    std::string agent_id;
    AgentKind kind = AgentKind::guided;

    bool operator==(const AgentInfo&) const = default;
};

struct TeamTopology {
    std::vector<PlayerInfo> players;
    std::vector<AgentInfo> agents;
    // (playerId, agentId)
    std::vector<std::pair<std::string, std::string>> guidance;
    // (dependentId, parentId)
    std::vector<std::pair<std::string, std::string>> dependency;
    AggregationMode aggregation_mode = AggregationMode::sample_union;

    const AgentInfo* find_agent(const std::string& agent_id) const;
    const PlayerInfo* find_player(const std::string& player_id) const;

    // The single guiding player, if any.
    std::optional<std::string> guiding_player(const std::string& agent_id) const;
    // Agents guided by a player, in agent order.
    std::vector<std::string> guided_by(const std::string& player_id) const;
    // Direct parents, sorted by id.
    std::vector<std::string> parents(const std::string& dependent_id) const;
    // Transitive dependents of an agent, in agent order.
    std::vector<std::string> descendants(const std::string& agent_id) const;

    bool operator==(const TeamTopology&) const = default;
};

// Players A, B; A guides 1 and 2, B guides 3 and 4; 5 depends on 1-4.
TeamTopology figure1_topology(AggregationMode mode = AggregationMode::sample_union);

enum class ViolationKind {
    duplicate_id,
    unknown_player,
    unknown_agent,
    unguided_agent,
    multi_guided_agent,
    player_guides_dependent,
    orphan_dependent,
    guided_with_parent,
    cycle,
};

struct Violation {
    ViolationKind kind;
    std::string detail;
};

std::string_view violation_name(ViolationKind kind);

// Empty result means the topology is valid.
std::vector<Violation> validate_topology(const TeamTopology& topology);

// Per-game decision histories keyed by game id (equal to the agent id).
using GameHistories = std::map<std::string, std::vector<learner::DecisionRecord>>;

struct RoutedSamples {
    std::string agent_id;
    std::vector<learner::CreditedSample> samples;
};

// Credits the feedback against its own game's history and delivers the
// samples to the guided agent, plus every transitive dependent under
// sample_union.
// Throws Error(unknown_game), Error(feedback_on_dependent_game) and
// Error(no_eligible_decisions).
std::vector<RoutedSamples> route_feedback(const TeamTopology& topology, const learner::FeedbackEvent& feedback,
                                          const GameHistories& histories, learner::CreditWindow window);

// Dependent model with weights set to the mean of its parents' weights.
// Parent weights are summed in id order.
// Throws Error(architecture_mismatch), Error(unknown_game) when a model is
// missing and Error(invalid_config) outside parameter_consensus mode.
learner::RewardModel consensus_step(const TeamTopology& topology,
                                    const std::map<std::string, learner::RewardModel>& models,
                                    const std::string& dependent_id);

std::string_view mode_name(AggregationMode mode);

void to_json(nlohmann::json& j, const TeamTopology& t);
// Throws Error(invalid_config) on malformed input.
void from_json(const nlohmann::json& j, TeamTopology& t);

}  // namespace hybrid_tetris::team
