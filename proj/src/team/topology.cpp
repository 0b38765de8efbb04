#include "hybrid_tetris/team/topology.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::team {

using nlohmann::json;

const AgentInfo* TeamTopology::find_agent(const std::string& agent_id) const {
    for (const auto& a : agents) {
        if (a.agent_id == agent_id) {
            return &a;
        }
    }
    return nullptr;
}

const PlayerInfo* TeamTopology::find_player(const std::string& player_id) const {
    for (const auto& p : players) {
        if (p.player_id == player_id) {
            return &p;
        }
    }
    return nullptr;
}

std::optional<std::string> TeamTopology::guiding_player(const std::string& agent_id) const {
    for (const auto& [player, agent] : guidance) {
        if (agent == agent_id) {
            return player;
        }
    }
    return std::nullopt;
}

std::vector<std::string> TeamTopology::guided_by(const std::string& player_id) const {
    std::vector<std::string> out;
    for (const auto& a : agents) {
        for (const auto& [player, agent] : guidance) {
            if (player == player_id && agent == a.agent_id) {
                out.push_back(a.agent_id);
                break;
            }
        }
    }
    return out;
}

std::vector<std::string> TeamTopology::parents(const std::string& dependent_id) const {
    std::vector<std::string> out;
    for (const auto& [dep, parent] : dependency) {
        if (dep == dependent_id) {
            out.push_back(parent);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> TeamTopology::descendants(const std::string& agent_id) const {
    std::set<std::string> reached;
    std::vector<std::string> frontier{agent_id};
    while (!frontier.empty()) {
        const std::string current = frontier.back();
        frontier.pop_back();
        for (const auto& [dep, parent] : dependency) {
            if (parent == current && dep != agent_id && reached.insert(dep).second) {
                frontier.push_back(dep);
            }
        }
    }
    std::vector<std::string> out;
    for (const auto& a : agents) {
        if (reached.count(a.agent_id)) {
            out.push_back(a.agent_id);
        }
    }
    return out;
}

TeamTopology figure1_topology(AggregationMode mode) {
    TeamTopology t;
    t.players = {{"A", "Player A"}, {"B", "Player B"}};
    for (const char* id : {"1", "2", "3", "4"}) {
        t.agents.push_back({id, AgentKind::guided});
    }
    t.agents.push_back({"5", AgentKind::dependent});
    t.guidance = {{"A", "1"}, {"A", "2"}, {"B", "3"}, {"B", "4"}};
    t.dependency = {{"5", "1"}, {"5", "2"}, {"5", "3"}, {"5", "4"}};
    t.aggregation_mode = mode;
    return t;
}

std::string_view violation_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::duplicate_id: return "duplicateId";
        case ViolationKind::unknown_player: return "unknownPlayer";
        case ViolationKind::unknown_agent: return "unknownAgent";
        case ViolationKind::unguided_agent: return "unguidedAgent";
        case ViolationKind::multi_guided_agent: return "multiGuidedAgent";
        case ViolationKind::player_guides_dependent: return "playerGuidesDependent";
        case ViolationKind::orphan_dependent: return "orphanDependent";
        case ViolationKind::guided_with_parent: return "guidedWithParent";
        case ViolationKind::cycle: return "cycle";
    }
    return "unknown";
}

std::vector<Violation> validate_topology(const TeamTopology& t) {
    std::vector<Violation> out;
    std::set<std::string> seen_players, seen_agents;
    for (const auto& p : t.players) {
        if (!seen_players.insert(p.player_id).second) {
            out.push_back({ViolationKind::duplicate_id, "player " + p.player_id});
        }
    }
    for (const auto& a : t.agents) {
        if (!seen_agents.insert(a.agent_id).second) {
            out.push_back({ViolationKind::duplicate_id, "agent " + a.agent_id});
        }
    }

    std::map<std::string, int> guides;
    for (const auto& [player, agent] : t.guidance) {
        if (!t.find_player(player)) {
            out.push_back({ViolationKind::unknown_player, player});
        }
        const AgentInfo* a = t.find_agent(agent);
        if (!a) {
            out.push_back({ViolationKind::unknown_agent, agent});
            continue;
        }
        if (a->kind == AgentKind::dependent) {
            out.push_back({ViolationKind::player_guides_dependent, player + " -> " + agent});
        }
        ++guides[agent];
    }
    for (const auto& a : t.agents) {
        if (a.kind != AgentKind::guided) {
            continue;
        }
        if (guides[a.agent_id] == 0) {
            out.push_back({ViolationKind::unguided_agent, a.agent_id});
        } else if (guides[a.agent_id] > 1) {
            out.push_back({ViolationKind::multi_guided_agent, a.agent_id});
        }
    }

    for (const auto& [dep, parent] : t.dependency) {
        const AgentInfo* d = t.find_agent(dep);
        if (!d) {
            out.push_back({ViolationKind::unknown_agent, dep});
        } else if (d->kind == AgentKind::guided) {
            out.push_back({ViolationKind::guided_with_parent, dep + " -> " + parent});
        }
        if (!t.find_agent(parent)) {
            out.push_back({ViolationKind::unknown_agent, parent});
        }
    }
    for (const auto& a : t.agents) {
        if (a.kind == AgentKind::dependent && t.parents(a.agent_id).empty()) {
            out.push_back({ViolationKind::orphan_dependent, a.agent_id});
        }
    }

    // Depth-first search over dependent -> parent edges.
    std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
    bool cyclic = false;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        state[id] = 1;
        for (const auto& p : t.parents(id)) {
            if (state[p] == 1) {
                cyclic = true;
            } else if (state[p] == 0) {
                visit(p);
            }
        }
        state[id] = 2;
    };
    for (const auto& a : t.agents) {
        if (state[a.agent_id] == 0) {
            visit(a.agent_id);
        }
    }
    if (cyclic) {
        out.push_back({ViolationKind::cycle, "dependency edges contain a cycle"});
    }
    return out;
}

std::vector<RoutedSamples> route_feedback(const TeamTopology& t, const learner::FeedbackEvent& feedback,
                                          const GameHistories& histories, learner::CreditWindow window) {
    const AgentInfo* agent = t.find_agent(feedback.game_id);
    if (!agent) {
        throw Error(ErrorCode::unknown_game, "no game '" + feedback.game_id + "'");
    }
    if (agent->kind == AgentKind::dependent) {
        throw Error(ErrorCode::feedback_on_dependent_game,
                    "game '" + feedback.game_id + "' belongs to a dependent agent");
    }
    static const std::vector<learner::DecisionRecord> none;
    const auto it = histories.find(feedback.game_id);
    const auto& history = it == histories.end() ? none : it->second;
    auto samples = learner::credit_assign(history, feedback, window);

    std::vector<RoutedSamples> out;
    out.push_back({agent->agent_id, samples});
    if (t.aggregation_mode == AggregationMode::sample_union) {
        for (const auto& d : t.descendants(agent->agent_id)) {
            out.push_back({d, samples});
        }
    }
    return out;
}

learner::RewardModel consensus_step(const TeamTopology& t,
                                    const std::map<std::string, learner::RewardModel>& models,
                                    const std::string& dependent_id) {
    if (t.aggregation_mode != AggregationMode::parameter_consensus) {
        throw Error(ErrorCode::invalid_config, "consensus_step requires parameterConsensus mode");
    }
    const auto self = models.find(dependent_id);
    if (self == models.end()) {
        throw Error(ErrorCode::unknown_game, "no model for agent '" + dependent_id + "'");
    }
    const auto parents = t.parents(dependent_id);
    if (parents.empty()) {
        return self->second;
    }
    std::vector<double> sum(self->second.weights().size(), 0.0);
    for (const auto& p : parents) {
        const auto it = models.find(p);
        if (it == models.end()) {
            throw Error(ErrorCode::unknown_game, "no model for agent '" + p + "'");
        }
        const auto& m = it->second;
        if (m.architecture() != self->second.architecture() || m.input_size() != self->second.input_size() ||
            m.hidden_width() != self->second.hidden_width()) {
            throw Error(ErrorCode::architecture_mismatch,
                        "agent '" + p + "' does not share the architecture of '" + dependent_id + "'");
        }
        for (std::size_t k = 0; k < sum.size(); ++k) {
            sum[k] += m.weights()[k];
        }
    }
    for (auto& v : sum) {
        v /= static_cast<double>(parents.size());
    }
    auto out = self->second;
    out.set_weights(std::move(sum));
    return out;
}

std::string_view mode_name(AggregationMode mode) {
    return mode == AggregationMode::sample_union ? "sampleUnion" : "parameterConsensus";
}

void to_json(json& j, const TeamTopology& t) {
    json players = json::array();
    for (const auto& p : t.players) {
        players.push_back({{"playerId", p.player_id}, {"name", p.name}});
    }
    json agents = json::array();
    for (const auto& a : t.agents) {
        agents.push_back({{"agentId", a.agent_id}, {"kind", a.kind == AgentKind::guided ? "guided" : "dependent"}});
    }
    json guidance = json::array();
    for (const auto& [p, a] : t.guidance) {
        guidance.push_back({p, a});
    }
    json dependency = json::array();
    for (const auto& [d, p] : t.dependency) {
        dependency.push_back({d, p});
    }
    j = {{"players", players},
         {"agents", agents},
         {"guidance", guidance},
         {"dependency", dependency},
         {"aggregationMode", mode_name(t.aggregation_mode)}};
}

void from_json(const json& j, TeamTopology& t) {
    try {
        t = TeamTopology{};
        for (const auto& p : j.at("players")) {
            t.players.push_back({p.at("playerId").get<std::string>(), p.value("name", p.at("playerId").get<std::string>())});
        }
        for (const auto& a : j.at("agents")) {
            const auto kind = a.value("kind", std::string("guided"));
            if (kind != "guided" && kind != "dependent") {
                throw Error(ErrorCode::invalid_config, "unknown agent kind '" + kind + "'");
            }
            t.agents.push_back({a.at("agentId").get<std::string>(),
                                kind == "guided" ? AgentKind::guided : AgentKind::dependent});
        }
        for (const auto& e : j.value("guidance", json::array())) {
            t.guidance.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
        for (const auto& e : j.value("dependency", json::array())) {
            t.dependency.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
        const auto mode = j.value("aggregationMode", std::string("sampleUnion"));
        if (mode == "sampleUnion") {
            t.aggregation_mode = AggregationMode::sample_union;
        } else if (mode == "parameterConsensus") {
            t.aggregation_mode = AggregationMode::parameter_consensus;
        } else {
            throw Error(ErrorCode::invalid_config, "unknown aggregationMode '" + mode + "'");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed topology: ") + e.what());
    }
}

}  // namespace hybrid_tetris::team
