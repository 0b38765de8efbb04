#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/team/topology.hpp"

using namespace hybrid_tetris;
using namespace hybrid_tetris::team;
using learner::CreditWindow;
using learner::DecisionRecord;
using learner::FeatureVector;
using learner::FeedbackEvent;
using learner::FeedbackSource;

namespace {

bool has(const std::vector<Violation>& v, ViolationKind kind) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

GameHistories histories_for(const TeamTopology& t) {
    GameHistories h;
    for (const auto& a : t.agents) {
        for (int turn = 0; turn < 3; ++turn) {
            h[a.agent_id].push_back({a.agent_id, turn, FeatureVector(21, 0.1 * turn), {}, 50 * (turn + 1)});
        }
    }
    return h;
}

FeedbackEvent press(const std::string& game, std::int64_t tick = 160) {
    return {game, tick, 1.0, FeedbackSource::human, "A"};
}

std::set<std::string> targets(const std::vector<RoutedSamples>& routed) {
    std::set<std::string> out;
    for (const auto& r : routed) {
        out.insert(r.agent_id);
    }
    return out;
}

}  // namespace

TEST_CASE("figure 1 topology is valid") {
    const auto t = figure1_topology();
    CHECK(validate_topology(t).empty());
    CHECK(t.guided_by("A") == std::vector<std::string>{"1", "2"});
    CHECK(t.guided_by("B") == std::vector<std::string>{"3", "4"});
    CHECK(t.parents("5") == std::vector<std::string>{"1", "2", "3", "4"});
    CHECK(t.guiding_player("3") == std::optional<std::string>("B"));
    CHECK(!t.guiding_player("5"));
}

TEST_CASE("validate_topology reports violations") {
    auto t = figure1_topology();
    t.agents.push_back({"6", AgentKind::dependent});
    t.dependency.push_back({"5", "6"});
    t.dependency.push_back({"6", "5"});
    auto v = validate_topology(t);
    CHECK(has(v, ViolationKind::cycle));

    t = figure1_topology();
    t.guidance.push_back({"B", "1"});
    CHECK(has(validate_topology(t), ViolationKind::multi_guided_agent));

    t = figure1_topology();
    t.guidance.push_back({"A", "5"});
    CHECK(has(validate_topology(t), ViolationKind::player_guides_dependent));

    t = figure1_topology();
    t.agents.push_back({"7", AgentKind::dependent});
    CHECK(has(validate_topology(t), ViolationKind::orphan_dependent));

    t = figure1_topology();
    t.agents.push_back({"8", AgentKind::guided});
    CHECK(has(validate_topology(t), ViolationKind::unguided_agent));

    t = figure1_topology();
    t.guidance.push_back({"Z", "1"});
    v = validate_topology(t);
    CHECK(has(v, ViolationKind::unknown_player));

    t = figure1_topology();
    t.agents.push_back({"1", AgentKind::guided});
    CHECK(has(validate_topology(t), ViolationKind::duplicate_id));

    t = figure1_topology();
    t.dependency.push_back({"2", "1"});
    CHECK(has(validate_topology(t), ViolationKind::guided_with_parent));
}

TEST_CASE("route_feedback examples") {
    const auto t = figure1_topology();
    const auto h = histories_for(t);
    const CreditWindow window{10, 150};
    CHECK(targets(route_feedback(t, press("1"), h, window)) == std::set<std::string>{"1", "5"});
    CHECK(targets(route_feedback(t, press("3"), h, window)) == std::set<std::string>{"3", "5"});
    CHECK_THROWS_AS(route_feedback(t, press("5"), h, window), Error);
    try {
        route_feedback(t, press("5"), h, window);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::feedback_on_dependent_game);
    }
    CHECK_THROWS_AS(route_feedback(t, press("9"), h, window), Error);

    // dependents receive exactly the guided agent's samples
    const auto routed = route_feedback(t, press("2"), h, window);
    REQUIRE(routed.size() == 2);
    CHECK(routed[0].agent_id == "2");
    CHECK(routed[0].samples == routed[1].samples);

    const auto consensus = figure1_topology(AggregationMode::parameter_consensus);
    CHECK(targets(route_feedback(consensus, press("1"), h, window)) == std::set<std::string>{"1"});
}

TEST_CASE("routing conservation on random topologies") {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 300; ++trial) {
        TeamTopology t;
        const int players = 1 + static_cast<int>(gen() % 3);
        const int guided = 1 + static_cast<int>(gen() % 5);
        const int dependents = static_cast<int>(gen() % 4);
        for (int p = 0; p < players; ++p) {
            t.players.push_back({"P" + std::to_string(p), ""});
        }
        for (int a = 0; a < guided; ++a) {
            const std::string id = "g" + std::to_string(a);
            t.agents.push_back({id, AgentKind::guided});
            t.guidance.push_back({"P" + std::to_string(gen() % players), id});
        }
        // parents only among earlier agents keeps the graph acyclic
        for (int d = 0; d < dependents; ++d) {
            const std::string id = "d" + std::to_string(d);
            const int earlier = guided + d;
            const int count = 1 + static_cast<int>(gen() % std::min(3, earlier));
            for (int k = 0; k < count; ++k) {
                t.dependency.push_back({id, t.agents[gen() % earlier].agent_id});
            }
            t.agents.push_back({id, AgentKind::dependent});
        }
        t.aggregation_mode = gen() % 2 ? AggregationMode::sample_union : AggregationMode::parameter_consensus;
        REQUIRE(validate_topology(t).empty());

        // reachability oracle: transitive closure by repeated relaxation
        const std::size_t n = t.agents.size();
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        auto index = [&](const std::string& id) {
            for (std::size_t i = 0; i < n; ++i) {
                if (t.agents[i].agent_id == id) {
                    return i;
                }
            }
            return n;
        };
        for (const auto& [d, p] : t.dependency) {
            reach[index(p)][index(d)] = true;
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (reach[i][k] && reach[k][j]) {
                        reach[i][j] = true;
                    }
                }
            }
        }

        const auto h = histories_for(t);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = t.agents[i];
            if (a.kind == AgentKind::dependent) {
                CHECK_THROWS_AS(route_feedback(t, press(a.agent_id), h, CreditWindow{10, 150}), Error);
                continue;
            }
            const auto routed = route_feedback(t, press(a.agent_id), h, CreditWindow{10, 150});
            std::multiset<std::string> got;
            for (const auto& r : routed) {
                got.insert(r.agent_id);
            }
            std::multiset<std::string> expected{a.agent_id};
            if (t.aggregation_mode == AggregationMode::sample_union) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (reach[i][j]) {
                        expected.insert(t.agents[j].agent_id);
                    }
                }
            }
            CHECK(got == expected);
        }
    }
}

TEST_CASE("consensus_step examples") {
    auto t = figure1_topology(AggregationMode::parameter_consensus);
    std::map<std::string, learner::RewardModel> models;
    for (const auto& a : t.agents) {
        models.emplace(a.agent_id, learner::RewardModel::linear(4));
    }
    // four parents with unit basis weights
    for (int i = 0; i < 4; ++i) {
        std::vector<double> w(5, 0.0);
        w[i] = 1.0;
        models.at(std::to_string(i + 1)).set_weights(w);
    }
    auto d = consensus_step(t, models, "5");
    CHECK(std::vector<double>(d.weights().begin(), d.weights().end()) ==
          std::vector<double>{0.25, 0.25, 0.25, 0.25, 0.0});

    // w and -w
    TeamTopology two;
    two.players = {{"A", ""}};
    two.agents = {{"x", AgentKind::guided}, {"y", AgentKind::guided}, {"d", AgentKind::dependent}};
    two.guidance = {{"A", "x"}, {"A", "y"}};
    two.dependency = {{"d", "x"}, {"d", "y"}};
    two.aggregation_mode = AggregationMode::parameter_consensus;
    std::map<std::string, learner::RewardModel> m2;
    m2.emplace("x", learner::RewardModel::linear(3));
    m2.emplace("y", learner::RewardModel::linear(3));
    m2.emplace("d", learner::RewardModel::linear(3));
    m2.at("x").set_weights({0.5, -1.25, 3.0, 7.0});
    m2.at("y").set_weights({-0.5, 1.25, -3.0, -7.0});
    d = consensus_step(two, m2, "d");
    for (double w : d.weights()) {
        CHECK(w == 0.0);
    }

    // one parent
    two.dependency = {{"d", "x"}};
    d = consensus_step(two, m2, "d");
    CHECK(std::equal(d.weights().begin(), d.weights().end(), m2.at("x").weights().begin()));

    // architecture mismatch
    m2.insert_or_assign("x", learner::RewardModel::mlp(3, 4));
    CHECK_THROWS_AS(consensus_step(two, m2, "d"), Error);

    CHECK_THROWS_AS(consensus_step(figure1_topology(), models, "5"), Error);
}

TEST_CASE("consensus_step is permutation invariant in parents") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    auto t = figure1_topology(AggregationMode::parameter_consensus);
    std::map<std::string, learner::RewardModel> models;
    for (const auto& a : t.agents) {
        auto m = learner::RewardModel::linear(21);
        std::vector<double> w(22);
        for (auto& x : w) {
            x = sym(gen);
        }
        m.set_weights(w);
        models.emplace(a.agent_id, m);
    }
    const auto base = consensus_step(t, models, "5");
    auto shuffled = t;
    for (int i = 0; i < 10; ++i) {
        std::shuffle(shuffled.dependency.begin(), shuffled.dependency.end(), gen);
        const auto again = consensus_step(shuffled, models, "5");
        CHECK(learner::weights_digest(again) == learner::weights_digest(base));
    }
}

TEST_CASE("topology JSON round-trip") {
    const auto t = figure1_topology();
    nlohmann::json j = t;
    CHECK(j["aggregationMode"] == "sampleUnion");
    CHECK(j["dependency"][0] == nlohmann::json::array({"5", "1"}));
    CHECK(j.get<TeamTopology>() == t);
    j["aggregationMode"] = "voting";
    CHECK_THROWS_AS(j.get<TeamTopology>(), Error);
    CHECK_THROWS_AS(nlohmann::json::object().get<TeamTopology>(), Error);
}
