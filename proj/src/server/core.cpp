#include "hybrid_tetris/server/core.hpp"

#include <algorithm>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::server {

using nlohmann::json;
using session::EventKind;

namespace {

std::string status_name(engine::GameStatus s) {
    switch (s) {
        case engine::GameStatus::active: return "active";
        case engine::GameStatus::frozen: return "frozen";
        case engine::GameStatus::over: return "over";
    }
    return "active";
}

}  // namespace

ServerCore::ServerCore(session::SessionConfig config, LogStore* log) : session_(std::move(config)), log_(log) {
    snapshot_every_ = std::max(1, session_.config().tick_hz / 5);
    std::vector<Outbound> none;
    flush(none);
}

std::optional<std::string> ServerCore::player_of(ConnectionId connection) const {
    const auto it = connections_.find(connection);
    if (it == connections_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void ServerCore::error_to(std::vector<Outbound>& out, ConnectionId connection, std::string code,
                          std::string message) const {
    out.push_back({connection, ErrorMessage{std::move(code), std::move(message)}});
}

std::vector<Outbound> ServerCore::receive(ConnectionId connection, std::string_view text) {
    try {
        return handle(connection, decode_client(text));
    } catch (const Error& e) {
        std::vector<Outbound> out;
        error_to(out, connection, std::string(error_code_name(e.code())), e.what());
        return out;
    }
}

std::vector<Outbound> ServerCore::handle(ConnectionId connection, const Message& message) {
    std::vector<Outbound> out;
    if (!is_client_message(message)) {
        error_to(out, connection, "MalformedMessage",
                 "clients may not send " + std::string(message_type(message)));
        return out;
    }
    const auto& topo = session_.config().topology;

    if (const auto* join = std::get_if<Join>(&message)) {
        if (join->session_id != session_.config().session_id) {
            error_to(out, connection, "UnknownSession", "no session '" + join->session_id + "'");
            return out;
        }
        if (connections_.count(connection)) {
            error_to(out, connection, "AlreadyJoined", "connection already joined");
            return out;
        }
        std::optional<std::string> player;
        for (const auto& [id, name] : claimed_) {
            if (name == join->player_name) {
                player = id;
            }
        }
        if (!player) {
            for (const auto& p : topo.players) {
                if (!claimed_.count(p.player_id)) {
                    player = p.player_id;
                    break;
                }
            }
        }
        if (!player) {
            error_to(out, connection, "SessionFull", "every player slot is taken");
            return out;
        }
        // a rejoin takes over from a stale connection
        for (auto it = connections_.begin(); it != connections_.end();) {
            it = it->second == *player ? connections_.erase(it) : std::next(it);
        }
        claimed_[*player] = join->player_name;
        connections_[connection] = *player;
        out.push_back({connection, Welcome{*player, redacted_config(*player)}});
        out.push_back({connection, snapshot_for(*player)});
        return out;
    }

    const auto player = player_of(connection);
    if (!player) {
        error_to(out, connection, "NotJoined", "send Join first");
        return out;
    }
    if (std::holds_alternative<Ready>(message)) {
        ready_.insert(*player);
        if (std::all_of(topo.players.begin(), topo.players.end(),
                        [&](const team::PlayerInfo& p) { return ready_.count(p.player_id) > 0; })) {
            running_ = true;
        }
        return out;
    }
    const auto& press = std::get<KeyPress>(message);
    try {
        session_.handle_key(*player, *session::parse_key(press.key));
    } catch (const Error& e) {
        error_to(out, connection, std::string(error_code_name(e.code())), e.what());
    }
    flush(out);
    return out;
}

void ServerCore::disconnect(ConnectionId connection) { connections_.erase(connection); }

std::vector<Outbound> ServerCore::tick() {
    std::vector<Outbound> out;
    if (!running_ || session_.ended()) {
        return out;
    }
    session_.advance(1);
    flush(out);
    if (session_.tick() % snapshot_every_ == 0) {
        for (const auto& [conn, player] : connections_) {
            out.push_back({conn, snapshot_for(player)});
        }
    }
    return out;
}

std::vector<Outbound> ServerCore::shutdown() {
    std::vector<Outbound> out;
    if (!session_.ended()) {
        session_.end();
        flush(out);
    }
    return out;
}

void ServerCore::flush(std::vector<Outbound>& out) {
    const auto& events = session_.events();
    for (std::size_t i = flushed_; i < events.size(); ++i) {
        if (log_) {
            log_->append(events[i]);
        }
    }
    for (const auto& [conn, player] : connections_) {
        EventFrame frame;
        std::vector<RuleNotice> notices;
        for (std::size_t i = flushed_; i < events.size(); ++i) {
            const auto& e = events[i];
            if (e.kind == EventKind::notice && e.payload.value("playerId", std::string()) == player) {
                notices.push_back({e.payload.at("ruleId").get<std::string>(), e.payload.at("text").get<std::string>()});
            }
            if (visible_to(e, player)) {
                frame.events.push_back(e);
            }
        }
        if (!frame.events.empty()) {
            out.push_back({conn, std::move(frame)});
        }
        for (auto& n : notices) {
            out.push_back({conn, std::move(n)});
        }
    }
    flushed_ = events.size();
}

bool ServerCore::visible_to(const session::SessionEvent& e, const std::string& player_id) const {
    switch (e.kind) {
        case EventKind::config_snapshot:
        case EventKind::notice:
            return false;
        case EventKind::rule_fired: {
            const auto id = e.payload.value("ruleId", std::string());
            for (const auto& r : session_.config().rules) {
                if (r.rule_id == id) {
                    return r.disclosed_to_players.count(player_id) > 0;
                }
            }
            return false;
        }
        case EventKind::credited_batch:
            return e.payload.value("source", std::string()) != "rule";
        default:
            return true;
    }
}

json ServerCore::redacted_config(const std::string& player_id) const {
    json cfg = session_.config();
    json rules = json::array();
    for (const auto& r : session_.config().rules) {
        if (r.disclosed_to_players.count(player_id)) {
            rules.push_back(r);
        }
    }
    cfg["rules"] = rules;
    return cfg;
}

StateSnapshot ServerCore::snapshot_for(const std::string& player_id) const {
    StateSnapshot s;
    s.tick = session_.tick();
    for (const auto& g : session_.games()) {
        BoardView b;
        b.game_id = g.game_id;
        b.owner = g.owner.value_or("");
        b.selectable = g.owner == player_id;
        b.grid = encode_grid(g.state.board);
        b.score = g.state.score;
        b.level = g.state.level;
        b.next_piece = g.state.next_piece.id;
        b.status = status_name(g.state.status);
        s.boards.push_back(std::move(b));
    }
    return s;
}

}  // namespace hybrid_tetris::server
