#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hybrid_tetris/server/log_store.hpp"
#include "hybrid_tetris/server/protocol.hpp"
#include "hybrid_tetris/session/session.hpp"

namespace hybrid_tetris::server {

using ConnectionId = std::uint64_t;

struct Outbound {
    ConnectionId connection = 0;
    Message message;
};

// Transport-free authoritative server for one session. All calls must come
// from a single loop; the returned messages are per-connection FIFO.
class ServerCore {
public:
    // log may be null. SessionStart and ConfigSnapshot are logged at once.
    explicit ServerCore(session::SessionConfig config, LogStore* log = nullptr);

    std::vector<Outbound> receive(ConnectionId connection, std::string_view text);
    std::vector<Outbound> handle(ConnectionId connection, const Message& message);
    // The player's games keep running; a later Join with the same name resumes.
    void disconnect(ConnectionId connection);

    // One lockstep tick once every player is Ready (or after start()).
    std::vector<Outbound> tick();
    void start() { running_ = true; }
    // Forced SessionEnd; no-op when already ended.
    std::vector<Outbound> shutdown();

    bool running() const noexcept { return running_; }
    bool ended() const noexcept { return session_.ended(); }
    session::Session& session() noexcept { return session_; }
    const session::Session& session() const noexcept { return session_; }
    std::optional<std::string> player_of(ConnectionId connection) const;

    StateSnapshot snapshot_for(const std::string& player_id) const;
    // The config with hidden rules not disclosed to the player removed.
    nlohmann::json redacted_config(const std::string& player_id) const;
    // Whether an event may appear in this player's EventFrames.
    bool visible_to(const session::SessionEvent& event, const std::string& player_id) const;

private:
    void flush(std::vector<Outbound>& out);
    void error_to(std::vector<Outbound>& out, ConnectionId connection, std::string code, std::string message) const;

    session::Session session_;
    LogStore* log_;
    std::size_t flushed_ = 0;
    std::map<ConnectionId, std::string> connections_;
    std::map<std::string, std::string> claimed_;  // player id -> display name
    std::set<std::string> ready_;
    bool running_ = false;
    std::int64_t snapshot_every_ = 10;
};

}  // namespace hybrid_tetris::server
