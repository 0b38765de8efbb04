#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hybrid_tetris/engine/board.hpp"
#include "hybrid_tetris/session/events.hpp"
#include "json.hpp"

namespace hybrid_tetris::server {

inline constexpr int kProtocolVersion = 1;

// Client to server.
struct Join {
    std::string session_id;
    std::string player_name;
    bool operator==(const Join&) const = default;
};
struct KeyPress {
    std::string key;  // "0".."9", "enter", "space"
    bool operator==(const KeyPress&) const = default;
};
struct Ready {
    bool operator==(const Ready&) const = default;
};

// Server to client.
struct Welcome {
    std::string player_id;
    nlohmann::json config;  // redacted per player
    bool operator==(const Welcome&) const = default;
};

// Row-major run-length grid: [[cell, run], ...].
struct GridRle {
    int width = 0;
    int height = 0;
    std::vector<std::pair<int, int>> runs;
    bool operator==(const GridRle&) const = default;
};

struct BoardView {
    std::string game_id;
    std::string owner;  // empty for dependent games
    bool selectable = false;
    GridRle grid;
    std::int64_t score = 0;
    int level = 0;
    std::string next_piece;
    std::string status;  // "active", "frozen", "over"
    bool operator==(const BoardView&) const = default;
};

struct StateSnapshot {
    std::int64_t tick = 0;
    std::vector<BoardView> boards;
    bool operator==(const StateSnapshot&) const = default;
};

struct EventFrame {
    std::vector<session::SessionEvent> events;
    bool operator==(const EventFrame&) const = default;
};

struct RuleNotice {
    std::string rule_id;
    std::string text;
    bool operator==(const RuleNotice&) const = default;
};

struct ErrorMessage {
    std::string code;
    std::string message;
    bool operator==(const ErrorMessage&) const = default;
};

using Message = std::variant<Join, KeyPress, Ready, Welcome, StateSnapshot, EventFrame, RuleNotice, ErrorMessage>;

// "Join", "Key", "Ready", "Welcome", ...
std::string_view message_type(const Message& msg);
bool is_client_message(const Message& msg);

// Canonical JSON: {"payload": ..., "type": ..., "v": 1} with sorted keys.
std::string encode(const Message& msg);
nlohmann::json to_envelope(const Message& msg);

// Unknown fields are ignored. Throws Error(malformed_message) on bad JSON,
// unknown type, version mismatch or a missing/mistyped required field.
Message decode(std::string_view text);
Message from_envelope(const nlohmann::json& envelope);

// decode() restricted to client-to-server types; anything a client may not
// send (state, placements, scores) is rejected as malformed.
Message decode_client(std::string_view text);

GridRle encode_grid(const engine::Board& board);
// Throws Error(malformed_message) when the runs do not cover the grid.
engine::Board decode_grid(const GridRle& grid);

}  // namespace hybrid_tetris::server
