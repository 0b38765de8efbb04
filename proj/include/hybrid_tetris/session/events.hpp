#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace hybrid_tetris::session {

enum class EventKind {
    session_start,
    config_snapshot,
    decision_point,
    placement_chosen,
    feedback_key,
    credited_batch,
    rule_fired,
    notice,
    regime_changed,
    lines_cleared,
    score_changed,
    freeze,
    unfreeze,
    board_selected,
    game_over,
    model_checkpoint,
    session_end,
};

// "SessionStart", "ConfigSnapshot", ...
std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct SessionEvent {
    std::int64_t seq = 0;
    std::int64_t tick = 0;
    EventKind kind = EventKind::session_start;
    nlohmann::json payload = nlohmann::json::object();

    bool operator==(const SessionEvent&) const = default;
};

// {"seq", "tick", "kind", "payload"}
void to_json(nlohmann::json& j, const SessionEvent& e);
// Throws Error(corrupt_log).
void from_json(const nlohmann::json& j, SessionEvent& e);

enum class KeyKind { digit, enter, space };

struct Key {
    KeyKind kind = KeyKind::enter;
    int digit = 0;

    static Key digit_key(int d) { return {KeyKind::digit, d}; }
    static Key enter() { return {KeyKind::enter, 0}; }
    static Key space() { return {KeyKind::space, 0}; }

    // "0".."9", "enter", "space"
    std::string name() const;
    bool operator==(const Key&) const = default;
};

std::optional<Key> parse_key(std::string_view name);

}  // namespace hybrid_tetris::session
