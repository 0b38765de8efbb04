#include "hybrid_tetris/session/events.hpp"

#include <array>
#include <utility>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::session {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 17> kNames{{
    {EventKind::session_start, "SessionStart"},
    {EventKind::config_snapshot, "ConfigSnapshot"},
    {EventKind::decision_point, "DecisionPoint"},
    {EventKind::placement_chosen, "PlacementChosen"},
    {EventKind::feedback_key, "FeedbackKey"},
    {EventKind::credited_batch, "CreditedBatch"},
    {EventKind::rule_fired, "RuleFired"},
    {EventKind::notice, "Notice"},
    {EventKind::regime_changed, "RegimeChanged"},
    {EventKind::lines_cleared, "LinesCleared"},
    {EventKind::score_changed, "ScoreChanged"},
    {EventKind::freeze, "Freeze"},
    {EventKind::unfreeze, "Unfreeze"},
    {EventKind::board_selected, "BoardSelected"},
    {EventKind::game_over, "GameOver"},
    {EventKind::model_checkpoint, "ModelCheckpoint"},
    {EventKind::session_end, "SessionEnd"},
}};

}  // namespace

std::string_view event_kind_name(EventKind kind) {
    for (const auto& [k, name] : kNames) {
        if (k == kind) {
            return name;
        }
    }
    return "SessionStart";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
    for (const auto& [k, n] : kNames) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

void to_json(nlohmann::json& j, const SessionEvent& e) {
    j = {{"seq", e.seq}, {"tick", e.tick}, {"kind", event_kind_name(e.kind)}, {"payload", e.payload}};
}

void from_json(const nlohmann::json& j, SessionEvent& e) {
    try {
        e.seq = j.at("seq").get<std::int64_t>();
        e.tick = j.at("tick").get<std::int64_t>();
        const auto name = j.at("kind").get<std::string>();
        const auto kind = parse_event_kind(name);
        if (!kind) {
            throw Error(ErrorCode::corrupt_log, "unknown event kind '" + name + "'");
        }
        e.kind = *kind;
        e.payload = j.at("payload");
        if (!e.payload.is_object()) {
            throw Error(ErrorCode::corrupt_log, "event payload must be an object");
        }
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::corrupt_log, std::string("malformed event: ") + ex.what());
    }
}

std::string Key::name() const {
    switch (kind) {
        case KeyKind::digit: return std::to_string(digit);
        case KeyKind::enter: return "enter";
        case KeyKind::space: return "space";
    }
    return "enter";
}

std::optional<Key> parse_key(std::string_view name) {
    if (name.size() == 1 && name[0] >= '0' && name[0] <= '9') {
        return Key::digit_key(name[0] - '0');
    }
    if (name == "enter") {
        return Key::enter();
    }
    if (name == "space") {
        return Key::space();
    }
    return std::nullopt;
}

}  // namespace hybrid_tetris::session
