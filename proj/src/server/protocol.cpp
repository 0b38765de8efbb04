#include "hybrid_tetris/server/protocol.hpp"

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::server {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& reason) { throw Error(ErrorCode::malformed_message, reason); }

const json& field(const json& obj, const char* name, json::value_t kind) {
    const auto it = obj.find(name);
    if (it == obj.end()) {
        malformed(std::string("missing field '") + name + "'");
    }
    const bool ok = kind == json::value_t::number_integer ? it->is_number_integer()
                    : kind == json::value_t::number_float ? it->is_number()
                                                          : it->type() == kind;
    if (!ok) {
        malformed(std::string("field '") + name + "' has the wrong type");
    }
    return *it;
}

std::string str(const json& obj, const char* name) { return field(obj, name, json::value_t::string).get<std::string>(); }

std::int64_t integer(const json& obj, const char* name) {
    return field(obj, name, json::value_t::number_integer).get<std::int64_t>();
}

json grid_json(const GridRle& g) {
    json runs = json::array();
    for (const auto& [cell, run] : g.runs) {
        runs.push_back({cell, run});
    }
    return {{"width", g.width}, {"height", g.height}, {"runs", runs}};
}

GridRle grid_from(const json& j) {
    GridRle g;
    g.width = static_cast<int>(integer(j, "width"));
    g.height = static_cast<int>(integer(j, "height"));
    for (const auto& r : field(j, "runs", json::value_t::array)) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
            malformed("grid runs must be [cell, run] integer pairs");
        }
        g.runs.emplace_back(r[0].get<int>(), r[1].get<int>());
    }
    return g;
}

struct PayloadWriter {
    json operator()(const Join& m) const { return {{"sessionId", m.session_id}, {"playerName", m.player_name}}; }
    json operator()(const KeyPress& m) const { return {{"key", m.key}}; }
    json operator()(const Ready&) const { return json::object(); }
    json operator()(const Welcome& m) const {
        return {{"playerId", m.player_id}, {"config", m.config}, {"protocolVersion", kProtocolVersion}};
    }
    json operator()(const StateSnapshot& m) const {
        json boards = json::array();
        for (const auto& b : m.boards) {
            boards.push_back({{"gameId", b.game_id},
                              {"owner", b.owner},
                              {"selectable", b.selectable},
                              {"grid", grid_json(b.grid)},
                              {"score", b.score},
                              {"level", b.level},
                              {"nextPiece", b.next_piece},
                              {"status", b.status}});
        }
        return {{"tick", m.tick}, {"boards", boards}};
    }
    json operator()(const EventFrame& m) const {
        json events = json::array();
        for (const auto& e : m.events) {
            events.push_back(e);
        }
        return {{"events", events}};
    }
    json operator()(const RuleNotice& m) const { return {{"ruleId", m.rule_id}, {"text", m.text}}; }
    json operator()(const ErrorMessage& m) const { return {{"code", m.code}, {"message", m.message}}; }
};

}  // namespace

std::string_view message_type(const Message& msg) {
    static constexpr std::string_view names[] = {"Join",          "Key",        "Ready",      "Welcome",
                                                 "StateSnapshot", "EventFrame", "RuleNotice", "Error"};
    return names[msg.index()];
}

bool is_client_message(const Message& msg) {
    return std::holds_alternative<Join>(msg) || std::holds_alternative<KeyPress>(msg) ||
           std::holds_alternative<Ready>(msg);
}

json to_envelope(const Message& msg) {
    return {{"v", kProtocolVersion}, {"type", message_type(msg)}, {"payload", std::visit(PayloadWriter{}, msg)}};
}

std::string encode(const Message& msg) { return to_envelope(msg).dump(); }

Message from_envelope(const json& j) {
    if (!j.is_object()) {
        malformed("message must be a JSON object");
    }
    const auto v = integer(j, "v");
    if (v != kProtocolVersion) {
        malformed("unsupported protocol version " + std::to_string(v));
    }
    const auto type = str(j, "type");
    const auto& p = field(j, "payload", json::value_t::object);

    if (type == "Join") {
        return Join{str(p, "sessionId"), str(p, "playerName")};
    }
    if (type == "Key") {
        auto key = str(p, "key");
        if (!session::parse_key(key)) {
            malformed("unknown key '" + key + "'");
        }
        return KeyPress{std::move(key)};
    }
    if (type == "Ready") {
        return Ready{};
    }
    if (type == "Welcome") {
        return Welcome{str(p, "playerId"), field(p, "config", json::value_t::object)};
    }
    if (type == "StateSnapshot") {
        StateSnapshot s;
        s.tick = integer(p, "tick");
        for (const auto& b : field(p, "boards", json::value_t::array)) {
            if (!b.is_object()) {
                malformed("board entries must be objects");
            }
            BoardView view;
            view.game_id = str(b, "gameId");
            view.owner = str(b, "owner");
            view.selectable = field(b, "selectable", json::value_t::boolean).get<bool>();
            view.grid = grid_from(field(b, "grid", json::value_t::object));
            view.score = integer(b, "score");
            view.level = static_cast<int>(integer(b, "level"));
            view.next_piece = str(b, "nextPiece");
            view.status = str(b, "status");
            s.boards.push_back(std::move(view));
        }
        return s;
    }
    if (type == "EventFrame") {
        EventFrame f;
        for (const auto& e : field(p, "events", json::value_t::array)) {
            try {
                f.events.push_back(e.get<session::SessionEvent>());
            } catch (const Error& err) {
                malformed(err.what());
            }
        }
        return f;
    }
    if (type == "RuleNotice") {
        return RuleNotice{str(p, "ruleId"), str(p, "text")};
    }
    if (type == "Error") {
        return ErrorMessage{str(p, "code"), str(p, "message")};
    }
    malformed("unknown message type '" + type + "'");
}

Message decode(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    return from_envelope(j);
}

Message decode_client(std::string_view text) {
    auto msg = decode(text);
    if (!is_client_message(msg)) {
        malformed("clients may not send " + std::string(message_type(msg)));
    }
    return msg;
}

GridRle encode_grid(const engine::Board& board) {
    GridRle g{board.width(), board.height(), {}};
    for (const auto cell : board.cells()) {
        if (!g.runs.empty() && g.runs.back().first == cell) {
            ++g.runs.back().second;
        } else {
            g.runs.emplace_back(cell, 1);
        }
    }
    return g;
}

engine::Board decode_grid(const GridRle& g) {
    if (g.width < 1 || g.height < 1) {
        malformed("grid dimensions must be positive");
    }
    engine::Board board(g.width, g.height);
    const std::int64_t total = static_cast<std::int64_t>(g.width) * g.height;
    std::int64_t pos = 0;
    for (const auto& [cell, run] : g.runs) {
        if (run < 1 || cell < 0 || cell > 255 || pos + run > total) {
            malformed("grid runs overflow the board");
        }
        for (int i = 0; i < run; ++i, ++pos) {
            board.set(static_cast<int>(pos / g.width), static_cast<int>(pos % g.width),
                      static_cast<engine::Cell>(cell));
        }
    }
    if (pos != total) {
        malformed("grid runs do not cover the board");
    }
    return board;
}

}  // namespace hybrid_tetris::server
