#include "hybrid_tetris/server/replay.hpp"

#include <algorithm>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::server {

using nlohmann::json;
using session::EventKind;
using session::SessionEvent;

namespace {

const SessionEvent& config_snapshot(const std::vector<SessionEvent>& log) {
    const auto it = std::find_if(log.begin(), log.end(),
                                 [](const SessionEvent& e) { return e.kind == EventKind::config_snapshot; });
    if (it == log.end() || !it->payload.contains("config")) {
        throw Error(ErrorCode::corrupt_log, "log has no ConfigSnapshot");
    }
    return *it;
}

std::string first_difference(const SessionEvent& expected, const SessionEvent& actual) {
    if (expected.seq != actual.seq) {
        return "seq";
    }
    if (expected.tick != actual.tick) {
        return "tick";
    }
    if (expected.kind != actual.kind) {
        return "kind";
    }
    const auto patch = json::diff(expected.payload, actual.payload);
    if (patch.empty()) {
        return "payload";
    }
    auto path = patch[0].at("path").get<std::string>();
    std::replace(path.begin(), path.end(), '/', '.');
    return "payload" + path;
}

session::Session replay_tracking(const std::vector<SessionEvent>& log, std::int64_t& input_seq) {
    session::SessionConfig config;
    try {
        config = config_snapshot(log).payload.at("config").get<session::SessionConfig>();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::corrupt_log) {
            throw;
        }
        throw Error(ErrorCode::corrupt_log, std::string("unusable ConfigSnapshot: ") + e.what());
    }
    session::Session s(std::move(config));
    for (const auto& e : log) {
        const auto in = session::recorded_input(e);
        if (!in) {
            continue;
        }
        input_seq = e.seq;
        if (in->tick > s.tick() && !s.ended()) {
            s.advance(in->tick - s.tick());
        }
        if (in->key) {
            s.handle_key(in->player_id, *in->key);
        } else {
            s.end();
        }
    }
    input_seq = 0;
    if (!log.empty() && log.back().tick > s.tick() && !s.ended()) {
        s.advance(log.back().tick - s.tick());
    }
    return s;
}

}  // namespace

session::Session replay_inputs(const std::vector<SessionEvent>& log) {
    std::int64_t failed = 0;
    return replay_tracking(log, failed);
}

VerifyResult verify_lines(const std::vector<LogLine>& lines) {
    std::vector<SessionEvent> log;
    log.reserve(lines.size());
    for (const auto& l : lines) {
        log.push_back(l.event);
    }
    const auto& snapshot = config_snapshot(log);

    std::vector<SessionEvent> replayed;
    std::int64_t failed = 0;
    try {
        replayed = replay_tracking(log, failed).events();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::corrupt_log) {
            return {false, snapshot.seq, "payload.config", e.what()};
        }
        return {false, failed ? failed : log.back().seq, "input", e.what()};
    }

    const auto n = std::min(log.size(), replayed.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!(log[i] == replayed[i])) {
            return {false, log[i].seq, first_difference(replayed[i], log[i]), "event differs from replay"};
        }
    }
    if (log.size() != replayed.size()) {
        return {false, static_cast<std::int64_t>(n) + 1, "length",
                "log has " + std::to_string(log.size()) + " events, replay has " + std::to_string(replayed.size())};
    }
    for (const auto& l : lines) {
        if (!l.chain_ok) {
            return {false, l.event.seq, "chain", "chain link does not match"};
        }
    }
    return {};
}

VerifyResult replay_verify(const std::filesystem::path& log_path) { return verify_lines(read_log_lines(log_path)); }

}  // namespace hybrid_tetris::server
