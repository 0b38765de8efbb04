#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hybrid_tetris/server/log_store.hpp"
#include "hybrid_tetris/session/session.hpp"

namespace hybrid_tetris::server {

struct VerifyResult {
    bool ok = true;
    std::int64_t seq = 0;  // first mismatching seq
    std::string field;     // "tick", "kind", "payload.score", "chain", "input", "length"
    std::string detail;
};

// Rebuilds a session from the log's ConfigSnapshot and feeds it every
// recorded input at its tick, then runs on to the log's last tick.
// Throws Error(corrupt_log) without a usable ConfigSnapshot and rethrows
// session errors raised by an input.
session::Session replay_inputs(const std::vector<session::SessionEvent>& log);

// Compares a log against its replay. ok iff every event is bitwise equal and
// every chain link holds.
VerifyResult verify_lines(const std::vector<LogLine>& lines);

// Throws Error(io_failure) or Error(corrupt_log) for an unparsable log.
VerifyResult replay_verify(const std::filesystem::path& log_path);

}  // namespace hybrid_tetris::server
