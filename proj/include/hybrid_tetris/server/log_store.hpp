#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "hybrid_tetris/session/events.hpp"

namespace hybrid_tetris::server {

// chain_n = FNV-1a(chain_{n-1}, canonical event JSON); the first link uses
// an empty predecessor. Stored as "chain" on every line.
std::string chain_link(std::string_view previous, std::string_view body);

// Append-only JSONL event log, one file per session: {dir}/{sessionId}.jsonl.
// Reopening an existing file continues its sequence and chain.
class LogStore {
public:
    // Throws Error(io_failure) or Error(corrupt_log) for a damaged existing file.
    LogStore(const std::filesystem::path& dir, const std::string& session_id);

    // Requires event.seq == last_seq() + 1. Throws Error(sequence_gap) or
    // Error(io_failure). Each line is flushed before returning.
    void append(const session::SessionEvent& event);

    std::int64_t last_seq() const noexcept { return last_seq_; }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::int64_t last_seq_ = 0;
    std::string chain_;
};

struct LogLine {
    session::SessionEvent event;
    bool chain_ok = true;  // chain link and canonical bytes both check out
};

// Parses every line. Throws Error(io_failure) when unreadable and
// Error(corrupt_log) for a line that is not a well-formed event.
std::vector<LogLine> read_log_lines(const std::filesystem::path& path);

// Strict read: also throws Error(corrupt_log) on a chain break or a seq gap.
std::vector<session::SessionEvent> read_log(const std::filesystem::path& path);

}  // namespace hybrid_tetris::server
