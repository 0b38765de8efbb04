#include "hybrid_tetris/server/log_store.hpp"

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/hash.hpp"

namespace hybrid_tetris::server {

using nlohmann::json;

namespace {

std::string body_of(const session::SessionEvent& e) { return json(e).dump(); }

std::string line_of(const session::SessionEvent& e, const std::string& chain) {
    json j = e;
    j["chain"] = chain;
    return j.dump();
}

}  // namespace

std::string chain_link(std::string_view previous, std::string_view body) {
    Fnv1a h;
    h.str(previous);
    h.str(body);
    return to_hex(h.value());
}

LogStore::LogStore(const std::filesystem::path& dir, const std::string& session_id)
    : path_(dir / (session_id + ".jsonl")) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::io_failure, "cannot create log directory " + dir.string() + ": " + ec.message());
    }
    if (std::filesystem::exists(path_)) {
        for (const auto& line : read_log_lines(path_)) {
            if (!line.chain_ok || line.event.seq != last_seq_ + 1) {
                throw Error(ErrorCode::corrupt_log,
                            "existing log " + path_.string() + " is damaged at seq " + std::to_string(line.event.seq));
            }
            chain_ = chain_link(chain_, body_of(line.event));
            last_seq_ = line.event.seq;
        }
    }
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) {
        throw Error(ErrorCode::io_failure, "cannot open " + path_.string() + " for appending");
    }
}

void LogStore::append(const session::SessionEvent& event) {
    if (event.seq != last_seq_ + 1) {
        throw Error(ErrorCode::sequence_gap, "expected seq " + std::to_string(last_seq_ + 1) + ", got " +
                                                 std::to_string(event.seq));
    }
    const auto next = chain_link(chain_, body_of(event));
    out_ << line_of(event, next) << '\n';
    out_.flush();
    if (!out_) {
        throw Error(ErrorCode::io_failure, "write to " + path_.string() + " failed");
    }
    chain_ = next;
    last_seq_ = event.seq;
}

std::vector<LogLine> read_log_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path.string());
    }
    std::vector<LogLine> out;
    std::string chain;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (raw.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(raw);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::corrupt_log, path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("chain") || !j["chain"].is_string()) {
            throw Error(ErrorCode::corrupt_log, path.string() + ":" + std::to_string(number) + ": missing chain");
        }
        LogLine line;
        const auto stored = j["chain"].get<std::string>();
        j.erase("chain");
        try {
            line.event = j.get<session::SessionEvent>();
        } catch (const Error& e) {
            throw Error(ErrorCode::corrupt_log, path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
        const auto body = body_of(line.event);
        const auto expected = chain_link(chain, body);
        line.chain_ok = stored == expected && raw == line_of(line.event, stored);
        chain = stored;
        out.push_back(std::move(line));
    }
    return out;
}

std::vector<session::SessionEvent> read_log(const std::filesystem::path& path) {
    std::vector<session::SessionEvent> out;
    for (auto& line : read_log_lines(path)) {
        const auto expected = static_cast<std::int64_t>(out.size()) + 1;
        if (!line.chain_ok) {
            throw Error(ErrorCode::corrupt_log, "chain broken at seq " + std::to_string(line.event.seq));
        }
        if (line.event.seq != expected) {
            throw Error(ErrorCode::corrupt_log, "seq gap: expected " + std::to_string(expected) + ", got " +
                                                    std::to_string(line.event.seq));
        }
        out.push_back(std::move(line.event));
    }
    return out;
}

}  // namespace hybrid_tetris::server
