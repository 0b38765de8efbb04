#pragma once

#include <atomic>
#include <cstdint>
#include <functional>

#include "hybrid_tetris/server/core.hpp"

namespace hybrid_tetris::server {

struct ServeOptions {
    std::uint16_t port = 8080;   // 0 picks a free port
    bool autostart = false;      // run the clock without waiting for Ready
    bool exit_on_end = true;     // return once the session has ended
    const std::atomic<bool>* stop = nullptr;
    std::function<void(std::uint16_t)> on_listening;
};

// WebSocket front end: one text frame per protocol message. Runs the clock at
// the config's tickHz on a single io thread, so every call into the core is
// serialized. Blocks until stopped, signalled (SIGINT/SIGTERM) or ended.
void serve(ServerCore& core, const ServeOptions& options);

}  // namespace hybrid_tetris::server
