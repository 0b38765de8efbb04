#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hybrid_tetris {

enum class ErrorCode {
    invalid_piece,
    illegal_placement,
    game_not_active,
    empty_piece_set,
    dimension_mismatch,
    no_legal_placement,
    no_eligible_decisions,
    empty_sample_list,
    unknown_game,
    feedback_on_dependent_game,
    architecture_mismatch,
    unknown_piece_for_bias,
    removal_would_empty_piece_set,
    invalid_config,
    invalid_board_index,
    freeze_budget_exhausted,
    freeze_unsupported,
    unknown_player,
    session_ended,
    malformed_message,
    sequence_gap,
    io_failure,
    corrupt_log,
};

// Stable identifier used in protocol Error messages and CLI output.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hybrid_tetris
