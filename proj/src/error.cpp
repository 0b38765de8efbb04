#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_piece: return "InvalidPiece";
        case ErrorCode::illegal_placement: return "IllegalPlacement";
        case ErrorCode::game_not_active: return "GameNotActive";
        case ErrorCode::empty_piece_set: return "EmptyPieceSet";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::no_legal_placement: return "NoLegalPlacement";
        case ErrorCode::no_eligible_decisions: return "NoEligibleDecisions";
        case ErrorCode::empty_sample_list: return "EmptySampleList";
        case ErrorCode::unknown_game: return "UnknownGame";
        case ErrorCode::feedback_on_dependent_game: return "FeedbackOnDependentGame";
        case ErrorCode::architecture_mismatch: return "ArchitectureMismatch";
        case ErrorCode::unknown_piece_for_bias: return "UnknownPieceForBias";
        case ErrorCode::removal_would_empty_piece_set: return "RemovalWouldEmptyPieceSet";
        case ErrorCode::invalid_config: return "InvalidConfig";
        case ErrorCode::invalid_board_index: return "InvalidBoardIndex";
        case ErrorCode::freeze_budget_exhausted: return "FreezeBudgetExhausted";
        case ErrorCode::freeze_unsupported: return "Unsupported";
        case ErrorCode::unknown_player: return "UnknownPlayer";
        case ErrorCode::session_ended: return "SessionEnded";
        case ErrorCode::malformed_message: return "MalformedMessage";
        case ErrorCode::sequence_gap: return "SequenceGap";
        case ErrorCode::io_failure: return "IoFailure";
        case ErrorCode::corrupt_log: return "CorruptLog";
    }
    return "Unknown";
}

}  // namespace hybrid_tetris
