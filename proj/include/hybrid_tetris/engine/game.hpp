#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hybrid_tetris/engine/board.hpp"
#include "hybrid_tetris/engine/piece.hpp"
#include "hybrid_tetris/random.hpp"

namespace hybrid_tetris::engine {

// Base points for 1, 2, 3 and 4+ lines, scaled by (level + 1).
struct ScoringTable {
    std::array<std::int64_t, 4> base{40, 100, 300, 1200};

    std::int64_t base_points(int lines) const;
    std::int64_t points(int lines, int level) const { return base_points(lines) * (level + 1); }

    // Throws Error(invalid_config) unless non-negative and non-decreasing.
    void validate() const;

    bool operator==(const ScoringTable&) const = default;
};

struct Placement {
    std::string piece_id;
    int rotation = 0;
    // Leftmost occupied column of the rotated piece.
    int column = 0;
    // Anchor (top) row after the hard drop.
    int landing_row = 0;

    bool operator==(const Placement&) const = default;
};

struct ClearedRow {
    int row = 0;  // index before removal
    std::vector<Cell> colors;

    bool operator==(const ClearedRow&) const = default;
};

struct ClearResult {
    std::vector<ClearedRow> cleared_rows;
    std::int64_t points_awarded = 0;
    int lines_cleared = 0;
};

// Locks `placement` into a copy of `board` and removes full rows.
struct LockResult {
    Board board;
    std::vector<ClearedRow> cleared_rows;
};
LockResult lock_and_clear(const Board& board, const PieceDef& piece, const Placement& placement);

// Generalized shuffled bag over the active piece set.
class PieceBag {
public:
    explicit PieceBag(std::uint64_t seed = 0) : rng_(seed) {}

    // Throws Error(empty_piece_set).
    PieceDef draw(std::span<const PieceDef> active);

    // Discards the remainder of the current bag and deals a fresh one.
    void rebuild(std::span<const PieceDef> active);

    std::span<const std::string> pending() const noexcept { return pending_; }
    std::uint64_t digest() const noexcept;

    bool operator==(const PieceBag&) const = default;

private:
    void refill(std::span<const PieceDef> active);

    Rng rng_;
    // Ids still to be dealt; dealt from the back.
    std::vector<std::string> pending_;
};

// Functional form of PieceBag::draw.
std::pair<PieceDef, PieceBag> draw_next_piece(PieceBag bag, std::span<const PieceDef> active);

enum class GameStatus { active, frozen, over };

struct GameState {
    Board board;
    std::int64_t score = 0;
    int total_lines = 0;
    int level = 0;
    PieceDef current_piece;
    PieceDef next_piece;
    PieceBag bag;
    int turn = 0;
    GameStatus status = GameStatus::active;
    std::vector<PieceDef> active_pieces;
    ScoringTable scoring;
    // Number of regime events already applied.
    std::size_t regime_cursor = 0;
    // End-of-game bonus accrued by agent-disclosed rules; paid at game over.
    std::int64_t bonus_ledger = 0;
};

struct GameSetup {
    int width = kDefaultWidth;
    int height = kDefaultHeight;
    std::vector<PieceDef> pieces = standard_pieces();
    ScoringTable scoring{};
};

// Throws Error(empty_piece_set).
GameState new_game(const GameSetup& setup, std::uint64_t seed);

// All (rotation, column) hard drops that land in bounds without collision,
// ordered by column then rotation. Empty means game over.
std::vector<Placement> enumerate_placements(const Board& board, const PieceDef& piece);

// Throws Error(game_not_active) or Error(illegal_placement).
std::pair<GameState, ClearResult> apply_placement(const GameState& state, const Placement& placement);

// Recomputes status after an external change to the current piece or board.
void refresh_status(GameState& state);

int level_for_lines(int total_lines);

// Stable digest over grid, score, lines, turn, pieces and generator state.
std::uint64_t board_hash(const GameState& state);

}  // namespace hybrid_tetris::engine
