#include "hybrid_tetris/engine/game.hpp"

#include <algorithm>

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/hash.hpp"

namespace hybrid_tetris::engine {

std::int64_t ScoringTable::base_points(int lines) const {
    if (lines <= 0) {
        return 0;
    }
    return base[static_cast<std::size_t>(std::min(lines, 4) - 1)];
}

void ScoringTable::validate() const {
    std::int64_t previous = 0;
    for (const auto points : base) {
        if (points < 0) {
            throw Error(ErrorCode::invalid_config, "scoring table points must be >= 0");
        }
        if (points < previous) {
            throw Error(ErrorCode::invalid_config,
                        "scoring table must be non-decreasing in lines cleared");
        }
        previous = points;
    }
}

LockResult lock_and_clear(const Board& board, const PieceDef& piece, const Placement& placement) {
    LockResult result{board, {}};
    Board& out = result.board;
    const Shape& shape = piece.rotations[static_cast<std::size_t>(placement.rotation)];
    for (const auto& o : shape) {
        out.set(placement.landing_row + o.row, placement.column + o.col, to_cell(piece.color));
    }

    // Compact surviving rows toward the floor, preserving their order.
    const int width = out.width();
    int write = out.height() - 1;
    for (int read = out.height() - 1; read >= 0; --read) {
        if (out.row_full(read)) {
            const auto cells = out.row(read);
            result.cleared_rows.push_back({read, std::vector<Cell>(cells.begin(), cells.end())});
            continue;
        }
        if (write != read) {
            for (int c = 0; c < width; ++c) {
                out.set(write, c, out.at(read, c));
            }
        }
        --write;
    }
    for (; write >= 0; --write) {
        for (int c = 0; c < width; ++c) {
            out.set(write, c, kEmpty);
        }
    }
    return result;
}

void PieceBag::refill(std::span<const PieceDef> active) {
    pending_.clear();
    for (const auto& p : active) {
        pending_.push_back(p.id);
    }
    // Fisher-Yates with portable bounded draws.
    for (std::size_t i = pending_.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng_.below(i));
        std::swap(pending_[i - 1], pending_[j]);
    }
}

PieceDef PieceBag::draw(std::span<const PieceDef> active) {
    if (active.empty()) {
        throw Error(ErrorCode::empty_piece_set, "active piece set is empty");
    }
    for (;;) {
        if (pending_.empty()) {
            refill(active);
        }
        const std::string id = std::move(pending_.back());
        pending_.pop_back();
        const auto it = std::find_if(active.begin(), active.end(),
                                     [&](const PieceDef& p) { return p.id == id; });
        if (it != active.end()) {
            return *it;
        }
    }
}

void PieceBag::rebuild(std::span<const PieceDef> active) {
    if (active.empty()) {
        throw Error(ErrorCode::empty_piece_set, "active piece set is empty");
    }
    refill(active);
}

std::uint64_t PieceBag::digest() const noexcept {
    Fnv1a h;
    h.u64(rng_.digest());
    h.u64(pending_.size());
    for (const auto& id : pending_) {
        h.str(id);
    }
    return h.value();
}

std::pair<PieceDef, PieceBag> draw_next_piece(PieceBag bag, std::span<const PieceDef> active) {
    PieceDef piece = bag.draw(active);
    return {std::move(piece), std::move(bag)};
}

int level_for_lines(int total_lines) { return total_lines / 10; }

void refresh_status(GameState& state) {
    if (state.status == GameStatus::over) {
        return;
    }
    if (enumerate_placements(state.board, state.current_piece).empty()) {
        state.status = GameStatus::over;
    }
}

GameState new_game(const GameSetup& setup, std::uint64_t seed) {
    if (setup.pieces.empty()) {
        throw Error(ErrorCode::empty_piece_set, "game setup has no pieces");
    }
    setup.scoring.validate();
    GameState state;
    state.board = Board(setup.width, setup.height);
    state.bag = PieceBag(seed);
    state.active_pieces = setup.pieces;
    state.scoring = setup.scoring;
    state.current_piece = state.bag.draw(state.active_pieces);
    state.next_piece = state.bag.draw(state.active_pieces);
    refresh_status(state);
    return state;
}

std::vector<Placement> enumerate_placements(const Board& board, const PieceDef& piece) {
    std::vector<Placement> out;
    for (int col = 0; col < board.width(); ++col) {
        for (int rot = 0; rot < piece.rotation_count(); ++rot) {
            const Shape& shape = piece.rotations[static_cast<std::size_t>(rot)];
            if (col + shape_width(shape) > board.width()) {
                continue;
            }
            if (const auto row = drop_row(board, shape, col)) {
                out.push_back({piece.id, rot, col, *row});
            }
        }
    }
    return out;
}

std::pair<GameState, ClearResult> apply_placement(const GameState& state, const Placement& placement) {
    if (state.status != GameStatus::active) {
        throw Error(ErrorCode::game_not_active, "game is not active");
    }
    const PieceDef& piece = state.current_piece;
    if (placement.piece_id != piece.id || placement.rotation < 0 ||
        placement.rotation >= piece.rotation_count()) {
        throw Error(ErrorCode::illegal_placement, "placement does not match the current piece");
    }
    const Shape& shape = piece.rotations[static_cast<std::size_t>(placement.rotation)];
    const auto row = placement.column >= 0 && placement.column + shape_width(shape) <= state.board.width()
                         ? drop_row(state.board, shape, placement.column)
                         : std::nullopt;
    if (!row || *row != placement.landing_row) {
        throw Error(ErrorCode::illegal_placement, "placement is not a legal hard drop");
    }

    LockResult locked = lock_and_clear(state.board, piece, placement);

    GameState next = state;
    next.board = std::move(locked.board);
    ClearResult clear;
    clear.lines_cleared = static_cast<int>(locked.cleared_rows.size());
    clear.cleared_rows = std::move(locked.cleared_rows);
    clear.points_awarded = next.scoring.points(clear.lines_cleared, state.level);

    next.score += clear.points_awarded;
    next.total_lines += clear.lines_cleared;
    next.level = level_for_lines(next.total_lines);
    next.current_piece = std::move(next.next_piece);
    next.next_piece = next.bag.draw(next.active_pieces);
    next.turn += 1;
    refresh_status(next);
    return {std::move(next), std::move(clear)};
}

std::uint64_t board_hash(const GameState& state) {
    Fnv1a h;
    h.u64(static_cast<std::uint64_t>(state.board.width()));
    h.u64(static_cast<std::uint64_t>(state.board.height()));
    h.bytes(state.board.cells());
    h.i64(state.score);
    h.i64(state.total_lines);
    h.i64(state.turn);
    h.i64(state.bonus_ledger);
    h.u64(static_cast<std::uint64_t>(state.status));
    h.str(state.current_piece.id);
    h.str(state.next_piece.id);
    h.u64(state.bag.digest());
    h.u64(state.regime_cursor);
    for (const auto& p : state.active_pieces) {
        h.str(p.id);
    }
    for (const auto points : state.scoring.base) {
        h.i64(points);
    }
    return h.value();
}

}  // namespace hybrid_tetris::engine
