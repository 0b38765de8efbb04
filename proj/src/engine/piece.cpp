#include "hybrid_tetris/engine/piece.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::engine {

namespace {

constexpr std::array<std::string_view, 7> kStandardNames{
    "yellow", "cyan", "purple", "green", "red", "blue", "orange"};

}  // namespace

std::string color_name(Color c) {
    if (is_custom(c)) {
        return "custom(" +
               std::to_string(static_cast<int>(c) - static_cast<int>(Color::custom_base)) + ")";
    }
    const int index = static_cast<int>(c) - 1;
    if (index < 0 || index >= static_cast<int>(kStandardNames.size())) {
        return "invalid";
    }
    return std::string(kStandardNames[static_cast<std::size_t>(index)]);
}

Color parse_color(std::string_view name) {
    for (std::size_t i = 0; i < kStandardNames.size(); ++i) {
        if (name == kStandardNames[i]) {
            return static_cast<Color>(i + 1);
        }
    }
    if (name == "custom") {
        return custom_color(0);
    }
    constexpr std::string_view prefix = "custom(";
    if (name.starts_with(prefix) && name.ends_with(")")) {
        const auto digits = name.substr(prefix.size(), name.size() - prefix.size() - 1);
        if (!digits.empty() && digits.size() <= 3 &&
            std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
            const int n = std::stoi(std::string(digits));
            if (n <= kMaxCustomColors) {
                return custom_color(n);
            }
        }
    }
    throw Error(ErrorCode::invalid_piece, "unknown color '" + std::string(name) + "'");
}

Shape normalize_shape(Shape shape) {
    if (shape.empty()) {
        return shape;
    }
    int min_row = std::numeric_limits<int>::max();
    int min_col = std::numeric_limits<int>::max();
    for (const auto& o : shape) {
        min_row = std::min(min_row, o.row);
        min_col = std::min(min_col, o.col);
    }
    for (auto& o : shape) {
        o.row -= min_row;
        o.col -= min_col;
    }
    std::sort(shape.begin(), shape.end());
    return shape;
}

Shape rotate_clockwise(const Shape& shape) {
    Shape out;
    out.reserve(shape.size());
    for (const auto& o : shape) {
        out.push_back({o.col, -o.row});
    }
    return normalize_shape(std::move(out));
}

int shape_width(const Shape& shape) {
    int w = 0;
    for (const auto& o : shape) {
        w = std::max(w, o.col + 1);
    }
    return w;
}

int shape_height(const Shape& shape) {
    int h = 0;
    for (const auto& o : shape) {
        h = std::max(h, o.row + 1);
    }
    return h;
}

PieceDef make_piece(std::string id, std::string display_name, Color color,
                    std::vector<Shape> rotations, Provenance provenance) {
    if (id.empty()) {
        throw Error(ErrorCode::invalid_piece, "piece id must not be empty");
    }
    if (rotations.empty()) {
        throw Error(ErrorCode::invalid_piece, "piece '" + id + "' has no rotations");
    }
    if (static_cast<int>(color) == 0) {
        throw Error(ErrorCode::invalid_piece, "piece '" + id + "' has no color");
    }
    PieceDef piece{std::move(id), std::move(display_name), color, {}, provenance};
    for (auto& raw : rotations) {
        Shape shape = normalize_shape(std::move(raw));
        if (shape.empty()) {
            throw Error(ErrorCode::invalid_piece, "piece '" + piece.id + "' has an empty rotation");
        }
        if (std::adjacent_find(shape.begin(), shape.end()) != shape.end()) {
            throw Error(ErrorCode::invalid_piece, "piece '" + piece.id + "' has duplicate offsets");
        }
        if (!piece.rotations.empty() && shape.size() != piece.rotations.front().size()) {
            throw Error(ErrorCode::invalid_piece,
                        "piece '" + piece.id + "' rotations differ in cell count");
        }
        if (std::find(piece.rotations.begin(), piece.rotations.end(), shape) == piece.rotations.end()) {
            piece.rotations.push_back(std::move(shape));
        }
    }
    if (provenance == Provenance::standard && piece.cell_count() != 4) {
        throw Error(ErrorCode::invalid_piece, "standard piece '" + piece.id + "' must have 4 cells");
    }
    return piece;
}

PieceDef make_rotating_piece(std::string id, std::string display_name, Color color,
                             const Shape& base, Provenance provenance) {
    std::vector<Shape> rotations;
    Shape current = normalize_shape(base);
    for (int i = 0; i < 4; ++i) {
        rotations.push_back(current);
        current = rotate_clockwise(current);
    }
    return make_piece(std::move(id), std::move(display_name), color, std::move(rotations), provenance);
}

const std::vector<PieceDef>& standard_pieces() {
    static const std::vector<PieceDef> pieces = [] {
        const auto std_piece = [](const char* id, const char* name, Color color, Shape base) {
            return make_rotating_piece(id, name, color, base, Provenance::standard);
        };
        return std::vector<PieceDef>{
            std_piece("I", "I", Color::cyan, {{0, 0}, {0, 1}, {0, 2}, {0, 3}}),
            std_piece("O", "O", Color::yellow, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}),
            std_piece("T", "T", Color::purple, {{0, 1}, {1, 0}, {1, 1}, {1, 2}}),
            std_piece("S", "S", Color::green, {{0, 1}, {0, 2}, {1, 0}, {1, 1}}),
            std_piece("Z", "Z", Color::red, {{0, 0}, {0, 1}, {1, 1}, {1, 2}}),
            std_piece("J", "J", Color::blue, {{0, 0}, {1, 0}, {1, 1}, {1, 2}}),
            std_piece("L", "L", Color::orange, {{0, 2}, {1, 0}, {1, 1}, {1, 2}}),
        };
    }();
    return pieces;
}

const std::vector<PieceDef>& novel_pieces() {
    static const std::vector<PieceDef> pieces{
        make_rotating_piece("P5", "P pentomino", custom_color(0),
                            {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}}, Provenance::novel),
        make_rotating_piece("L3", "tromino L", custom_color(1),
                            {{0, 0}, {1, 0}, {1, 1}}, Provenance::novel),
    };
    return pieces;
}

std::vector<PieceDef> default_catalog() {
    std::vector<PieceDef> out = standard_pieces();
    const auto& novel = novel_pieces();
    out.insert(out.end(), novel.begin(), novel.end());
    return out;
}

const PieceDef* find_piece(const std::vector<PieceDef>& pieces, std::string_view id) {
    for (const auto& p : pieces) {
        if (p.id == id) {
            return &p;
        }
    }
    return nullptr;
}

std::vector<std::string> piece_ids(const std::vector<PieceDef>& pieces) {
    std::vector<std::string> ids;
    ids.reserve(pieces.size());
    for (const auto& p : pieces) {
        ids.push_back(p.id);
    }
    return ids;
}

}  // namespace hybrid_tetris::engine
