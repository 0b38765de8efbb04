#include "hybrid_tetris/engine/piece_io.hpp"

#include <fstream>

#include "hybrid_tetris/error.hpp"

namespace hybrid_tetris::engine {

using nlohmann::json;

void to_json(json& j, const PieceDef& piece) {
    json rotations = json::array();
    for (const auto& shape : piece.rotations) {
        json cells = json::array();
        for (const auto& o : shape) {
            cells.push_back({o.row, o.col});
        }
        rotations.push_back(std::move(cells));
    }
    j = json{{"id", piece.id},
             {"displayName", piece.display_name},
             {"color", color_name(piece.color)},
             {"rotations", std::move(rotations)},
             {"provenance", piece.provenance == Provenance::standard ? "standard" : "novel"}};
}

void from_json(const json& j, PieceDef& piece) {
    try {
        std::vector<Shape> rotations;
        for (const auto& cells : j.at("rotations")) {
            Shape shape;
            for (const auto& cell : cells) {
                if (!cell.is_array() || cell.size() != 2) {
                    throw Error(ErrorCode::invalid_piece, "cell offsets must be [row, col] pairs");
                }
                shape.push_back({cell[0].get<int>(), cell[1].get<int>()});
            }
            rotations.push_back(std::move(shape));
        }
        const auto provenance = j.value("provenance", std::string("standard"));
        if (provenance != "standard" && provenance != "novel") {
            throw Error(ErrorCode::invalid_piece, "unknown provenance '" + provenance + "'");
        }
        const auto id = j.at("id").get<std::string>();
        piece = make_piece(id, j.value("displayName", id), parse_color(j.at("color").get<std::string>()),
                           std::move(rotations),
                           provenance == "standard" ? Provenance::standard : Provenance::novel);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_piece, std::string("malformed piece definition: ") + e.what());
    }
}

void to_json(json& j, const ScoringTable& table) {
    j = json{{"points", table.base}};
}

void from_json(const json& j, ScoringTable& table) {
    try {
        const auto& points = j.at("points");
        if (!points.is_array() || points.size() != table.base.size()) {
            throw Error(ErrorCode::invalid_config, "scoring table needs 4 point values (1,2,3,4+ lines)");
        }
        for (std::size_t i = 0; i < table.base.size(); ++i) {
            table.base[i] = points[i].get<std::int64_t>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed scoring table: ") + e.what());
    }
    table.validate();
}

std::vector<PieceDef> parse_pieces(const json& doc) {
    const json& list = doc.is_object() && doc.contains("pieces") ? doc.at("pieces") : doc;
    if (!list.is_array()) {
        throw Error(ErrorCode::invalid_piece, "piece document must be an array");
    }
    std::vector<PieceDef> pieces;
    for (const auto& entry : list) {
        PieceDef piece = entry.get<PieceDef>();
        if (find_piece(pieces, piece.id) != nullptr) {
            throw Error(ErrorCode::invalid_piece, "duplicate piece id '" + piece.id + "'");
        }
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

std::vector<PieceDef> load_pieces(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open piece file " + path.string());
    }
    try {
        return parse_pieces(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_piece, "piece file " + path.string() + ": " + e.what());
    }
}

json pieces_document(const std::vector<PieceDef>& pieces) {
    return json{{"pieces", pieces}};
}

}  // namespace hybrid_tetris::engine
