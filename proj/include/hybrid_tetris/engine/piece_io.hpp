#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"

#include "hybrid_tetris/engine/game.hpp"
#include "hybrid_tetris/engine/piece.hpp"

namespace hybrid_tetris::engine {

// {id, displayName, color, rotations: [[[r,c],...],...], provenance}
void to_json(nlohmann::json& j, const PieceDef& piece);
void from_json(const nlohmann::json& j, PieceDef& piece);

void to_json(nlohmann::json& j, const ScoringTable& table);
void from_json(const nlohmann::json& j, ScoringTable& table);

// Accepts either a bare array of pieces or {"pieces": [...]}.
std::vector<PieceDef> parse_pieces(const nlohmann::json& doc);
std::vector<PieceDef> load_pieces(const std::filesystem::path& path);
nlohmann::json pieces_document(const std::vector<PieceDef>& pieces);

}  // namespace hybrid_tetris::engine
