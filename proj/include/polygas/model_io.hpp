#pragma once

#include <string>

#include "json.hpp"
#include "polygas/model.hpp"

namespace polygas::model {

// Model file layout (JSON):
//   {
//     "polymers": ["a", "b", ...],
//     "activity": {"a": 0.25, ...},             // missing entries default to 0
//     "stability_b": {"a": 0.5, ...},           // missing entries default to 0
//     "potential": [["a", "b", -1.0], ["a", "a", "inf"], ...],
//     "default_potential": 0.0                  // optional, for unlisted pairs
//   }
// Numbers round-trip bit-exactly through save/load.

nlohmann::json space_to_json(const PolymerSpace& space);
PolymerSpace space_from_json(const nlohmann::json& j);

// File variants; parse failures throw ParseError carrying line/column.
PolymerSpace load_space(const std::string& path);
void save_space(const PolymerSpace& space, const std::string& path);

// Shared helper: parse text as JSON, mapping syntax errors to ParseError
// with a line/column computed from the byte offset.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

WeightAssignment weights_from_json(const nlohmann::json& j, const PolymerSpace& space);
nlohmann::json weights_to_json(const WeightAssignment& w, const PolymerSpace& space);

}  // namespace polygas::model
