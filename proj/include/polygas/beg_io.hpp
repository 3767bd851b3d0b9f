#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "polygas/beg.hpp"

namespace polygas::beg {

// Parameter file layout (JSON):
//   {
//     "d": 2, "D": 4.29, "J1": 1.0, "lambda": 1.0, "lambda_prime": 2.0,
//     "c": 0.5, "beta": 8.0,
//     "j_amp": 1.0, "k_amp": 0.0,          // optional; default j_amp = J1
//     "window": [7, 7], "n_max": 3         // optional run geometry
//   }
struct BegRunInput {
  BegParams params;
  std::optional<Window> window;
  std::optional<int> n_max;
};

BegRunInput beg_input_from_json(const nlohmann::json& j);
BegRunInput load_beg_input(const std::string& path);
nlohmann::json beg_input_to_json(const BegRunInput& input);

}  // namespace polygas::beg
