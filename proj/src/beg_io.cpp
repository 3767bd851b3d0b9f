#include "polygas/beg_io.hpp"

#include <fstream>
#include <sstream>

#include "polygas/model_io.hpp"

namespace polygas::beg {

using nlohmann::json;

BegRunInput beg_input_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("parameter file must hold a JSON object");
  BegRunInput input;
  auto& p = input.params;
  p.d = j.value("d", 2);
  if (!j.contains("D")) throw std::invalid_argument("parameter file lacks \"D\"");
  p.crystal_field = j.at("D").get<double>();
  p.j1 = j.value("J1", 1.0);
  p.lambda = j.value("lambda", 1.0);
  p.lambda_prime = j.value("lambda_prime", p.lambda + 1.0);
  p.c = j.value("c", 0.0);
  p.beta = j.value("beta", 1.0);
  p.j_amp = j.value("j_amp", p.j1);
  p.k_amp = j.value("k_amp", 0.0);
  p.validate();

  if (j.contains("window")) {
    Window w;
    w.d = p.d;
    const auto& window_field = j.at("window");
    if (window_field.is_number_integer()) {
      for (int k = 0; k < p.d; ++k) w.extent[static_cast<std::size_t>(k)] = window_field.get<int>();
    } else {
      const auto lens = window_field.get<std::vector<int>>();
      if (static_cast<int>(lens.size()) != p.d)
        throw std::invalid_argument("window must list one extent per dimension");
      for (int k = 0; k < p.d; ++k) w.extent[static_cast<std::size_t>(k)] = lens[static_cast<std::size_t>(k)];
    }
    w.site_count();  // validates extents
    input.window = w;
  }
  if (j.contains("n_max")) input.n_max = j.at("n_max").get<int>();
  return input;
}

BegRunInput load_beg_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return beg_input_from_json(model::parse_json_text(buf.str(), path));
}

json beg_input_to_json(const BegRunInput& input) {
  const auto& p = input.params;
  json j{{"d", p.d},
         {"D", p.crystal_field},
         {"J1", p.j1},
         {"lambda", p.lambda},
         {"lambda_prime", p.lambda_prime},
         {"c", p.c},
         {"beta", p.beta},
         {"j_amp", p.j_amp},
         {"k_amp", p.k_amp}};
  if (input.window) {
    std::vector<int> lens;
    for (int k = 0; k < p.d; ++k) lens.push_back(input.window->extent[static_cast<std::size_t>(k)]);
    j["window"] = lens;
  }
  if (input.n_max) j["n_max"] = *input.n_max;
  return j;
}

}  // namespace polygas::beg
