#include "polygas/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "polygas/errors.hpp"

namespace polygas::model {

using nlohmann::json;

namespace {

// nlohmann reports a byte offset; recover line/column for diagnostics.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json value_to_json(ExtendedReal v) {
  if (v.is_infinite()) return json("inf");
  return json(v.value());
}

ExtendedReal value_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return ExtendedReal::infinity();
    throw std::invalid_argument("potential value must be a number or \"inf\"");
  }
  if (!j.is_number()) throw std::invalid_argument("potential value must be a number or \"inf\"");
  return ExtendedReal(j.get<double>());
}

std::vector<double> table_by_id(const json& j, const char* key,
                                const std::vector<std::string>& ids) {
  std::vector<double> out(ids.size(), 0.0);
  if (!j.contains(key)) return out;
  const auto& tab = j.at(key);
  if (!tab.is_object()) throw std::invalid_argument(std::string(key) + " must be an object");
  for (const auto& [id, val] : tab.items()) {
    bool found = false;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) {
        out[i] = val.get<double>();
        found = true;
        break;
      }
    if (!found) throw std::invalid_argument(std::string(key) + " names unknown polymer: " + id);
  }
  return out;
}

}  // namespace

json space_to_json(const PolymerSpace& space) {
  json j;
  j["polymers"] = space.ids();
  json activity = json::object();
  json stab = json::object();
  for (int i = 0; i < space.size(); ++i) {
    activity[space.id(i)] = space.activity(i);
    stab[space.id(i)] = space.stability_b(i);
  }
  j["activity"] = activity;
  j["stability_b"] = stab;
  json pot = json::array();
  for (const auto& e : space.nondefault_entries())
    pot.push_back(json::array({space.id(e.a), space.id(e.b), value_to_json(e.v)}));
  j["potential"] = pot;
  j["default_potential"] = space.default_potential();
  return j;
}

PolymerSpace space_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("model file must hold a JSON object");
  if (!j.contains("polymers")) throw std::invalid_argument("model file lacks \"polymers\"");
  auto ids = j.at("polymers").get<std::vector<std::string>>();
  auto activity = table_by_id(j, "activity", ids);
  auto stability = table_by_id(j, "stability_b", ids);
  const double default_potential = j.value("default_potential", 0.0);

  auto index_of = [&](const std::string& id) -> int {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return static_cast<int>(i);
    throw std::invalid_argument("potential names unknown polymer: " + id);
  };

  std::vector<PotentialEntry> entries;
  if (j.contains("potential")) {
    for (const auto& row : j.at("potential")) {
      if (!row.is_array() || row.size() != 3)
        throw std::invalid_argument("potential rows must be [id, id, value]");
      entries.push_back({index_of(row[0].get<std::string>()), index_of(row[1].get<std::string>()),
                         value_from_json(row[2])});
    }
  }
  return PolymerSpace(std::move(ids), std::move(activity), std::move(stability), entries,
                      default_potential);
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(line, col, origin + ": " + e.what());
  }
}

PolymerSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return space_from_json(parse_json_text(buf.str(), path));
}

void save_space(const PolymerSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << space_to_json(space).dump(2) << '\n';
}

WeightAssignment weights_from_json(const json& j, const PolymerSpace& space) {
  if (!j.is_object() || !j.contains("mu")) throw std::invalid_argument("weight file lacks \"mu\"");
  WeightAssignment w;
  w.mu.assign(static_cast<std::size_t>(space.size()), 0.0);
  for (const auto& [id, val] : j.at("mu").items())
    w.mu[static_cast<std::size_t>(space.index_of(id))] = val.get<double>();
  for (double m : w.mu)
    if (!(m >= 0.0) || !std::isfinite(m))
      throw std::invalid_argument("mu entries must be finite and >= 0");
  return w;
}

json weights_to_json(const WeightAssignment& w, const PolymerSpace& space) {
  json mu = json::object();
  for (int i = 0; i < space.size(); ++i) mu[space.id(i)] = w.mu[static_cast<std::size_t>(i)];
  return json{{"mu", mu}};
}

}  // namespace polygas::model
