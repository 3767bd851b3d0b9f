#pragma once

#include <random>
#include <vector>

#include "polygas/model.hpp"
#include "support/oracles.hpp"

// Shared model fixtures. All spaces are self-incompatible on the diagonal
// unless noted, so stability only depends on subsets of distinct polymers.
namespace polygas::fixtures {

inline model::PolymerSpace single_hardcore(double rho, double b = 0.0) {
  using model::PotentialEntry;
  return model::PolymerSpace({"g"}, {rho}, {b}, {{0, 0, ExtendedReal::infinity()}});
}

inline model::PolymerSpace pair_incompatible(double rho) {
  using model::PotentialEntry;
  std::vector<PotentialEntry> entries;
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) entries.push_back({a, b, ExtendedReal::infinity()});
  return model::PolymerSpace({"g1", "g2"}, {rho, rho}, {0.0, 0.0}, entries);
}

// Two polymers, each self-incompatible, attracting each other with V = v.
inline model::PolymerSpace attractive_pair(double rho, double v = -1.0, double b = 0.5) {
  using model::PotentialEntry;
  return model::PolymerSpace({"g1", "g2"}, {rho, rho}, {b, b},
                             {{0, 0, ExtendedReal::infinity()},
                              {1, 1, ExtendedReal::infinity()},
                              {0, 1, ExtendedReal(v)}});
}

inline model::PolymerSpace triangle_hardcore(double rho) {
  using model::PotentialEntry;
  std::vector<PotentialEntry> entries;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) entries.push_back({a, b, ExtendedReal::infinity()});
  return model::PolymerSpace({"g1", "g2", "g3"}, {rho, rho, rho}, {0.0, 0.0, 0.0}, entries);
}

// Two polymers with no interaction at all (independent ideal components),
// each self-incompatible.
inline model::PolymerSpace independent_pair(double rho1, double rho2) {
  using model::PotentialEntry;
  return model::PolymerSpace({"g1", "g2"}, {rho1, rho2}, {0.0, 0.0},
                             {{0, 0, ExtendedReal::infinity()}, {1, 1, ExtendedReal::infinity()}});
}

// Random space with a self-incompatible diagonal, mixed hard-core and
// finite (possibly attractive) off-diagonal entries, B chosen from the
// worst subset energy so the stability inequality holds with equality
// margin, and activities scaled by `activity_scale`.
inline model::PolymerSpace random_stable_space(std::mt19937_64& rng, int count,
                                               double activity_scale) {
  std::vector<model::PotentialEntry> entries;
  std::vector<std::vector<double>> v(static_cast<std::size_t>(count),
                                     std::vector<double>(static_cast<std::size_t>(count), 0.0));
  std::vector<std::vector<bool>> hard(static_cast<std::size_t>(count),
                                      std::vector<bool>(static_cast<std::size_t>(count), false));
  for (int a = 0; a < count; ++a) {
    entries.push_back({a, a, ExtendedReal::infinity()});
    hard[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = true;
  }
  for (int a = 0; a < count; ++a)
    for (int b = a + 1; b < count; ++b) {
      if (oracles::uniform(rng, 0.0, 1.0) < 0.35) {
        entries.push_back({a, b, ExtendedReal::infinity()});
        hard[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
        hard[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
      } else {
        const double value = oracles::uniform(rng, -1.5, 1.0);
        entries.push_back({a, b, ExtendedReal(value)});
        v[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = value;
        v[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = value;
      }
    }

  // Worst subset energy per size; with a hard diagonal, repeats never bind.
  double worst_ratio = 0.0;
  for (unsigned mask = 1; mask < (1u << count); ++mask) {
    double energy = 0.0;
    bool finite = true;
    int size = 0;
    for (int a = 0; a < count && finite; ++a) {
      if (!(mask >> a & 1u)) continue;
      ++size;
      for (int b = a + 1; b < count; ++b) {
        if (!(mask >> b & 1u)) continue;
        if (hard[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) {
          finite = false;
          break;
        }
        energy += v[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      }
    }
    if (finite && size >= 2 && energy < 0.0) worst_ratio = std::max(worst_ratio, -energy / size);
  }

  std::vector<std::string> ids;
  std::vector<double> rho, bs;
  for (int a = 0; a < count; ++a) {
    ids.push_back("g" + std::to_string(a + 1));
    rho.push_back(activity_scale * oracles::uniform(rng, 0.2, 1.0));
    bs.push_back(worst_ratio);
  }
  return model::PolymerSpace(std::move(ids), std::move(rho), std::move(bs), entries);
}

inline std::vector<int> full_volume(const model::PolymerSpace& space) {
  std::vector<int> v(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace polygas::fixtures
