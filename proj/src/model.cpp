#include "polygas/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "polygas/errors.hpp"

namespace polygas::model {

namespace {
constexpr double inf_sentinel = std::numeric_limits<double>::infinity();
}

PolymerSpace::PolymerSpace(std::vector<std::string> ids,
                           std::vector<double> activity,
                           std::vector<double> stability_b,
                           const std::vector<PotentialEntry>& potential,
                           double default_potential)
    : ids_(std::move(ids)),
      activity_(std::move(activity)),
      stability_b_(std::move(stability_b)),
      default_potential_(default_potential) {
  const auto k = ids_.size();
  if (k == 0) throw std::invalid_argument("polymer space must be non-empty");
  if (activity_.size() != k || stability_b_.size() != k)
    throw std::invalid_argument("activity/stability tables must match the polymer list");
  for (std::size_t i = 0; i < k; ++i) {
    if (ids_[i].empty()) throw std::invalid_argument("polymer ids must be non-empty");
    for (std::size_t j = i + 1; j < k; ++j)
      if (ids_[i] == ids_[j]) throw std::invalid_argument("duplicate polymer id: " + ids_[i]);
    if (!(activity_[i] >= 0.0)) throw std::invalid_argument("activities must be >= 0");
    if (!(stability_b_[i] >= 0.0)) throw std::invalid_argument("stability B must be >= 0");
    if (!std::isfinite(default_potential_)) throw std::invalid_argument("default potential must be finite");
  }
  potential_.assign(k * (k + 1) / 2, default_potential_);
  for (const auto& e : potential) {
    if (e.a < 0 || e.b < 0 || e.a >= static_cast<int>(k) || e.b >= static_cast<int>(k))
      throw std::invalid_argument("potential entry index out of range");
    potential_[tri_index(e.a, e.b)] = pack_potential(e.v);
  }
}

PolymerSpace PolymerSpace::from_packed(std::vector<std::string> ids,
                                       std::vector<double> activity,
                                       std::vector<double> stability_b,
                                       std::vector<double> packed_potential,
                                       double default_potential) {
  PolymerSpace s(std::move(ids), std::move(activity), std::move(stability_b), {}, default_potential);
  if (packed_potential.size() != s.potential_.size())
    throw std::invalid_argument("packed potential has wrong size");
  s.potential_ = std::move(packed_potential);
  return s;
}

PolymerSpace PolymerSpace::from_potential_fn(std::vector<std::string> ids,
                                             std::vector<double> activity,
                                             std::vector<double> stability_b,
                                             std::function<double(int, int)> potential_fn) {
  if (!potential_fn) throw std::invalid_argument("null potential callback");
  PolymerSpace s(std::move(ids), std::move(activity), std::move(stability_b), {}, 0.0);
  s.potential_.clear();
  s.potential_.shrink_to_fit();
  s.potential_fn_ = std::move(potential_fn);
  return s;
}

double PolymerSpace::pack_potential(ExtendedReal v) {
  return v.is_infinite() ? inf_sentinel : v.value();
}

int PolymerSpace::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == id) return static_cast<int>(i);
  throw std::invalid_argument("unknown polymer id: " + std::string(id));
}

std::size_t PolymerSpace::tri_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  const auto k = static_cast<std::size_t>(size());
  const auto ua = static_cast<std::size_t>(a);
  const auto ub = static_cast<std::size_t>(b);
  // Row-packed upper triangle: row a starts after k + (k-1) + ... rows.
  return ua * k - ua * (ua + 1) / 2 + ub;
}

ExtendedReal PolymerSpace::potential(int a, int b) const {
  if (a < 0 || b < 0 || a >= size() || b >= size())
    throw std::invalid_argument("polymer index out of range");
  const double stored = potential_fn_ ? potential_fn_(a, b) : potential_[tri_index(a, b)];
  return std::isinf(stored) ? ExtendedReal::infinity() : ExtendedReal(stored);
}

bool PolymerSpace::compatible(int a, int b) const { return !potential(a, b).is_infinite(); }

double PolymerSpace::kernel_f(int a, int b) const {
  const ExtendedReal v = potential(a, b);
  return v.is_infinite() ? 1.0 : std::abs(v.value());
}

std::vector<PotentialEntry> PolymerSpace::nondefault_entries() const {
  std::vector<PotentialEntry> out;
  for (int a = 0; a < size(); ++a)
    for (int b = a; b < size(); ++b) {
      const ExtendedReal v = potential(a, b);
      if (v.is_infinite() || v.value() != default_potential_) out.push_back({a, b, v});
    }
  return out;
}

PolymerSpace PolymerSpace::with_activities(std::vector<double> activity) const {
  PolymerSpace s = *this;
  if (activity.size() != ids_.size()) throw std::invalid_argument("activity table has wrong size");
  for (double r : activity)
    if (!(r >= 0.0)) throw std::invalid_argument("activities must be >= 0");
  s.activity_ = std::move(activity);
  return s;
}

ExtendedReal energy(const PolymerSpace& space, std::span<const int> config) {
  if (config.empty()) throw std::invalid_argument("configuration must be non-empty");
  ExtendedReal total(0.0);
  for (std::size_t i = 0; i < config.size(); ++i)
    for (std::size_t j = i + 1; j < config.size(); ++j) {
      total += space.potential(config[i], config[j]);
      if (total.is_infinite()) return total;
    }
  return total;
}

StabilityReport verify_stability(const PolymerSpace& space, int max_multiset_size,
                                 std::uint64_t multiset_cap) {
  if (max_multiset_size < 2) throw std::invalid_argument("max multiset size must be >= 2");
  StabilityReport report;
  report.max_multiset_size = max_multiset_size;

  std::vector<int> config;
  // Nondecreasing index sequences of each size; the energy is symmetric, so
  // multisets cover all of P^n up to permutation.
  auto rec = [&](auto&& self, int first) -> bool {
    if (static_cast<int>(config.size()) >= 2) {
      if (++report.multisets_checked > multiset_cap)
        throw CapacityError("stability check exceeded multiset cap");
      const ExtendedReal e = energy(space, config);
      if (e.is_finite()) {
        double bound = 0.0;
        for (int idx : config) bound -= space.stability_b(idx);
        if (e.value() < bound) {
          report.passed = false;
          report.violation = StabilityViolation{config, e.value(), bound};
          return false;
        }
      }
    }
    if (static_cast<int>(config.size()) == max_multiset_size) return true;
    for (int j = first; j < space.size(); ++j) {
      config.push_back(j);
      const bool keep_going = self(self, j);
      config.pop_back();
      if (!keep_going) return false;
    }
    return true;
  };
  rec(rec, 0);
  return report;
}

}  // namespace polygas::model
