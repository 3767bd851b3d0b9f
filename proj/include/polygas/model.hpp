#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polygas/extended_real.hpp"

namespace polygas::model {

struct PotentialEntry {
  int a = 0;
  int b = 0;
  ExtendedReal v;
};

// Finite polymer space: indexed polymers with nonnegative activities, a
// symmetric pair potential with values in R + {+inf} (diagonal included),
// and a per-polymer nonnegative stability weight. Immutable once built.
class PolymerSpace {
public:
  PolymerSpace(std::vector<std::string> ids,
               std::vector<double> activity,
               std::vector<double> stability_b,
               const std::vector<PotentialEntry>& potential,
               double default_potential = 0.0);

  // Bulk constructor: packed upper triangle (including the diagonal) in row
  // order (0,0), (0,1), ..., (0,k-1), (1,1), ...; +inf entries are passed
  // as ExtendedReal::infinity() mapped to an internal sentinel by the caller
  // via pack_potential().
  static PolymerSpace from_packed(std::vector<std::string> ids,
                                  std::vector<double> activity,
                                  std::vector<double> stability_b,
                                  std::vector<double> packed_potential,
                                  double default_potential = 0.0);

  // Lazy variant for large spaces where a dense pair table would not fit:
  // the callback returns the packed value (IEEE +inf for incompatibility)
  // and must be symmetric and pure.
  static PolymerSpace from_potential_fn(std::vector<std::string> ids,
                                        std::vector<double> activity,
                                        std::vector<double> stability_b,
                                        std::function<double(int, int)> potential_fn);

  static double pack_potential(ExtendedReal v);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::string& id(int i) const { return ids_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& ids() const { return ids_; }
  int index_of(std::string_view id) const;  // throws std::invalid_argument

  double activity(int i) const { return activity_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& activities() const { return activity_; }
  double stability_b(int i) const { return stability_b_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& stability_bs() const { return stability_b_; }
  double default_potential() const { return default_potential_; }

  ExtendedReal potential(int a, int b) const;
  bool compatible(int a, int b) const;

  // Interaction kernel: 1 on incompatible pairs, |V| otherwise.
  double kernel_f(int a, int b) const;

  // Entries that differ from the default, in (a <= b) order; used by IO.
  std::vector<PotentialEntry> nondefault_entries() const;

  // Space with identical ids/B and replaced activities.
  PolymerSpace with_activities(std::vector<double> activity) const;

private:
  PolymerSpace() = default;
  std::size_t tri_index(int a, int b) const;

  std::vector<std::string> ids_;
  std::vector<double> activity_;
  std::vector<double> stability_b_;
  // Packed symmetric storage; +inf held as an IEEE infinity sentinel here
  // only. All arithmetic goes through the tagged ExtendedReal accessor.
  std::vector<double> potential_;
  std::function<double(int, int)> potential_fn_;  // used when non-null
  double default_potential_ = 0.0;
};

// Total pair energy of an ordered configuration (repetitions allowed);
// +inf exactly when some pair is incompatible.
ExtendedReal energy(const PolymerSpace& space, std::span<const int> config);

struct WeightAssignment {
  std::vector<double> mu;  // finite, >= 0
};

struct StabilityViolation {
  std::vector<int> config;  // offending multiset, nondecreasing indices
  double energy = 0.0;
  double bound = 0.0;  // -sum B
};

struct StabilityReport {
  bool passed = true;
  int max_multiset_size = 0;
  std::uint64_t multisets_checked = 0;
  std::optional<StabilityViolation> violation;
};

// Exhaustively checks sum_{i<j} V >= -sum_i B over all polymer multisets of
// size 2..max_multiset_size. Multisets containing an incompatible pair pass
// vacuously. Guarded by a total multiset cap.
StabilityReport verify_stability(const PolymerSpace& space, int max_multiset_size,
                                 std::uint64_t multiset_cap = 20'000'000);

}  // namespace polygas::model
