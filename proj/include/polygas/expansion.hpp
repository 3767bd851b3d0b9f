#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polygas/model.hpp"

namespace polygas::expansion {

struct PartitionOptions {
  // Highest configuration size summed. -1 means "run until the remaining
  // terms are exactly zero", which requires every polymer in the volume to
  // be self-incompatible; other spaces must pass an explicit cap.
  int max_order = -1;
  std::uint64_t node_cap = 200'000'000;  // enumeration guard
};

struct PartitionResult {
  double value = 1.0;       // sum through max_order (exact when `exact`)
  double tail_bound = 0.0;  // stability bound on the dropped orders
  int max_order_used = 0;
  bool exact = false;
  // order_terms[n] is the total weight of size-n configurations (term 0 is
  // the empty configuration, 1); value is their sum.
  std::vector<double> order_terms;
};

// Grand-canonical partition function over the given volume (subset of
// polymer indices). Configurations are ordered tuples with repetition; the
// sum is organised over multisets with the 1/n! folded into multiplicities.
PartitionResult partition_function(const model::PolymerSpace& space, std::span<const int> volume,
                                   const PartitionOptions& options = {});

// Ursell coefficient: 1 for a single argument, otherwise the sum over all
// connected graphs on the configuration of the product of expm1(-V) edge
// factors, evaluated by direct enumeration with memoised edge factors.
double ursell(const model::PolymerSpace& space, std::span<const int> config);

// Truncated series with per-order terms and running partial sums.
struct SeriesTruncation {
  int first_order = 0;
  std::vector<double> terms;         // terms[k] is order first_order + k
  std::vector<double> partial_sums;  // running sums, same indexing
  bool monotone = false;             // true when every term is >= 0 by construction

  int max_order() const { return first_order + static_cast<int>(terms.size()) - 1; }
  double term(int order) const { return terms.at(static_cast<std::size_t>(order - first_order)); }
  double partial(int order) const {
    return partial_sums.at(static_cast<std::size_t>(order - first_order));
  }
  double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

// Positive-term log-series: orders 1..N of the absolute Mayer expansion of
// log Xi over the volume, using the space activities as rho.
SeriesTruncation abs_log_xi(const model::PolymerSpace& space, std::span<const int> volume, int max_order);

// Signed Mayer series for log Xi through order N (same sums with signs).
SeriesTruncation log_xi_series(const model::PolymerSpace& space, std::span<const int> volume, int max_order);

// Pinned positive series: order n sums |ursell(gamma0, gamma_1..gamma_n)|
// against activities of the unpinned arguments; order 0 term is 1. The
// summation domain defaults to the whole space.
SeriesTruncation pinned_sum(const model::PolymerSpace& space, int gamma0, int max_order,
                            std::optional<std::span<const int>> volume = std::nullopt);

namespace detail {
// Edge factors expm1(-V) for a configuration, packed row-major k x k.
std::vector<double> edge_factors(const model::PolymerSpace& space, std::span<const int> config);
// Connected-graph sum over k vertices by direct subset enumeration.
double connected_sum_direct(const std::vector<double>& f, int k);
// Same value via the subset inclusion-exclusion recursion (k <= 20-ish);
// used for series terms where direct enumeration is too slow.
double connected_sum_recursive(const std::vector<double>& f, int k);
}  // namespace detail

}  // namespace polygas::expansion
