#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "polygas/model.hpp"

// Brute-force reference computations for the test suites. Everything here
// is written independently of the library code paths it is used to check.
namespace polygas::oracles {

// Number of connected graphs on n labeled vertices via the subtraction
// recurrence against all graphs (no enumeration involved).
std::uint64_t connected_graph_count(int n);

// Connected-graph sum over edge weights f (k x k, symmetric) by peeling the
// component of vertex 0 out of the all-graphs product.
double connected_sum(const std::vector<double>& f, int k);

// Ursell value from the space potential via connected_sum.
double ursell(const model::PolymerSpace& space, std::span<const int> config);

// Pinned-series order term by direct summation over ordered tuples in
// volume^n (no multiset shortcut): (1/n!) sum |ursell(pin, tuple)| prod rho.
double pinned_order_term(const model::PolymerSpace& space, int gamma0,
                         std::span<const int> volume, int order);

// Signed log-series order term over ordered tuples in volume^n.
double log_xi_order_term(const model::PolymerSpace& space, std::span<const int> volume, int order);

// Partial sum (orders 0..max_order) of the reweighted labeled-tree series:
// order n sums over all trees on {0..n} and all tuples of polymers on the
// non-root vertices of prod over tree edges of F, against rho_tilde.
double tree_series_partial(const model::PolymerSpace& space, std::span<const double> rho_tilde,
                           int gamma0, int max_order);

// Sum over planar rooted drawings with at most max_vertices non-root
// vertices and depth <= max_depth of prod_v (1/s_v!) prod_edges F rho_tilde,
// rooted at gamma0. Enumerates drawings explicitly.
double planar_tree_partial(const model::PolymerSpace& space, std::span<const double> rho_tilde,
                           int gamma0, int max_depth, int max_vertices);

// Portable uniform double in [lo, hi) from the top 53 bits of the engine.
double uniform(std::mt19937_64& rng, double lo, double hi);

}  // namespace polygas::oracles
