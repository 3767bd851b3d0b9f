#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polygas/graphs.hpp"
#include "polygas/model.hpp"

namespace polygas::treebound {

// Symmetric finite pair potential on vertices 0..n-1; the diagonal is
// unused.
class FinitePotential {
public:
  explicit FinitePotential(int n);
  int size() const { return n_; }
  double operator()(int i, int j) const { return v_[index(i, j)]; }
  void set(int i, int j, double value);

private:
  std::size_t index(int i, int j) const;
  int n_;
  std::vector<double> v_;
};

// Increasing chain X_1 c X_2 c ... c X_{n-1} with |X_l| = l and X_1 holding
// the first vertex, encoded by the order vertices are added: X_l is the set
// of the first l entries of `order` (and order[0] == 0).
struct InterpolationChain {
  std::vector<int> order;

  int n() const { return static_cast<int>(order.size()); }
  // True when exactly one endpoint lies in X_l (1 <= l <= n-1).
  bool crosses(int l, int i, int j) const;
  std::vector<bool> membership(int l) const;
};

std::vector<InterpolationChain> interpolation_chains(int n);

// The chain supports the measure for tau iff X_l contains exactly l-1 tree
// edges for every l.
bool chain_compatible_with(const InterpolationChain& chain, const graphs::LabeledTree& tau);

// Number of tau edges crossing each X_l (l = 1..n-1). On a compatible chain
// every count is >= 1; a zero count throws std::logic_error rather than
// being patched over.
std::vector<int> crossing_counts(const InterpolationChain& chain, const graphs::LabeledTree& tau);

// Interpolated potential sum: each pair is damped by the product of t_l
// over the levels it crosses.
double convex_decomposition_k(const FinitePotential& v, const InterpolationChain& chain,
                              std::span<const double> t);

struct QuadratureOptions {
  int order = 24;
  bool check_with_doubled_order = false;
  double check_tolerance = 1e-7;
};

struct QuadratureResult {
  double value = 0.0;
  std::optional<double> doubled_order_value;
  bool consistent = true;  // false when the two orders disagree beyond tolerance
};

// Spanning-tree representation of the connected-graph sum for a finite
// potential: sum over trees of prod(-V_ij) integrated against the chain
// measure, by tensor Gauss-Legendre quadrature. Capped at 5 vertices.
QuadratureResult tree_graph_rhs(const FinitePotential& v, const QuadratureOptions& options = {});

// Total mass of the chain measure for one tree (must equal 1). The
// integrand factorises per axis, so this uses per-axis quadrature products.
QuadratureResult measure_mass(const graphs::LabeledTree& tau, const QuadratureOptions& options = {});

// Finite stand-in for a space with incompatibilities: V_H equals H on
// incompatible pairs and V elsewhere.
struct CutoffPotential {
  const model::PolymerSpace* base = nullptr;
  double h = 0.0;

  model::PolymerSpace materialize() const;
};

// Smallest cutoff H0 >= 0 such that every subset of the configuration
// satisfies the stability inequality under V_H for all H >= H0, computed by
// the subset scan over negative compatible pairs.
double cutoff_h0(const model::PolymerSpace& space, std::span<const int> config);

// Spanning-tree upper bound on |ursell|: e^{sum B} * sum over trees on the
// configuration of the product of kernel factors F over tree edges.
double ursell_tree_bound(const model::PolymerSpace& space, std::span<const int> config);

}  // namespace polygas::treebound
