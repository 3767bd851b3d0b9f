#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polygas/model.hpp"

namespace polygas::criterion {

struct PolymerCheck {
  int polymer = 0;
  double lhs = 0.0;              // rho * e^B
  double interaction_sum = 0.0;  // sum over the space of F * mu, plus tail
  double rhs = 0.0;              // mu * e^{-interaction_sum}
  double margin = 0.0;           // rhs - lhs
  bool pass = false;
};

struct CriterionReport {
  std::vector<PolymerCheck> per_polymer;
  bool pass = false;

  const PolymerCheck& check_for(int polymer) const;
};

// Sufficient condition for convergence of the pinned series: per polymer,
// rho * e^B <= mu * e^{-sum F mu}. `tail` optionally adds a per-polymer
// nonnegative bound standing in for polymers missing from a truncated
// space; it is added to the interaction sum.
CriterionReport check_criterion(const model::PolymerSpace& space, const model::WeightAssignment& mu,
                                std::span<const double> tail = {});

struct MuSearchOptions {
  double mu_max = 8.0;
  int coarse_grid = 48;
  int sweeps = 6;
  double refine_tolerance = 1e-10;
};

struct MuSearchResult {
  model::WeightAssignment mu;
  CriterionReport report;
  bool certificate_found = false;
};

// Heuristic search for a passing weight assignment: per-coordinate coarse
// grid plus golden-section refinement on the minimum margin. Any passing mu
// is a valid certificate; no optimality is claimed, and a failed search
// never implies divergence.
MuSearchResult optimize_mu(const model::PolymerSpace& space, const MuSearchOptions& options = {});

struct IterationTrace {
  // partial[l] = rho_tilde[gamma0] * (tree sum over drawings of depth <= l).
  std::vector<double> partial;
  std::optional<double> cap;  // mu[gamma0] when a certificate was supplied
  bool exceeded_cap = false;  // certificate contradiction (or numerics)
};

// Generation-by-generation resummed tree series. Each sweep applies
// g <- exp(sum_gamma' F(gamma, gamma') rho_tilde[gamma'] g[gamma']), whose
// fixed point dominates the pinned series of reweighted activities.
IterationTrace iterate_tree_series(const model::PolymerSpace& space,
                                   std::span<const double> rho_tilde, int gamma0,
                                   int max_generations,
                                   const std::optional<model::WeightAssignment>& mu = std::nullopt);

// Requires check_criterion to pass; returns mu[gamma0] as the certified
// bound on rho_gamma0 * Pi_gamma0 and cross-checks the truncated pinned
// series against it through `cross_check_order`.
double certified_pinned_bound(const model::PolymerSpace& space, const model::WeightAssignment& mu,
                              int gamma0, int cross_check_order = 6,
                              std::span<const double> tail = {});

}  // namespace polygas::criterion
