#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polygas/extended_real.hpp"
#include "polygas/model.hpp"

namespace polygas::beg {

// Lattice site; the first `d` coordinates are in use.
using Site = std::array<int, 4>;

int l1_distance(const Site& a, const Site& b, int d);

// Box of sites 0 <= x_i < extent_i.
struct Window {
  int d = 2;
  std::array<int, 4> extent{};

  int site_count() const;
  std::vector<Site> sites() const;  // lexicographic order
  bool contains(const Site& x) const;
  // L1 distance from x to the nearest site outside the box.
  int distance_to_exterior(const Site& x) const;
};

// Spin-1 lattice gas parameters. The couplings follow the power-law family
//   J_xy = j_amp / r^(d+lambda),   K_xy = k_amp / r^(d+lambda),
// with r the nearest-neighbor path (L1) distance; j1 is the decay-bound
// amplitude, so admissibility means j_amp + |k_amp| <= 2 j1.
struct BegParams {
  int d = 2;
  double crystal_field = 0.0;  // on-site weight D
  double j1 = 1.0;
  double lambda = 1.0;
  double lambda_prime = 2.0;
  double c = 0.0;  // lower-bound constant: stored and validated, enters no formula
  double beta = 1.0;
  double j_amp = 1.0;
  double k_amp = 0.0;

  double coupling_j(int r) const;
  double coupling_k(int r) const;
  // Spins interact slowly enough that finite-range methods do not apply.
  bool slow_decay_regime() const { return lambda_prime < 2 * d + 1; }

  void validate() const;
};

// Connected support with a +-1 spin per site.
struct BegPolymer {
  std::vector<Site> support;  // sorted lexicographically, connected
  std::vector<int> spins;     // +1 / -1 aligned with support

  int size() const { return static_cast<int>(support.size()); }
  std::string id(int d) const;
};

// Connected supports of size 1..n_max containing the origin / inside the
// window, each sorted; results ordered by (size, lexicographic support).
std::vector<std::vector<Site>> connected_supports_anchored(int d, int n_max);
std::vector<std::vector<Site>> connected_supports_in(const Window& window, int n_max);

// Supports as above with every spin assignment attached. The site-anchored
// overload translates the origin-anchored family.
std::vector<BegPolymer> enumerate_polymers(int d, int n_max);
std::vector<BegPolymer> enumerate_polymers(int d, int n_max, const Site& anchor);
std::vector<BegPolymer> enumerate_polymers(const Window& window, int n_max);

// Number of connected supports of size n containing the origin.
std::int64_t animal_count(int d, int n);

// Number of sites at L1 distance exactly n from the origin, by enumeration.
std::int64_t surface_count(int d, int n);

bool support_connected(const std::vector<Site>& support, int d);

int support_distance(const BegPolymer& a, const BegPolymer& b, int d);

// Pair interaction: +inf when the supports come closer than distance 2,
// otherwise the coupling sum across the two supports.
ExtendedReal interaction_w(const BegPolymer& a, const BegPolymer& b, const BegParams& params);

double self_energy_a(const BegPolymer& p, const BegParams& params);
double activity_rho(const BegPolymer& p, const BegParams& params);
double stability_b(const BegPolymer& p, const BegParams& params);

// Value with a certified absolute error bound.
struct SeriesValue {
  double value = 0.0;
  double abs_error_bound = 0.0;
};

// Certified sum of r^-s for r = start..infinity (s > 1).
SeriesValue sum_inverse_power(double s, int start);

// Half the summed coupling row: (1/2) sum_{y != 0} (J_0y + |K_0y|).
SeriesValue coupling_j(const BegParams& params);

// J2 = ((2d)^d j1 / d!) * sum_{n>=2} n^-(1+lambda).
SeriesValue j2_constant(const BegParams& params);

double jbeta(const BegParams& params);  // 2d + beta * J2

struct EnvelopeResult {
  double x = 0.0;  // 8 d e^{-beta (D - J)}
  double y = 0.0;  // x e^alpha
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool geometric = false;  // y < 1
  bool pass = false;
};

// Checks sum_{n>=1} n y^n <= alpha / J_beta in closed form.
EnvelopeResult convergence_envelope(const BegParams& params, double alpha);

struct Beta0Result {
  double beta0 = 0.0;
  double residual = 0.0;       // |g(beta0)| of the crossing function
  double bracket_width = 0.0;
  double j = 0.0;
  double j2 = 0.0;
  int iterations = 0;
};

// Positive root of e^{beta (D - J)} / (8 sqrt(e) d) = 2d + 1 + beta * J2,
// by bisection (params.beta is ignored).
Beta0Result beta0(const BegParams& params);

// Components of the nonzero-spin set of sigma (listed in window-site order)
// as polymers; the inverse writes spins back onto the window.
std::vector<BegPolymer> polymers_of_configuration(const Window& window, std::span<const int> sigma);
std::vector<int> configuration_of_family(const Window& window, const std::vector<BegPolymer>& family);

// Energy of a spin configuration on the window with free boundary.
double spin_hamiltonian(const Window& window, std::span<const int> sigma, const BegParams& params);

struct BijectionReport {
  double z_spin = 0.0;
  double z_polymer = 0.0;
  double rel_error = 0.0;
  std::int64_t spin_configs = 0;
  int polymer_count = 0;
  bool roundtrip_ok = false;
  bool distances_ok = false;
  bool energy_identity_ok = false;
  bool pass = false;
};

// Computes the window partition function by the full spin sum and by the
// polymer-gas sum and compares; also exercises the configuration <->
// polymer-family maps on every configuration.
BijectionReport spin_polymer_bijection_check(const BegParams& params, const Window& window,
                                             double rel_tolerance = 1e-10);

// Finite truncation of the polymer gas for the convergence certificate:
// all polymers with support in the window and at most n_max sites, plus a
// per-polymer analytic upper bound on the interaction sum contributed by
// every polymer missing from the truncation.
struct TruncatedSpace {
  model::PolymerSpace space;
  std::vector<BegPolymer> polymers;   // aligned with space indices
  std::vector<double> tails;          // per-polymer tail for the criterion
  model::WeightAssignment mu;         // e^{(alpha - beta (D - J)) |p|}
  double alpha = 0.5;
  double j = 0.0;
  double j2 = 0.0;
  double jbeta = 0.0;
  double x = 0.0;
  double y = 0.0;
};

TruncatedSpace build_polymer_space(const BegParams& params, const Window& window, int n_max,
                                   double alpha = 0.5);

}  // namespace polygas::beg
