#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "polygas/errors.hpp"
#include "polygas/expansion.hpp"
#include "polygas/treebound.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace polygas;
using treebound::FinitePotential;
using treebound::InterpolationChain;

namespace {

FinitePotential random_potential(std::mt19937_64& rng, int n, double lo, double hi) {
  FinitePotential v(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v.set(i, j, oracles::uniform(rng, lo, hi));
  return v;
}

double connected_sum_of(const FinitePotential& v) {
  const int n = v.size();
  std::vector<double> f(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      f[static_cast<std::size_t>(i) * n + j] = std::expm1(-v(i, j));
      f[static_cast<std::size_t>(j) * n + i] = std::expm1(-v(i, j));
    }
  return oracles::connected_sum(f, n);
}

}  // namespace

TEST_CASE("chains start at vertex zero and count (n-1)!") {
  const auto chains3 = treebound::interpolation_chains(3);
  CHECK(chains3.size() == 2);
  const auto chains5 = treebound::interpolation_chains(5);
  CHECK(chains5.size() == 24);
  for (const auto& chain : chains5) CHECK(chain.order.front() == 0);
}

TEST_CASE("chain compatibility and crossing counts") {
  // path 0-1-2: only the chain adding 1 then 2 keeps one tree edge per cut
  graphs::LabeledTree path{3, {{0, 1}, {1, 2}}};
  const auto chains = treebound::interpolation_chains(3);
  int compatible = 0;
  for (const auto& chain : chains) {
    if (!treebound::chain_compatible_with(chain, path)) continue;
    ++compatible;
    CHECK(chain.order == std::vector<int>{0, 1, 2});
    CHECK(treebound::crossing_counts(chain, path) == std::vector<int>{1, 1});
  }
  CHECK(compatible == 1);

  // star at 0: both chains work
  graphs::LabeledTree star{3, {{0, 1}, {0, 2}}};
  for (const auto& chain : chains) {
    CHECK(treebound::chain_compatible_with(chain, star));
    const auto counts = treebound::crossing_counts(chain, star);
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 1);
  }
}

TEST_CASE("crossing counts never vanish on compatible chains") {
  for (int n = 2; n <= 5; ++n)
    for (const auto& tau : graphs::trees_on(n))
      for (const auto& chain : treebound::interpolation_chains(n))
        if (treebound::chain_compatible_with(chain, tau)) {
          const auto counts = treebound::crossing_counts(chain, tau);
          for (int b : counts) CHECK(b >= 1);
        }
}

TEST_CASE("interpolated potential sum: limiting parameter values") {
  std::mt19937_64 rng(7);
  const int n = 4;
  const auto v = random_potential(rng, n, -2.0, 2.0);
  const auto chains = treebound::interpolation_chains(n);

  double full = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) full += v(i, j);

  const std::vector<double> ones(n - 1, 1.0);
  const std::vector<double> zeros(n - 1, 0.0);
  for (const auto& chain : chains) {
    CHECK(treebound::convex_decomposition_k(v, chain, ones) == doctest::Approx(full));
    // chains add one vertex at a time, so every pair crosses some cut and
    // zero parameters kill the whole sum
    CHECK(treebound::convex_decomposition_k(v, chain, zeros) == doctest::Approx(0.0));
  }

  // two vertices: the single pair crosses the single cut
  FinitePotential v2(2);
  v2.set(0, 1, 1.7);
  const auto chain2 = treebound::interpolation_chains(2).front();
  CHECK(treebound::convex_decomposition_k(v2, chain2, std::vector<double>{0.3}) ==
        doctest::Approx(0.3 * 1.7));
}

TEST_CASE("interpolated potential sum matches a crossing-mask recomputation") {
  std::mt19937_64 rng(19);
  for (int n = 3; n <= 5; ++n) {
    const auto v = random_potential(rng, n, -2.0, 2.0);
    for (const auto& chain : treebound::interpolation_chains(n)) {
      std::vector<double> t(static_cast<std::size_t>(n) - 1);
      for (auto& x : t) x = oracles::uniform(rng, 0.0, 1.0);
      // independent route through the crosses() predicate
      double expect = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double factor = v(i, j);
          for (int l = 1; l <= n - 1; ++l)
            if (chain.crosses(l, i, j)) factor *= t[static_cast<std::size_t>(l - 1)];
          expect += factor;
        }
      CHECK(treebound::convex_decomposition_k(v, chain, t) ==
            doctest::Approx(expect).epsilon(1e-13));
    }
  }
}

TEST_CASE("two-vertex identity in closed form") {
  for (double v01 : {-1.3, -0.2, 0.0, 0.4, 2.1}) {
    FinitePotential v(2);
    v.set(0, 1, v01);
    const auto rhs = treebound::tree_graph_rhs(v);
    CHECK(rhs.value == doctest::Approx(std::expm1(-v01)).epsilon(1e-12));
  }
}

TEST_CASE("identity against the direct connected-graph sum") {
  std::mt19937_64 rng(97);
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 12; ++trial) {
      const auto v = random_potential(rng, n, -2.0, 2.0);
      const auto rhs = treebound::tree_graph_rhs(v);
      const double lhs = connected_sum_of(v);
      CHECK(rhs.value == doctest::Approx(lhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("identity at the five-vertex cap" * doctest::timeout(120)) {
  std::mt19937_64 rng(211);
  const auto v = random_potential(rng, 5, -1.0, 1.0);
  treebound::QuadratureOptions options;
  options.order = 10;  // four tensor axes; smooth integrand converges early
  const auto rhs = treebound::tree_graph_rhs(v, options);
  CHECK(rhs.value == doctest::Approx(connected_sum_of(v)).epsilon(1e-8));
}

TEST_CASE("identity quadrature self-check flags nothing on smooth input") {
  std::mt19937_64 rng(13);
  const auto v = random_potential(rng, 3, -1.0, 1.0);
  treebound::QuadratureOptions options;
  options.check_with_doubled_order = true;
  const auto rhs = treebound::tree_graph_rhs(v, options);
  CHECK(rhs.consistent);
  REQUIRE(rhs.doubled_order_value.has_value());
  CHECK(*rhs.doubled_order_value == doctest::Approx(rhs.value).epsilon(1e-10));
}

TEST_CASE("chain measure has unit mass for every tree up to five vertices") {
  graphs::LabeledTree edge{2, {{0, 1}}};
  CHECK(treebound::measure_mass(edge).value == doctest::Approx(1.0).epsilon(1e-12));

  for (int n = 3; n <= 5; ++n)
    for (const auto& tau : graphs::trees_on(n)) {
      const auto mass = treebound::measure_mass(tau);
      CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("tree weight bound: worked examples") {
  const auto single = fixtures::single_hardcore(0.2, 0.3);
  CHECK(treebound::ursell_tree_bound(single, std::vector<int>{0}) ==
        doctest::Approx(std::exp(0.3)));

  const auto triangle = fixtures::triangle_hardcore(0.2);
  const std::vector<int> config{0, 1, 2};
  const double bound = treebound::ursell_tree_bound(triangle, config);
  CHECK(bound == doctest::Approx(3.0));
  CHECK(bound >= std::abs(expansion::ursell(triangle, config)));

  const auto pair = fixtures::attractive_pair(0.2, -1.0, 0.5);
  const std::vector<int> two{0, 1};
  CHECK(treebound::ursell_tree_bound(pair, two) == doctest::Approx(std::exp(1.0)));
  CHECK(std::abs(expansion::ursell(pair, two)) == doctest::Approx(std::exp(1.0) - 1.0));
  CHECK(treebound::ursell_tree_bound(pair, two) >= std::abs(expansion::ursell(pair, two)));
}

TEST_CASE("tree weight bound dominates the cluster coefficient") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 12; ++trial) {
    const auto space = fixtures::random_stable_space(rng, 4, 0.6);
    REQUIRE(model::verify_stability(space, 4).passed);
    std::vector<int> config;
    for (int k = 1; k <= 6; ++k) {
      config.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(space.size())));
      const double bound = treebound::ursell_tree_bound(space, config);
      const double value = std::abs(expansion::ursell(space, config));
      CHECK(bound * (1.0 + 1e-12) >= value);
    }
  }
}

TEST_CASE("cutoff level: worked examples") {
  // all compatible: nothing to cut off
  const auto compat = model::PolymerSpace({"a", "b", "c"}, {0.1, 0.1, 0.1}, {0.0, 0.0, 0.0},
                                          {{0, 1, ExtendedReal(-2.0)}});
  CHECK(treebound::cutoff_h0(compat, std::vector<int>{0, 1, 2}) == 0.0);

  // one incompatible pair, no negative couplings
  const auto pair = fixtures::pair_incompatible(0.1);
  CHECK(treebound::cutoff_h0(pair, std::vector<int>{0, 1}) == 0.0);

  // incompatible pair plus attractive links to a third polymer
  const auto mixed = model::PolymerSpace({"a", "b", "c"}, {0.1, 0.1, 0.1}, {0.0, 0.0, 0.0},
                                         {{0, 1, ExtendedReal::infinity()},
                                          {0, 2, ExtendedReal(-2.0)},
                                          {1, 2, ExtendedReal(-3.0)}});
  CHECK(treebound::cutoff_h0(mixed, std::vector<int>{0, 1, 2}) == doctest::Approx(5.0));
}

TEST_CASE("cutoff potential restores subset stability") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const auto space = fixtures::random_stable_space(rng, 4, 0.5);
    const std::vector<int> config = fixtures::full_volume(space);
    const double h0 = treebound::cutoff_h0(space, config);
    for (double h : {h0, h0 + 1.0, 2.0 * h0 + 3.0}) {
      const auto cut = treebound::CutoffPotential{&space, h}.materialize();
      const int n = static_cast<int>(config.size());
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double energy = 0.0;
        double budget = 0.0;
        for (int i = 0; i < n; ++i) {
          if (!(mask >> i & 1u)) continue;
          budget -= space.stability_b(config[static_cast<std::size_t>(i)]);
          for (int j = i + 1; j < n; ++j)
            if (mask >> j & 1u)
              energy += cut.potential(config[static_cast<std::size_t>(i)],
                                      config[static_cast<std::size_t>(j)])
                            .value();
        }
        CHECK(energy >= budget - 1e-12);
      }
    }
  }
}

TEST_CASE("cutoff spaces converge to the true cluster coefficient") {
  std::mt19937_64 rng(107);
  const auto space = fixtures::random_stable_space(rng, 4, 0.5);
  const std::vector<int> config{0, 1, 2, 3};
  const double truth = expansion::ursell(space, config);
  double previous_gap = 1e300;
  for (double h : {10.0, 20.0, 40.0}) {
    const auto cut = treebound::CutoffPotential{&space, h}.materialize();
    const double gap = std::abs(expansion::ursell(cut, config) - truth);
    CHECK(gap <= previous_gap * (1.0 + 1e-12));
    CHECK(gap <= 64.0 * std::exp(-h));
    previous_gap = gap;
  }
}

TEST_CASE("capacity limits") {
  FinitePotential v(6);
  CHECK_THROWS_AS(treebound::tree_graph_rhs(v), CapacityError);
  graphs::LabeledTree chain{6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}};
  CHECK_THROWS_AS(treebound::measure_mass(chain), CapacityError);
  const auto space = fixtures::single_hardcore(0.1);
  CHECK_THROWS_AS(treebound::cutoff_h0(space, std::vector<int>(13, 0)), CapacityError);
  CHECK_THROWS_AS(treebound::ursell_tree_bound(space, std::vector<int>(10, 0)), CapacityError);
}
