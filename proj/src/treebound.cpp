#include "polygas/treebound.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "polygas/errors.hpp"
#include "polygas/quadrature.hpp"

namespace polygas::treebound {

namespace {
constexpr int max_identity_vertices = 5;   // tensor quadrature cost cap
constexpr int max_cutoff_config = 12;      // subset-scan guard
}  // namespace

FinitePotential::FinitePotential(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("potential needs at least one vertex");
  v_.assign(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0);
}

std::size_t FinitePotential::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::invalid_argument("vertex out of range");
  if (i > j) std::swap(i, j);
  const auto ui = static_cast<std::size_t>(i);
  return ui * static_cast<std::size_t>(n_) - ui * (ui + 1) / 2 + static_cast<std::size_t>(j);
}

void FinitePotential::set(int i, int j, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("potential values must be finite");
  v_[index(i, j)] = value;
}

bool InterpolationChain::crosses(int l, int i, int j) const {
  if (l < 1 || l > n() - 1) throw std::invalid_argument("chain level out of range");
  bool in_i = false, in_j = false;
  for (int p = 0; p < l; ++p) {
    if (order[static_cast<std::size_t>(p)] == i) in_i = true;
    if (order[static_cast<std::size_t>(p)] == j) in_j = true;
  }
  return in_i != in_j;
}

std::vector<bool> InterpolationChain::membership(int l) const {
  if (l < 1 || l > n() - 1) throw std::invalid_argument("chain level out of range");
  std::vector<bool> in(order.size(), false);
  for (int p = 0; p < l; ++p) in[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = true;
  return in;
}

std::vector<InterpolationChain> interpolation_chains(int n) {
  if (n < 2) throw std::invalid_argument("chains need at least two vertices");
  std::vector<int> rest;
  for (int v = 1; v < n; ++v) rest.push_back(v);
  std::vector<InterpolationChain> out;
  do {
    InterpolationChain chain;
    chain.order.push_back(0);
    chain.order.insert(chain.order.end(), rest.begin(), rest.end());
    out.push_back(std::move(chain));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

namespace {

// Position of each vertex in the chain's addition order.
std::vector<int> chain_positions(const InterpolationChain& chain) {
  std::vector<int> pos(chain.order.size(), 0);
  for (std::size_t p = 0; p < chain.order.size(); ++p)
    pos[static_cast<std::size_t>(chain.order[p])] = static_cast<int>(p);
  return pos;
}

}  // namespace

bool chain_compatible_with(const InterpolationChain& chain, const graphs::LabeledTree& tau) {
  if (chain.n() != tau.n) throw std::invalid_argument("chain/tree size mismatch");
  const auto pos = chain_positions(chain);
  for (int l = 1; l <= chain.n() - 1; ++l) {
    int inside = 0;
    for (auto [i, j] : tau.edges)
      if (pos[static_cast<std::size_t>(i)] < l && pos[static_cast<std::size_t>(j)] < l) ++inside;
    if (inside != l - 1) return false;
  }
  return true;
}

std::vector<int> crossing_counts(const InterpolationChain& chain, const graphs::LabeledTree& tau) {
  if (chain.n() != tau.n) throw std::invalid_argument("chain/tree size mismatch");
  const auto pos = chain_positions(chain);
  std::vector<int> b(static_cast<std::size_t>(chain.n() - 1), 0);
  for (int l = 1; l <= chain.n() - 1; ++l)
    for (auto [i, j] : tau.edges)
      if ((pos[static_cast<std::size_t>(i)] < l) != (pos[static_cast<std::size_t>(j)] < l))
        ++b[static_cast<std::size_t>(l - 1)];
  if (chain_compatible_with(chain, tau))
    for (int bl : b)
      if (bl < 1)
        throw std::logic_error("compatible chain with an uncrossed cut; measure support violated");
  return b;
}

double convex_decomposition_k(const FinitePotential& v, const InterpolationChain& chain,
                              std::span<const double> t) {
  const int n = v.size();
  if (chain.n() != n) throw std::invalid_argument("chain/potential size mismatch");
  if (static_cast<int>(t.size()) != n - 1)
    throw std::invalid_argument("need n-1 interpolation parameters");
  const auto pos = chain_positions(chain);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double factor = 1.0;
      for (int l = 1; l <= n - 1; ++l)
        if ((pos[static_cast<std::size_t>(i)] < l) != (pos[static_cast<std::size_t>(j)] < l))
          factor *= t[static_cast<std::size_t>(l - 1)];
      total += factor * v(i, j);
    }
  return total;
}

namespace {

double tree_graph_rhs_at_order(const FinitePotential& v, int order) {
  const int n = v.size();
  const auto rule = quadrature::gauss_legendre_01(order);
  const int q = order;
  const int levels = n - 1;

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  const auto chains = interpolation_chains(n);
  double total = 0.0;

  for (const auto& tau : graphs::trees_on(n)) {
    double prefactor = 1.0;
    for (auto [i, j] : tau.edges) prefactor *= -v(i, j);

    double tree_integral = 0.0;
    for (const auto& chain : chains) {
      if (!chain_compatible_with(chain, tau)) continue;
      const auto b = crossing_counts(chain, tau);
      const auto pos = chain_positions(chain);

      // Crossing level mask per pair, and per-level node powers t^(b_l - 1).
      std::vector<unsigned> mask(pairs.size(), 0);
      for (std::size_t p = 0; p < pairs.size(); ++p)
        for (int l = 1; l <= levels; ++l)
          if ((pos[static_cast<std::size_t>(pairs[p].first)] < l) !=
              (pos[static_cast<std::size_t>(pairs[p].second)] < l))
            mask[p] |= 1u << (l - 1);
      std::vector<double> node_pow(static_cast<std::size_t>(levels) * static_cast<std::size_t>(q));
      for (int l = 0; l < levels; ++l)
        for (int a = 0; a < q; ++a)
          node_pow[static_cast<std::size_t>(l) * q + a] =
              rule.weights[static_cast<std::size_t>(a)] *
              std::pow(rule.nodes[static_cast<std::size_t>(a)], b[static_cast<std::size_t>(l)] - 1);

      std::vector<double> t(static_cast<std::size_t>(levels), 0.0);
      auto tensor = [&](auto&& self, int level, double weight) -> double {
        if (level == levels) {
          double k_value = 0.0;
          for (std::size_t p = 0; p < pairs.size(); ++p) {
            double factor = v(pairs[p].first, pairs[p].second);
            for (unsigned m = mask[p]; m != 0; m &= m - 1)
              factor *= t[static_cast<std::size_t>(std::countr_zero(m))];
            k_value += factor;
          }
          return weight * std::exp(-k_value);
        }
        double acc = 0.0;
        for (int a = 0; a < q; ++a) {
          t[static_cast<std::size_t>(level)] = rule.nodes[static_cast<std::size_t>(a)];
          acc += self(self, level + 1,
                      weight * node_pow[static_cast<std::size_t>(level) * q + a]);
        }
        return acc;
      };
      tree_integral += tensor(tensor, 0, 1.0);
    }
    total += prefactor * tree_integral;
  }
  return total;
}

}  // namespace

QuadratureResult tree_graph_rhs(const FinitePotential& v, const QuadratureOptions& options) {
  const int n = v.size();
  if (n > max_identity_vertices)
    throw CapacityError("tree-graph quadrature capped at " +
                        std::to_string(max_identity_vertices) + " vertices");
  QuadratureResult result;
  if (n == 1) {
    result.value = 1.0;
    return result;
  }
  result.value = tree_graph_rhs_at_order(v, options.order);
  if (options.check_with_doubled_order) {
    result.doubled_order_value = tree_graph_rhs_at_order(v, options.order * 2);
    result.consistent = std::abs(*result.doubled_order_value - result.value) <= options.check_tolerance;
  }
  return result;
}

namespace {

double measure_mass_at_order(const graphs::LabeledTree& tau, int order) {
  const int n = tau.n;
  const auto rule = quadrature::gauss_legendre_01(order);
  double total = 0.0;
  for (const auto& chain : interpolation_chains(n)) {
    if (!chain_compatible_with(chain, tau)) continue;
    const auto b = crossing_counts(chain, tau);
    double prod = 1.0;
    for (int bl : b) {
      double axis = 0.0;
      for (std::size_t a = 0; a < rule.nodes.size(); ++a)
        axis += rule.weights[a] * std::pow(rule.nodes[a], bl - 1);
      prod *= axis;
    }
    total += prod;
  }
  return total;
}

}  // namespace

QuadratureResult measure_mass(const graphs::LabeledTree& tau, const QuadratureOptions& options) {
  graphs::validate(tau);
  if (tau.n > max_identity_vertices)
    throw CapacityError("measure-mass quadrature capped at " +
                        std::to_string(max_identity_vertices) + " vertices");
  QuadratureResult result;
  if (tau.n == 1) {
    result.value = 1.0;
    return result;
  }
  result.value = measure_mass_at_order(tau, options.order);
  if (options.check_with_doubled_order) {
    result.doubled_order_value = measure_mass_at_order(tau, options.order * 2);
    result.consistent = std::abs(*result.doubled_order_value - result.value) <= options.check_tolerance;
  }
  return result;
}

model::PolymerSpace CutoffPotential::materialize() const {
  if (base == nullptr) throw std::invalid_argument("cutoff potential has no base space");
  if (!std::isfinite(h)) throw std::invalid_argument("cutoff H must be finite");
  const auto& s = *base;
  const auto k = static_cast<std::size_t>(s.size());
  std::vector<double> packed(k * (k + 1) / 2, 0.0);
  std::size_t at = 0;
  for (int a = 0; a < s.size(); ++a)
    for (int b = a; b < s.size(); ++b) {
      const ExtendedReal v = s.potential(a, b);
      packed[at++] = v.is_infinite() ? h : v.value();
    }
  return model::PolymerSpace::from_packed(s.ids(), s.activities(), s.stability_bs(),
                                          std::move(packed), s.default_potential());
}

double cutoff_h0(const model::PolymerSpace& space, std::span<const int> config) {
  const int n = static_cast<int>(config.size());
  if (n < 1) throw std::invalid_argument("configuration must be non-empty");
  if (n > max_cutoff_config)
    throw CapacityError("cutoff subset scan capped at " + std::to_string(max_cutoff_config) +
                        " polymers");
  for (int idx : config)
    if (idx < 0 || idx >= space.size()) throw std::invalid_argument("config index out of range");

  double h0 = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) < 2) continue;
    bool has_incompatible = false;
    double negative_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!(mask >> j & 1u)) continue;
        const ExtendedReal v = space.potential(config[static_cast<std::size_t>(i)],
                                               config[static_cast<std::size_t>(j)]);
        if (v.is_infinite())
          has_incompatible = true;
        else if (v.value() < 0.0)
          negative_sum -= v.value();
      }
    }
    if (has_incompatible) h0 = std::max(h0, negative_sum);
  }
  return h0;
}

double ursell_tree_bound(const model::PolymerSpace& space, std::span<const int> config) {
  const int k = static_cast<int>(config.size());
  if (k < 1) throw std::invalid_argument("configuration must be non-empty");
  if (k > graphs::max_tree_vertices)
    throw CapacityError("tree bound capped at " + std::to_string(graphs::max_tree_vertices) +
                        " polymers");
  for (int idx : config)
    if (idx < 0 || idx >= space.size()) throw std::invalid_argument("config index out of range");

  double b_sum = 0.0;
  for (int idx : config) b_sum += space.stability_b(idx);

  // Kernel factors once per vertex pair.
  std::vector<double> f(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double value = space.kernel_f(config[static_cast<std::size_t>(i)],
                                          config[static_cast<std::size_t>(j)]);
      f[static_cast<std::size_t>(i) * k + j] = value;
      f[static_cast<std::size_t>(j) * k + i] = value;
    }

  double tree_sum = 0.0;
  graphs::for_each_tree(k, [&](const graphs::LabeledTree& tau) {
    double prod = 1.0;
    for (auto [i, j] : tau.edges) prod *= f[static_cast<std::size_t>(i) * k + j];
    tree_sum += prod;
    return true;
  });
  return std::exp(b_sum) * tree_sum;
}

}  // namespace polygas::treebound
