#include "polygas/expansion.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "polygas/errors.hpp"
#include "polygas/graphs.hpp"

namespace polygas::expansion {

namespace detail {

std::vector<double> edge_factors(const model::PolymerSpace& space, std::span<const int> config) {
  const int k = static_cast<int>(config.size());
  std::vector<double> f(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double v = space.potential(config[i], config[j]).expm1_neg();
      f[static_cast<std::size_t>(i) * k + j] = v;
      f[static_cast<std::size_t>(j) * k + i] = v;
    }
  return f;
}

double connected_sum_direct(const std::vector<double>& f, int k) {
  if (k == 1) return 1.0;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  const int m = static_cast<int>(pairs.size());

  struct Forest {
    std::array<std::int8_t, graphs::max_graph_vertices> parent;
    int components;
    int find(int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
      return x;
    }
    void unite(int a, int b) {
      a = find(a);
      b = find(b);
      if (a != b) {
        parent[static_cast<std::size_t>(a)] = static_cast<std::int8_t>(b);
        --components;
      }
    }
  };

  double total = 0.0;
  // Walk every edge subset once, carrying the running product; edges with a
  // zero factor kill their whole superset subtree and are skipped outright.
  auto rec = [&](auto&& self, int next, const Forest& forest, double product) -> void {
    if (forest.components == 1) total += product;
    for (int e = next; e < m; ++e) {
      const auto [i, j] = pairs[static_cast<std::size_t>(e)];
      const double fe = f[static_cast<std::size_t>(i) * k + j];
      if (fe == 0.0) continue;
      Forest child = forest;
      child.unite(i, j);
      self(self, e + 1, child, product * fe);
    }
  };
  Forest root;
  root.components = k;
  for (int i = 0; i < k; ++i) root.parent[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(i);
  rec(rec, 0, root, 1.0);
  return total;
}

double connected_sum_recursive(const std::vector<double>& f, int k) {
  if (k == 1) return 1.0;
  if (k > 20) throw CapacityError("connected-sum recursion capped at 20 vertices");
  const std::uint32_t full = (1u << k) - 1u;

  // z[mask]: sum over all graphs on mask = prod over pairs of (1 + f_ij).
  std::vector<double> z(full + 1, 1.0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const int v = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1u);
    double prod = z[rest];
    for (std::uint32_t r = rest; r != 0; r &= r - 1u) {
      const int i = std::countr_zero(r);
      prod *= 1.0 + f[static_cast<std::size_t>(v) * k + i];
    }
    z[mask] = prod;
  }

  // c[mask]: sum over connected graphs, peeled off z by fixing the lowest
  // vertex's component.
  std::vector<double> c(full + 1, 0.0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const std::uint32_t low = mask & ~(mask - 1u);
    const std::uint32_t rest = mask ^ low;
    double value = z[mask];
    std::uint32_t sub = rest;
    while (true) {
      const std::uint32_t a = sub | low;
      if (a != mask) value -= c[a] * z[mask ^ a];
      if (sub == 0) break;
      sub = (sub - 1u) & rest;
    }
    c[mask] = value;
  }
  return c[full];
}

}  // namespace detail

namespace {

void check_volume(const model::PolymerSpace& space, std::span<const int> volume) {
  if (volume.empty()) throw std::invalid_argument("volume must be non-empty");
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (volume[i] < 0 || volume[i] >= space.size())
      throw std::invalid_argument("volume index out of range");
    for (std::size_t j = i + 1; j < volume.size(); ++j)
      if (volume[i] == volume[j]) throw std::invalid_argument("volume indices must be distinct");
  }
}

// Stability tail: sum_{n > N} S^n / n! with S = sum over the volume of
// rho * e^B.
double stability_tail(const model::PolymerSpace& space, std::span<const int> volume, int order) {
  double s = 0.0;
  for (int idx : volume) s += space.activity(idx) * std::exp(space.stability_b(idx));
  double term = 1.0;
  for (int n = 1; n <= order; ++n) term *= s / n;
  double tail = 0.0;
  int n = order;
  do {
    ++n;
    term *= s / n;
    tail += term;
  } while (term > tail * 1e-18 + 1e-300 && n < order + 1'000'000);
  return tail;
}

bool all_self_incompatible(const model::PolymerSpace& space, std::span<const int> volume) {
  for (int idx : volume)
    if (space.compatible(idx, idx)) return false;
  return true;
}

}  // namespace

PartitionResult partition_function(const model::PolymerSpace& space, std::span<const int> volume,
                                   const PartitionOptions& options) {
  check_volume(space, volume);
  const bool terminating = all_self_incompatible(space, volume);
  int max_order = options.max_order;
  if (max_order < 0) {
    if (!terminating)
      throw CapacityError(
          "partition function does not terminate on this space; pass an explicit max_order");
    max_order = static_cast<int>(volume.size());
  }

  PartitionResult result;
  result.max_order_used = max_order;
  result.exact = terminating && max_order >= static_cast<int>(volume.size());
  result.tail_bound = result.exact ? 0.0 : stability_tail(space, volume, max_order);
  result.order_terms.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  result.order_terms[0] = 1.0;

  // Incompatibility rows over volume positions, so the enumeration can skip
  // a blocked candidate in O(1); a +inf pair zeroes the branch and every
  // extension of it.
  const int count = static_cast<int>(volume.size());
  const std::size_t words = (static_cast<std::size_t>(count) + 63) / 64;
  std::vector<std::uint64_t> incompatible_rows(words * static_cast<std::size_t>(count), 0);
  for (int i = 0; i < count; ++i)
    for (int j = i; j < count; ++j)
      if (space.potential(volume[static_cast<std::size_t>(i)],
                          volume[static_cast<std::size_t>(j)])
              .is_infinite()) {
        incompatible_rows[static_cast<std::size_t>(i) * words + static_cast<std::size_t>(j) / 64] |=
            std::uint64_t{1} << (j % 64);
        incompatible_rows[static_cast<std::size_t>(j) * words + static_cast<std::size_t>(i) / 64] |=
            std::uint64_t{1} << (i % 64);
      }

  std::uint64_t nodes = 0;
  std::vector<int> config;  // nondecreasing positions into `volume`
  // stack of OR-ed incompatibility rows, one frame of `words` per level
  std::vector<std::uint64_t> blocked(words * static_cast<std::size_t>(max_order + 1), 0);
  // Weight carried below is prod rho / prod multiplicity! * exp(-E), built
  // incrementally.
  auto rec = [&](auto&& self, int first, double weight) -> void {
    if (static_cast<int>(config.size()) == max_order) return;
    const std::size_t frame = config.size() * words;
    for (int pos = first; pos < count; ++pos) {
      if (blocked[frame + static_cast<std::size_t>(pos) / 64] >> (pos % 64) & 1u) continue;
      const int gamma = volume[static_cast<std::size_t>(pos)];
      if (space.activity(gamma) == 0.0) continue;
      if (++nodes > options.node_cap) throw CapacityError("partition function exceeded node cap");
      double w = weight * space.activity(gamma);
      int multiplicity = 1;
      for (int prev : config) {
        if (prev == pos) ++multiplicity;
        w *= space.potential(volume[static_cast<std::size_t>(prev)], gamma).exp_neg();
      }
      w /= multiplicity;
      config.push_back(pos);
      result.value += w;
      result.order_terms[config.size()] += w;
      // child frame: parent's blocks plus the new member's row
      for (std::size_t word = 0; word < words; ++word)
        blocked[frame + words + word] =
            blocked[frame + word] |
            incompatible_rows[static_cast<std::size_t>(pos) * words + word];
      self(self, pos, w);
      config.pop_back();
    }
  };
  rec(rec, 0, 1.0);
  return result;
}

double ursell(const model::PolymerSpace& space, std::span<const int> config) {
  if (config.empty()) throw std::invalid_argument("configuration must be non-empty");
  for (int idx : config)
    if (idx < 0 || idx >= space.size()) throw std::invalid_argument("config index out of range");
  const int k = static_cast<int>(config.size());
  if (k > graphs::max_graph_vertices)
    throw CapacityError("ursell capped at " + std::to_string(graphs::max_graph_vertices) +
                        " arguments, got " + std::to_string(k));
  if (k == 1) return 1.0;
  const auto f = detail::edge_factors(space, config);
  return detail::connected_sum_direct(f, k);
}

namespace {

// Shared multiset walk for the truncated series. For each multiset of
// volume polymers the callback gets the full argument list (with the pin
// prepended when present) and the combinatorial weight prod rho / prod m!.
void series_walk(const model::PolymerSpace& space, std::span<const int> volume, int max_order,
                 std::optional<int> pin, SeriesTruncation& out, bool absolute) {
  std::vector<int> args;
  if (pin) args.push_back(*pin);
  const std::size_t base = args.size();

  auto term_of = [&](const std::vector<int>& a) {
    if (a.size() == 1) return 1.0;
    const auto f = detail::edge_factors(space, a);
    const double c = detail::connected_sum_recursive(f, static_cast<int>(a.size()));
    return absolute ? std::abs(c) : c;
  };

  auto rec = [&](auto&& self, int first, double weight) -> void {
    const int order = static_cast<int>(args.size() - base);
    if (order >= 1 || pin)
      out.terms[static_cast<std::size_t>(order - out.first_order)] += weight * term_of(args);
    if (order == max_order) return;
    for (int pos = first; pos < static_cast<int>(volume.size()); ++pos) {
      const int gamma = volume[static_cast<std::size_t>(pos)];
      if (space.activity(gamma) == 0.0) continue;
      // Positions are nondecreasing, so copies of this polymer sit at the
      // tail of the multiset; the new copy count divides the weight.
      int multiplicity = 1;
      for (std::size_t q = args.size(); q > base; --q) {
        if (args[q - 1] == gamma)
          ++multiplicity;
        else
          break;
      }
      const double w = weight * space.activity(gamma) / multiplicity;
      args.push_back(gamma);
      self(self, pos, w);
      args.pop_back();
    }
  };
  rec(rec, 0, 1.0);

  double running = 0.0;
  for (std::size_t i = 0; i < out.terms.size(); ++i) {
    running += out.terms[i];
    out.partial_sums[i] = running;
  }
}

std::vector<int> whole_space(const model::PolymerSpace& space) {
  std::vector<int> v(static_cast<std::size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

void check_series_order(int max_order, int args_per_term) {
  if (max_order < 0) throw std::invalid_argument("series order must be >= 0");
  if (args_per_term > graphs::max_graph_vertices)
    throw CapacityError("series order implies " + std::to_string(args_per_term) +
                        " cluster arguments; cap is " + std::to_string(graphs::max_graph_vertices));
}

}  // namespace

SeriesTruncation abs_log_xi(const model::PolymerSpace& space, std::span<const int> volume,
                            int max_order) {
  check_volume(space, volume);
  if (max_order < 1) throw std::invalid_argument("series order must be >= 1");
  check_series_order(max_order, max_order);
  SeriesTruncation out;
  out.first_order = 1;
  out.monotone = true;
  out.terms.assign(static_cast<std::size_t>(max_order), 0.0);
  out.partial_sums.assign(static_cast<std::size_t>(max_order), 0.0);
  series_walk(space, volume, max_order, std::nullopt, out, /*absolute=*/true);
  return out;
}

SeriesTruncation log_xi_series(const model::PolymerSpace& space, std::span<const int> volume,
                               int max_order) {
  check_volume(space, volume);
  if (max_order < 1) throw std::invalid_argument("series order must be >= 1");
  check_series_order(max_order, max_order);
  SeriesTruncation out;
  out.first_order = 1;
  out.monotone = false;
  out.terms.assign(static_cast<std::size_t>(max_order), 0.0);
  out.partial_sums.assign(static_cast<std::size_t>(max_order), 0.0);
  series_walk(space, volume, max_order, std::nullopt, out, /*absolute=*/false);
  return out;
}

SeriesTruncation pinned_sum(const model::PolymerSpace& space, int gamma0, int max_order,
                            std::optional<std::span<const int>> volume) {
  if (gamma0 < 0 || gamma0 >= space.size()) throw std::invalid_argument("pin index out of range");
  check_series_order(max_order, max_order + 1);
  std::vector<int> domain;
  if (!volume) domain = whole_space(space);
  std::span<const int> vol = volume ? *volume : std::span<const int>(domain);
  check_volume(space, vol);

  SeriesTruncation out;
  out.first_order = 0;
  out.monotone = true;
  out.terms.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  out.partial_sums.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  series_walk(space, vol, max_order, gamma0, out, /*absolute=*/true);
  return out;
}

}  // namespace polygas::expansion
