#include "polygas/beg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

#include "polygas/errors.hpp"
#include "polygas/expansion.hpp"
#include "polygas/runtime.hpp"

namespace polygas::beg {

namespace {

constexpr int max_window_spin_sites = 9;   // 3^sites direct sum guard
constexpr std::size_t max_supports = 2'000'000;

void check_dimension(int d) {
  if (d < 1 || d > 4) throw std::invalid_argument("lattice dimension must be 1..4");
}

double int_pow(double base, int n) {
  double out = 1.0;
  for (int k = 0; k < n; ++k) out *= base;
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

}  // namespace

int l1_distance(const Site& a, const Site& b, int d) {
  int dist = 0;
  for (int k = 0; k < d; ++k) dist += std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
  return dist;
}

int Window::site_count() const {
  check_dimension(d);
  int count = 1;
  for (int k = 0; k < d; ++k) {
    if (extent[static_cast<std::size_t>(k)] < 1) throw std::invalid_argument("window extent must be >= 1");
    count *= extent[static_cast<std::size_t>(k)];
  }
  return count;
}

std::vector<Site> Window::sites() const {
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(site_count()));
  Site x{};
  auto rec = [&](auto&& self, int axis) -> void {
    if (axis == d) {
      out.push_back(x);
      return;
    }
    for (int v = 0; v < extent[static_cast<std::size_t>(axis)]; ++v) {
      x[static_cast<std::size_t>(axis)] = v;
      self(self, axis + 1);
    }
  };
  rec(rec, 0);
  return out;
}

bool Window::contains(const Site& x) const {
  for (int k = 0; k < d; ++k)
    if (x[static_cast<std::size_t>(k)] < 0 || x[static_cast<std::size_t>(k)] >= extent[static_cast<std::size_t>(k)])
      return false;
  return true;
}

int Window::distance_to_exterior(const Site& x) const {
  int slack = std::numeric_limits<int>::max();
  for (int k = 0; k < d; ++k)
    slack = std::min({slack, x[static_cast<std::size_t>(k)],
                      extent[static_cast<std::size_t>(k)] - 1 - x[static_cast<std::size_t>(k)]});
  return slack + 1;
}

double BegParams::coupling_j(int r) const {
  if (r < 1) throw std::invalid_argument("coupling distance must be >= 1");
  return j_amp * std::pow(static_cast<double>(r), -(d + lambda));
}

double BegParams::coupling_k(int r) const {
  if (r < 1) throw std::invalid_argument("coupling distance must be >= 1");
  return k_amp * std::pow(static_cast<double>(r), -(d + lambda));
}

void BegParams::validate() const {
  check_dimension(d);
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(lambda < lambda_prime)) throw std::invalid_argument("need 0 < lambda < lambda_prime");
  if (!(j1 >= 0.0)) throw std::invalid_argument("j1 must be >= 0");
  if (!(j_amp >= 0.0)) throw std::invalid_argument("J couplings must be >= 0");
  if (!(j_amp + std::abs(k_amp) <= 2.0 * j1 + 1e-15))
    throw std::invalid_argument("couplings violate the decay bound: j_amp + |k_amp| <= 2 j1");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
}

std::string BegPolymer::id(int d) const {
  std::string out;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (i) out += ';';
    out += '(';
    for (int k = 0; k < d; ++k) {
      if (k) out += ',';
      out += std::to_string(support[i][static_cast<std::size_t>(k)]);
    }
    out += ')';
    out += spins[i] > 0 ? '+' : '-';
  }
  return out;
}

bool support_connected(const std::vector<Site>& support, int d) {
  if (support.empty()) return false;
  std::vector<bool> seen(support.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const std::size_t at = stack.back();
    stack.pop_back();
    for (std::size_t other = 0; other < support.size(); ++other)
      if (!seen[other] && l1_distance(support[at], support[other], d) == 1) {
        seen[other] = true;
        ++visited;
        stack.push_back(other);
      }
  }
  return visited == support.size();
}

namespace {

// Grow connected supports level by level, deduplicating by the sorted site
// list. `admit` restricts the sites that may be added.
template <typename Admit>
std::vector<std::vector<Site>> grow_supports(int d, int n_max,
                                             const std::vector<std::vector<Site>>& seeds,
                                             Admit admit) {
  std::vector<std::vector<Site>> out;
  std::set<std::vector<Site>> level(seeds.begin(), seeds.end());
  for (int size = 1; size <= n_max && !level.empty(); ++size) {
    out.insert(out.end(), level.begin(), level.end());
    if (out.size() > max_supports) throw CapacityError("support enumeration exceeded its cap");
    if (size == n_max) break;
    std::set<std::vector<Site>> next;
    for (const auto& support : level) {
      for (const auto& site : support) {
        for (int axis = 0; axis < d; ++axis) {
          for (int dir = -1; dir <= 1; dir += 2) {
            Site neighbor = site;
            neighbor[static_cast<std::size_t>(axis)] += dir;
            if (!admit(neighbor)) continue;
            if (std::binary_search(support.begin(), support.end(), neighbor)) continue;
            std::vector<Site> grown = support;
            grown.insert(std::upper_bound(grown.begin(), grown.end(), neighbor), neighbor);
            next.insert(std::move(grown));
          }
        }
      }
      if (next.size() > max_supports) throw CapacityError("support enumeration exceeded its cap");
    }
    level = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<std::vector<Site>> connected_supports_anchored(int d, int n_max) {
  check_dimension(d);
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  // Anchored means "contains the origin": grow from the origin and keep
  // only sets that still contain it.
  auto all = grow_supports(d, n_max, {{Site{}}}, [](const Site&) { return true; });
  std::vector<std::vector<Site>> out;
  const Site origin{};
  for (auto& s : all)
    if (std::binary_search(s.begin(), s.end(), origin)) out.push_back(std::move(s));
  return out;
}

std::vector<std::vector<Site>> connected_supports_in(const Window& window, int n_max) {
  check_dimension(window.d);
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<std::vector<Site>> seeds;
  for (const auto& site : window.sites()) seeds.push_back({site});
  return grow_supports(window.d, n_max, seeds,
                       [&window](const Site& s) { return window.contains(s); });
}

namespace {

std::vector<BegPolymer> attach_spins(std::vector<std::vector<Site>> supports) {
  std::vector<BegPolymer> out;
  for (auto& support : supports) {
    const int k = static_cast<int>(support.size());
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      BegPolymer p;
      p.support = support;
      p.spins.resize(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) p.spins[static_cast<std::size_t>(i)] = (mask >> i & 1u) ? 1 : -1;
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

std::vector<BegPolymer> enumerate_polymers(int d, int n_max) {
  return attach_spins(connected_supports_anchored(d, n_max));
}

std::vector<BegPolymer> enumerate_polymers(int d, int n_max, const Site& anchor) {
  auto polymers = enumerate_polymers(d, n_max);
  for (auto& p : polymers)
    for (auto& site : p.support)
      for (int k = 0; k < d; ++k) site[static_cast<std::size_t>(k)] += anchor[static_cast<std::size_t>(k)];
  return polymers;
}

std::vector<BegPolymer> enumerate_polymers(const Window& window, int n_max) {
  return attach_spins(connected_supports_in(window, n_max));
}

std::int64_t animal_count(int d, int n) {
  const auto supports = connected_supports_anchored(d, n);
  std::int64_t count = 0;
  for (const auto& s : supports)
    if (static_cast<int>(s.size()) == n) ++count;
  return count;
}

std::int64_t surface_count(int d, int n) {
  check_dimension(d);
  if (n < 1) throw std::invalid_argument("surface radius must be >= 1");
  double cost = 1.0;
  for (int k = 0; k < d; ++k) cost *= 2.0 * n + 1.0;
  if (cost > 5e7) throw CapacityError("surface enumeration too large");
  std::int64_t count = 0;
  Site x{};
  auto rec = [&](auto&& self, int axis, int used) -> void {
    if (axis == d) {
      if (used == n) ++count;
      return;
    }
    for (int v = -(n - used); v <= n - used; ++v) {
      x[static_cast<std::size_t>(axis)] = v;
      self(self, axis + 1, used + std::abs(v));
    }
  };
  rec(rec, 0, 0);
  return count;
}

int support_distance(const BegPolymer& a, const BegPolymer& b, int d) {
  int best = std::numeric_limits<int>::max();
  for (const auto& x : a.support)
    for (const auto& y : b.support) best = std::min(best, l1_distance(x, y, d));
  return best;
}

namespace {

// Couplings tabulated on the distance; the pair loops below are hot and a
// pow() per site pair dominates everything else.
struct CouplingTable {
  std::vector<double> j, k;

  static CouplingTable make(const BegParams& params, int max_r) {
    CouplingTable t;
    t.j.assign(static_cast<std::size_t>(max_r) + 1, 0.0);
    t.k.assign(static_cast<std::size_t>(max_r) + 1, 0.0);
    for (int r = 1; r <= max_r; ++r) {
      t.j[static_cast<std::size_t>(r)] = params.coupling_j(r);
      t.k[static_cast<std::size_t>(r)] = params.coupling_k(r);
    }
    return t;
  }
};

ExtendedReal interaction_w_tab(const BegPolymer& a, const BegPolymer& b, const BegParams& params,
                               const CouplingTable& table) {
  double sum = 0.0;
  int min_r = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < a.support.size(); ++i)
    for (std::size_t j = 0; j < b.support.size(); ++j) {
      const int r = l1_distance(a.support[i], b.support[j], params.d);
      min_r = std::min(min_r, r);
      if (r < 2) continue;  // value is discarded once min_r < 2
      sum += table.j[static_cast<std::size_t>(r)] * a.spins[i] * b.spins[j] +
             table.k[static_cast<std::size_t>(r)];
    }
  if (min_r < 2) return ExtendedReal::infinity();
  return ExtendedReal(-params.beta * sum);
}

int support_diameter(const BegPolymer& a, const BegPolymer& b, int d) {
  int worst = 1;
  for (const auto& x : a.support)
    for (const auto& y : b.support) worst = std::max(worst, l1_distance(x, y, d));
  return worst;
}

}  // namespace

ExtendedReal interaction_w(const BegPolymer& a, const BegPolymer& b, const BegParams& params) {
  if (support_distance(a, b, params.d) < 2) return ExtendedReal::infinity();
  const auto table = CouplingTable::make(params, support_diameter(a, b, params.d));
  return interaction_w_tab(a, b, params, table);
}

double self_energy_a(const BegPolymer& p, const BegParams& params) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.support.size(); ++i)
    for (std::size_t j = i + 1; j < p.support.size(); ++j) {
      const int r = l1_distance(p.support[i], p.support[j], params.d);
      sum += params.coupling_j(r) * p.spins[i] * p.spins[j] + params.coupling_k(r);
    }
  return params.beta * sum;
}

double activity_rho(const BegPolymer& p, const BegParams& params) {
  return std::exp(-(params.beta * params.crystal_field * p.size() - self_energy_a(p, params)));
}

double stability_b(const BegPolymer& p, const BegParams& params) {
  const double j = coupling_j(params).value;
  const double b = params.beta * j * p.size() - self_energy_a(p, params);
  // Nonnegative analytically; absorb rounding at the clamp.
  return std::max(0.0, b);
}

SeriesValue sum_inverse_power(double s, int start) {
  if (!(s > 1.0)) throw std::invalid_argument("inverse-power sum needs exponent > 1");
  if (start < 1) throw std::invalid_argument("inverse-power sum needs start >= 1");
  // Memoized: the bulk builders ask for the same handful of exponents once
  // per polymer, and each evaluation walks 2e5 terms.
  static std::mutex cache_mutex;
  static std::map<std::pair<double, int>, SeriesValue> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    const auto hit = cache.find({s, start});
    if (hit != cache.end()) return hit->second;
  }
  const int terms = 200'000;
  const double last = static_cast<double>(start) + terms - 1;
  // Kahan summation keeps the float error well under the analytic bound.
  double sum = 0.0, carry = 0.0;
  for (int r = start; r < start + terms; ++r) {
    const double term = std::pow(static_cast<double>(r), -s) - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  // Midpoint comparison for the remainder: integral from last+1/2 up, with
  // the curvature correction bounding the error.
  const double integral = std::pow(last + 0.5, 1.0 - s) / (s - 1.0);
  const double err = s * std::pow(last - 0.5, -(s + 1.0)) / 24.0;
  const SeriesValue result{sum + integral, err + 1e-15 * (sum + integral)};
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(std::pair<double, int>{s, start}, result);
  return result;
}

namespace {

// |S_r| as a polynomial in r (degree d-1), from the binomial expansion of
// the shell-count identity.
std::array<double, 4> surface_poly(int d) {
  std::array<double, 4> coeff{};
  // binom(r-1, k-1) expanded in powers of r for k = 1..4
  const double expansions[4][4] = {
      {1, 0, 0, 0},
      {-1, 1, 0, 0},
      {1, -1.5, 0.5, 0},
      {-1, 11.0 / 6.0, -1, 1.0 / 6.0},
  };
  double choose = 1.0;  // binom(d, k)
  double pow2 = 1.0;    // 2^k
  for (int k = 1; k <= d; ++k) {
    choose = choose * (d - k + 1) / k;
    pow2 *= 2.0;
    for (int m = 0; m < 4; ++m) coeff[static_cast<std::size_t>(m)] += pow2 * choose * expansions[k - 1][m];
  }
  return coeff;
}

}  // namespace

SeriesValue coupling_j(const BegParams& params) {
  params.validate();
  const double amp = params.j_amp + std::abs(params.k_amp);
  if (amp == 0.0) return {0.0, 0.0};
  const auto poly = surface_poly(params.d);
  double value = 0.0, err = 0.0;
  for (int m = 0; m < params.d; ++m) {
    if (poly[static_cast<std::size_t>(m)] == 0.0) continue;
    const auto z = sum_inverse_power(params.d + params.lambda - m, 1);
    value += poly[static_cast<std::size_t>(m)] * z.value;
    err += std::abs(poly[static_cast<std::size_t>(m)]) * z.abs_error_bound;
  }
  return {0.5 * amp * value, 0.5 * amp * err};
}

SeriesValue j2_constant(const BegParams& params) {
  if (!(params.lambda > 0.0)) throw std::invalid_argument("lambda must be > 0 for the tail series");
  if (params.j1 == 0.0) return {0.0, 0.0};
  const double front = int_pow(2.0 * params.d, params.d) * params.j1 / factorial(params.d);
  const auto z = sum_inverse_power(1.0 + params.lambda, 2);
  return {front * z.value, front * z.abs_error_bound};
}

double jbeta(const BegParams& params) {
  return 2.0 * params.d + params.beta * j2_constant(params).value;
}

EnvelopeResult convergence_envelope(const BegParams& params, double alpha) {
  params.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  const double j = coupling_j(params).value;
  EnvelopeResult result;
  result.x = 8.0 * params.d * std::exp(-params.beta * (params.crystal_field - j));
  result.y = result.x * std::exp(alpha);
  result.rhs = alpha / jbeta(params);
  result.geometric = result.y < 1.0;
  if (!result.geometric) {
    result.lhs = std::numeric_limits<double>::infinity();
    result.margin = -std::numeric_limits<double>::infinity();
    result.pass = false;
    return result;
  }
  result.lhs = result.y / ((1.0 - result.y) * (1.0 - result.y));
  result.margin = result.rhs - result.lhs;
  result.pass = result.lhs <= result.rhs;
  return result;
}

Beta0Result beta0(const BegParams& params) {
  params.validate();
  const double j = coupling_j(params).value;
  const double gap = params.crystal_field - j;
  if (!(gap > 0.0))
    throw std::invalid_argument("crystal field must exceed the summed coupling J");
  const double j2 = j2_constant(params).value;
  const double front = 8.0 * std::sqrt(std::exp(1.0)) * params.d;
  auto g = [&](double b) { return std::exp(b * gap) / front - (2.0 * params.d + 1.0 + b * j2); };

  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (++doublings > 200) throw std::runtime_error("no sign change found for the threshold");
  }
  Beta0Result result;
  result.j = j;
  result.j2 = j2;
  while (hi - lo > 1e-12 && result.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
    ++result.iterations;
  }
  result.beta0 = 0.5 * (lo + hi);
  result.residual = std::abs(g(result.beta0));
  result.bracket_width = hi - lo;
  return result;
}

std::vector<BegPolymer> polymers_of_configuration(const Window& window, std::span<const int> sigma) {
  const auto sites = window.sites();
  if (sigma.size() != sites.size()) throw std::invalid_argument("sigma size must match the window");
  for (int s : sigma)
    if (s < -1 || s > 1) throw std::invalid_argument("spins must be in {-1, 0, +1}");

  std::vector<bool> used(sites.size(), false);
  std::vector<BegPolymer> family;
  for (std::size_t seed = 0; seed < sites.size(); ++seed) {
    if (used[seed] || sigma[seed] == 0) continue;
    // flood the component of nonzero sites through nearest neighbors
    std::vector<std::size_t> component{seed};
    used[seed] = true;
    for (std::size_t at = 0; at < component.size(); ++at) {
      for (std::size_t other = 0; other < sites.size(); ++other)
        if (!used[other] && sigma[other] != 0 &&
            l1_distance(sites[component[at]], sites[other], window.d) == 1) {
          used[other] = true;
          component.push_back(other);
        }
    }
    std::sort(component.begin(), component.end());
    BegPolymer p;
    for (std::size_t idx : component) {
      p.support.push_back(sites[idx]);
      p.spins.push_back(sigma[idx]);
    }
    family.push_back(std::move(p));
  }
  std::sort(family.begin(), family.end(),
            [](const BegPolymer& a, const BegPolymer& b) { return a.support < b.support; });
  return family;
}

std::vector<int> configuration_of_family(const Window& window,
                                         const std::vector<BegPolymer>& family) {
  const auto sites = window.sites();
  std::vector<int> sigma(sites.size(), 0);
  for (const auto& p : family)
    for (std::size_t i = 0; i < p.support.size(); ++i) {
      const auto at = std::lower_bound(sites.begin(), sites.end(), p.support[i]);
      if (at == sites.end() || *at != p.support[i])
        throw std::invalid_argument("polymer site outside the window");
      const auto idx = static_cast<std::size_t>(at - sites.begin());
      if (sigma[idx] != 0) throw std::invalid_argument("polymer supports overlap");
      sigma[idx] = p.spins[i];
    }
  return sigma;
}

namespace {

int window_diameter(const Window& window) {
  int diameter = 0;
  for (int k = 0; k < window.d; ++k) diameter += window.extent[static_cast<std::size_t>(k)] - 1;
  return std::max(diameter, 1);
}

double spin_hamiltonian_tab(const std::vector<Site>& sites, std::span<const int> sigma,
                            const BegParams& params, const CouplingTable& table) {
  double h = 0.0;
  for (std::size_t a = 0; a < sites.size(); ++a) {
    h += params.crystal_field * sigma[a] * sigma[a];
    if (sigma[a] == 0) continue;
    for (std::size_t b = a + 1; b < sites.size(); ++b) {
      if (sigma[b] == 0) continue;
      const int r = l1_distance(sites[a], sites[b], params.d);
      h -= table.j[static_cast<std::size_t>(r)] * sigma[a] * sigma[b] +
           table.k[static_cast<std::size_t>(r)] * sigma[a] * sigma[a] * sigma[b] * sigma[b];
    }
  }
  return h;
}

}  // namespace

double spin_hamiltonian(const Window& window, std::span<const int> sigma, const BegParams& params) {
  const auto sites = window.sites();
  if (sigma.size() != sites.size()) throw std::invalid_argument("sigma size must match the window");
  const auto table = CouplingTable::make(params, window_diameter(window));
  return spin_hamiltonian_tab(sites, sigma, params, table);
}

namespace {

model::PolymerSpace space_from_polymers(const std::vector<BegPolymer>& polymers,
                                        const BegParams& params) {
  const auto count = polymers.size();
  std::vector<std::string> ids(count);
  std::vector<double> rho(count), b(count);
  for (std::size_t i = 0; i < count; ++i) {
    ids[i] = polymers[i].id(params.d);
    rho[i] = activity_rho(polymers[i], params);
    b[i] = stability_b(polymers[i], params);
  }
  int diameter = 1;
  for (const auto& p : polymers)
    for (const auto& site : p.support)
      diameter = std::max(diameter, 2 * l1_distance(site, Site{}, params.d) + 1);
  const auto table = CouplingTable::make(params, diameter);

  // Pair table rows are independent; split them across the worker budget.
  // Every worker writes its own slots, so the result does not depend on the
  // thread count.
  std::vector<double> packed(count * (count + 1) / 2);
  auto fill_rows = [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t i = row_begin; i < row_end; ++i) {
      std::size_t at = i * count - i * (i + 1) / 2 + i;
      for (std::size_t j = i; j < count; ++j)
        packed[at++] = model::PolymerSpace::pack_potential(
            interaction_w_tab(polymers[i], polymers[j], params, table));
    }
  };
  const int workers = std::min<int>(worker_threads(), static_cast<int>(count));
  if (workers <= 1) {
    fill_rows(0, count);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = count * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
      const std::size_t end =
          count * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(workers);
      pool.emplace_back(fill_rows, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return model::PolymerSpace::from_packed(std::move(ids), std::move(rho), std::move(b),
                                          std::move(packed));
}

}  // namespace

BijectionReport spin_polymer_bijection_check(const BegParams& params, const Window& window,
                                             double rel_tolerance) {
  params.validate();
  const int sites_count = window.site_count();
  if (sites_count > max_window_spin_sites)
    throw CapacityError("spin sum capped at " + std::to_string(max_window_spin_sites) + " sites");

  BijectionReport report;
  report.roundtrip_ok = true;
  report.distances_ok = true;
  report.energy_identity_ok = true;

  // Full spin sum, walking all configurations in ternary-counter order, and
  // the family checks along the way.
  const auto sites = window.sites();
  const auto table = CouplingTable::make(params, window_diameter(window));
  std::vector<int> sigma(static_cast<std::size_t>(sites_count), -1);
  double z_spin = 0.0;
  std::int64_t configs = 0;
  while (true) {
    ++configs;
    const double h = spin_hamiltonian_tab(sites, sigma, params, table);
    z_spin += std::exp(-params.beta * h);

    const auto family = polymers_of_configuration(window, sigma);
    if (configuration_of_family(window, family) != sigma) report.roundtrip_ok = false;
    double family_energy = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < family.size() && finite; ++i)
      for (std::size_t j = i + 1; j < family.size(); ++j) {
        if (support_distance(family[i], family[j], params.d) < 2) {
          report.distances_ok = false;
          finite = false;
          break;
        }
        family_energy += interaction_w_tab(family[i], family[j], params, table).value();
      }
    for (const auto& p : family)
      family_energy += params.beta * params.crystal_field * p.size() - self_energy_a(p, params);
    if (finite && std::abs(params.beta * h - family_energy) >
                      1e-9 * std::max(1.0, std::abs(params.beta * h)))
      report.energy_identity_ok = false;

    // next configuration
    std::size_t axis = 0;
    while (axis < sigma.size() && sigma[axis] == 1) sigma[axis++] = -1;
    if (axis == sigma.size()) break;
    ++sigma[axis];
  }
  report.z_spin = z_spin;
  report.spin_configs = configs;

  // The window space is large (every connected support times every spin
  // assignment), so the pair potential is served lazily: a site-mask test
  // settles incompatibility in O(1) and the coupling sum only runs for the
  // rare compatible pairs.
  auto polymers = std::make_shared<std::vector<BegPolymer>>(
      enumerate_polymers(window, sites_count));
  report.polymer_count = static_cast<int>(polymers->size());

  auto site_index = [&sites](const Site& s) {
    return static_cast<int>(std::lower_bound(sites.begin(), sites.end(), s) - sites.begin());
  };
  auto masks = std::make_shared<std::vector<std::uint32_t>>();
  auto reach = std::make_shared<std::vector<std::uint32_t>>();  // support + L1 halo
  for (const auto& p : *polymers) {
    std::uint32_t mask = 0, halo = 0;
    for (const auto& site : p.support) {
      mask |= 1u << site_index(site);
      halo |= 1u << site_index(site);
      for (int axis = 0; axis < window.d; ++axis)
        for (int dir = -1; dir <= 1; dir += 2) {
          Site n = site;
          n[static_cast<std::size_t>(axis)] += dir;
          if (window.contains(n)) halo |= 1u << site_index(n);
        }
    }
    masks->push_back(mask);
    reach->push_back(halo);
  }

  std::vector<std::string> ids(polymers->size());
  std::vector<double> rho(polymers->size()), b(polymers->size());
  for (std::size_t i = 0; i < polymers->size(); ++i) {
    ids[i] = (*polymers)[i].id(params.d);
    rho[i] = activity_rho((*polymers)[i], params);
    b[i] = stability_b((*polymers)[i], params);
  }
  const BegParams params_copy = params;
  auto shared_table = std::make_shared<CouplingTable>(table);
  const auto space = model::PolymerSpace::from_potential_fn(
      std::move(ids), std::move(rho), std::move(b),
      [polymers, masks, reach, params_copy, shared_table](int a, int b2) {
        if ((*masks)[static_cast<std::size_t>(a)] & (*reach)[static_cast<std::size_t>(b2)])
          return std::numeric_limits<double>::infinity();
        return model::PolymerSpace::pack_potential(interaction_w_tab(
            (*polymers)[static_cast<std::size_t>(a)], (*polymers)[static_cast<std::size_t>(b2)],
            params_copy, *shared_table));
      });
  std::vector<int> volume(polymers->size());
  for (std::size_t i = 0; i < polymers->size(); ++i) volume[i] = static_cast<int>(i);
  report.z_polymer = expansion::partition_function(space, volume).value;

  report.rel_error = std::abs(report.z_spin - report.z_polymer) / std::abs(report.z_spin);
  report.pass = report.rel_error <= rel_tolerance && report.roundtrip_ok && report.distances_ok &&
                report.energy_identity_ok;
  return report;
}

TruncatedSpace build_polymer_space(const BegParams& params, const Window& window, int n_max,
                                   double alpha) {
  params.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");

  auto polymers = enumerate_polymers(window, n_max);
  auto space = space_from_polymers(polymers, params);
  TruncatedSpace out{std::move(space), std::move(polymers), {}, {}, alpha, 0, 0, 0, 0, 0};
  out.j = coupling_j(params).value;
  out.j2 = j2_constant(params).value;
  out.jbeta = 2.0 * params.d + params.beta * out.j2;

  const double gap = params.crystal_field - out.j;
  const double w = std::exp(alpha - params.beta * gap);  // per-site mu weight
  out.x = 8.0 * params.d * std::exp(-params.beta * gap);
  out.y = out.x * std::exp(alpha);

  out.mu.mu.resize(out.polymers.size());
  for (std::size_t i = 0; i < out.polymers.size(); ++i)
    out.mu.mu[i] = int_pow(w, out.polymers[i].size());

  // Analytic bound on the interaction sum over every polymer missing from
  // the truncation. Counting constants are kept on the safe side: an
  // incompatible neighbour must contain one of the (2d+1)|p| sites at
  // distance <= 1 from p, and far pair sums are grouped per site of p, so
  // the coupling block scales with |p|^2.
  const double inf = std::numeric_limits<double>::infinity();
  out.tails.assign(out.polymers.size(), inf);
  if (out.y < 1.0) {
    const double d = params.d;
    const double amp = params.j_amp + std::abs(params.k_amp);
    const double j2_eff = params.j1 > 0.0 ? out.j2 * (amp / params.j1)
                                          : int_pow(2.0 * params.d, params.d) * amp /
                                                factorial(params.d) *
                                                sum_inverse_power(1.0 + params.lambda, 2).value;
    // exact anchored counts for sizes inside the truncation
    std::vector<double> shell(static_cast<std::size_t>(n_max) + 1, 0.0);  // C_n 2^n w^n
    double g_weighted = 0.0;                                              // sum n C_n 2^n w^n
    for (int n = 1; n <= n_max; ++n) {
      shell[static_cast<std::size_t>(n)] =
          static_cast<double>(animal_count(params.d, n)) * int_pow(2.0, n) * int_pow(w, n);
      g_weighted += n * shell[static_cast<std::size_t>(n)];
    }
    const double one_minus_y = 1.0 - out.y;
    // sum_{n > n_max} n y^n and sum_{n > n_max} y^n in closed form
    const double tail_ny = int_pow(out.y, n_max + 1) *
                           ((n_max + 1) - n_max * out.y) / (one_minus_y * one_minus_y);
    const double tail_y = int_pow(out.y, n_max + 1) / one_minus_y;
    const double shell_coeff = int_pow(2.0 * d, params.d) / factorial(params.d);

    std::vector<double> zeta_cache;  // indexed by r_eff, 0 = unset
    for (std::size_t i = 0; i < out.polymers.size(); ++i) {
      const auto& p = out.polymers[i];
      const double psize = p.size();
      int r0 = std::numeric_limits<int>::max();
      for (const auto& site : p.support) r0 = std::min(r0, window.distance_to_exterior(site));
      const int r_eff = std::max(2, r0 - n_max + 1);

      // polymers larger than the size cap, anywhere
      double tail = psize * (2.0 * d + 1.0) * tail_y +
                    psize * psize * params.beta * j2_eff * tail_ny;
      // capped-size polymers escaping the window: far coupling block
      if (static_cast<int>(zeta_cache.size()) <= r_eff)
        zeta_cache.resize(static_cast<std::size_t>(r_eff) + 1, 0.0);
      if (zeta_cache[static_cast<std::size_t>(r_eff)] == 0.0) {
        const auto zeta = sum_inverse_power(1.0 + params.lambda, r_eff);
        zeta_cache[static_cast<std::size_t>(r_eff)] = zeta.value + zeta.abs_error_bound;
      }
      tail += psize * psize * params.beta * amp * shell_coeff *
              zeta_cache[static_cast<std::size_t>(r_eff)] * g_weighted;
      // capped-size polymers escaping the window while touching p
      if (r0 <= n_max) {
        double escape = 0.0;
        for (int n = r0; n <= n_max; ++n) escape += shell[static_cast<std::size_t>(n)];
        tail += (2.0 * d + 1.0) * psize * escape;
      }
      out.tails[i] = tail;
    }
  }
  return out;
}

}  // namespace polygas::beg
