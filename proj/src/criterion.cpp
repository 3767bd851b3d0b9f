#include "polygas/criterion.hpp"

#include <cmath>
#include <stdexcept>

#include "polygas/expansion.hpp"

namespace polygas::criterion {

namespace {

void check_mu(const model::PolymerSpace& space, const model::WeightAssignment& mu) {
  if (static_cast<int>(mu.mu.size()) != space.size())
    throw std::invalid_argument("mu table must match the polymer count");
  for (double m : mu.mu)
    if (!(m >= 0.0) || !std::isfinite(m))
      throw std::invalid_argument("mu entries must be finite and >= 0");
}

void check_tail(const model::PolymerSpace& space, std::span<const double> tail) {
  if (!tail.empty() && static_cast<int>(tail.size()) != space.size())
    throw std::invalid_argument("tail table must match the polymer count");
  for (double t : tail)
    if (std::isnan(t) || t < 0.0) throw std::invalid_argument("tail entries must be >= 0");
}

}  // namespace

const PolymerCheck& CriterionReport::check_for(int polymer) const {
  for (const auto& c : per_polymer)
    if (c.polymer == polymer) return c;
  throw std::invalid_argument("no check for that polymer");
}

CriterionReport check_criterion(const model::PolymerSpace& space, const model::WeightAssignment& mu,
                                std::span<const double> tail) {
  check_mu(space, mu);
  check_tail(space, tail);

  CriterionReport report;
  report.pass = true;
  report.per_polymer.reserve(static_cast<std::size_t>(space.size()));
  for (int g = 0; g < space.size(); ++g) {
    PolymerCheck c;
    c.polymer = g;
    c.lhs = space.activity(g) * std::exp(space.stability_b(g));
    double sum = tail.empty() ? 0.0 : tail[static_cast<std::size_t>(g)];
    for (int h = 0; h < space.size(); ++h)
      sum += space.kernel_f(g, h) * mu.mu[static_cast<std::size_t>(h)];
    c.interaction_sum = sum;
    c.rhs = mu.mu[static_cast<std::size_t>(g)] * std::exp(-sum);
    c.margin = c.rhs - c.lhs;
    c.pass = c.lhs <= c.rhs;
    report.pass = report.pass && c.pass;
    report.per_polymer.push_back(c);
  }
  return report;
}

namespace {

double min_margin(const model::PolymerSpace& space, std::vector<double>& mu_values) {
  model::WeightAssignment w{mu_values};
  const auto report = check_criterion(space, w);
  double worst = report.per_polymer.front().margin;
  for (const auto& c : report.per_polymer) worst = std::min(worst, c.margin);
  return worst;
}

}  // namespace

MuSearchResult optimize_mu(const model::PolymerSpace& space, const MuSearchOptions& options) {
  if (options.mu_max <= 0.0 || options.coarse_grid < 2 || options.sweeps < 1)
    throw std::invalid_argument("bad mu search options");

  std::vector<double> mu(static_cast<std::size_t>(space.size()), 1.0);
  double best = min_margin(space, mu);

  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    const double before = best;
    for (int g = 0; g < space.size(); ++g) {
      auto& coordinate = mu[static_cast<std::size_t>(g)];
      // Coarse scan.
      double arg_best = coordinate;
      for (int k = 0; k <= options.coarse_grid; ++k) {
        coordinate = options.mu_max * k / options.coarse_grid;
        const double value = min_margin(space, mu);
        if (value > best) {
          best = value;
          arg_best = coordinate;
        }
      }
      // Golden-section refinement around the coarse winner.
      const double step = options.mu_max / options.coarse_grid;
      double lo = std::max(0.0, arg_best - step);
      double hi = std::min(options.mu_max, arg_best + step);
      double x1 = hi - golden * (hi - lo);
      double x2 = lo + golden * (hi - lo);
      coordinate = x1;
      double f1 = min_margin(space, mu);
      coordinate = x2;
      double f2 = min_margin(space, mu);
      while (hi - lo > options.refine_tolerance) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + golden * (hi - lo);
          coordinate = x2;
          f2 = min_margin(space, mu);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - golden * (hi - lo);
          coordinate = x1;
          f1 = min_margin(space, mu);
        }
      }
      coordinate = f1 > f2 ? x1 : x2;
      const double refined = min_margin(space, mu);
      if (refined < best) {
        // keep the best point seen rather than the last probe
        coordinate = arg_best;
      } else {
        best = refined;
      }
    }
    if (best <= before) break;  // sweep brought no improvement
  }

  MuSearchResult result;
  result.mu.mu = mu;
  result.report = check_criterion(space, result.mu);
  result.certificate_found = result.report.pass;
  return result;
}

IterationTrace iterate_tree_series(const model::PolymerSpace& space,
                                   std::span<const double> rho_tilde, int gamma0,
                                   int max_generations,
                                   const std::optional<model::WeightAssignment>& mu) {
  if (static_cast<int>(rho_tilde.size()) != space.size())
    throw std::invalid_argument("rho_tilde table must match the polymer count");
  for (double r : rho_tilde)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("rho_tilde entries must be finite and >= 0");
  if (gamma0 < 0 || gamma0 >= space.size()) throw std::invalid_argument("pin index out of range");
  if (max_generations < 0) throw std::invalid_argument("generation count must be >= 0");
  if (mu) check_mu(space, *mu);

  IterationTrace trace;
  if (mu) trace.cap = mu->mu[static_cast<std::size_t>(gamma0)];

  const auto k = static_cast<std::size_t>(space.size());
  std::vector<double> g(k, 1.0), next(k, 0.0);
  trace.partial.push_back(rho_tilde[static_cast<std::size_t>(gamma0)]);  // depth 0: bare vertex
  for (int generation = 1; generation <= max_generations; ++generation) {
    for (std::size_t a = 0; a < k; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < k; ++b)
        s += space.kernel_f(static_cast<int>(a), static_cast<int>(b)) * rho_tilde[b] * g[b];
      next[a] = std::exp(s);
    }
    g.swap(next);
    const double value = rho_tilde[static_cast<std::size_t>(gamma0)] * g[static_cast<std::size_t>(gamma0)];
    trace.partial.push_back(value);
    if (trace.cap && value > *trace.cap * (1.0 + 1e-12) + 1e-300) {
      trace.exceeded_cap = true;
      break;
    }
  }
  return trace;
}

double certified_pinned_bound(const model::PolymerSpace& space, const model::WeightAssignment& mu,
                              int gamma0, int cross_check_order, std::span<const double> tail) {
  if (gamma0 < 0 || gamma0 >= space.size()) throw std::invalid_argument("pin index out of range");
  const auto report = check_criterion(space, mu, tail);
  if (!report.pass)
    throw std::invalid_argument("certified bound requires a passing criterion certificate");

  const double bound = mu.mu[static_cast<std::size_t>(gamma0)];
  const auto series = expansion::pinned_sum(space, gamma0, cross_check_order);
  const double rho = space.activity(gamma0);
  for (double partial : series.partial_sums)
    if (rho * partial > bound * (1.0 + 1e-12) + 1e-300)
      throw std::runtime_error("pinned series exceeded its certificate; numerics are suspect");
  return bound;
}

}  // namespace polygas::criterion
