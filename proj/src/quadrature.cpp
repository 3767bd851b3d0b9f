#include "polygas/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polygas::quadrature {

GaussLegendre gauss_legendre_01(int order) {
  if (order < 1 || order > 128) throw std::invalid_argument("quadrature order out of range");
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));

  // Newton iteration on P_n with the Chebyshev-angle initial guess; roots
  // come in symmetric pairs on [-1, 1].
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1].
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = 0.5 * w;
  }
  return rule;
}

}  // namespace polygas::quadrature
