#pragma once

#include <vector>

namespace polygas::quadrature {

// Gauss-Legendre rule transplanted to [0, 1]; exact for polynomials of
// degree <= 2*order - 1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre_01(int order);

}  // namespace polygas::quadrature
