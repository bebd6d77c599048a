#pragma once

#include <vector>

namespace sbe {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule rescaled to the standard Gaussian measure pi_1:
// integral f dpi_1 = sum w_i f(x_i), exact for polynomials of degree 2n-1.
QuadRule gauss_hermite_pi1(int n);

// Gauss-Laguerre rule for integral_0^inf f(t) e^-t dt = sum w_i f(t_i).
QuadRule gauss_laguerre(int n);

// Gauss-Legendre rule on [a, b].
QuadRule gauss_legendre(int n, double a, double b);

}  // namespace sbe
