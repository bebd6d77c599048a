#pragma once

#include <cmath>
#include <stdexcept>

namespace sbe {

// tau-derived quantities of the rescaled equation: nu_tau, R_tau = diag(nu,1)
// and the prefactors of the rescaled nonlinearity.
struct ScaleParams {
  double tau = 1.0;
  double nu = 1.0;
  double a_pre = 1.0;   // tau nu^{1/4}, prefactor of the convolution term
  double a_arg = 1.0;   // tau^{-1/2} nu^{1/4}, argument scaling inside F
  double a_lin = 1.0;   // tau^{1/2} nu^{1/2}, linear transport prefactor

  static ScaleParams at(double tau) {
    if (!(tau >= 1.0)) throw std::invalid_argument("ScaleParams: tau must be >= 1");
    ScaleParams s;
    s.tau = tau;
    double lt = std::log(tau);
    s.nu = 1.0 / std::max(1.0, std::pow(lt, 2.0 / 3.0));
    s.a_pre = tau * std::pow(s.nu, 0.25);
    s.a_arg = std::pow(s.nu, 0.25) / std::sqrt(tau);
    s.a_lin = std::sqrt(tau * s.nu);
    return s;
  }

  // |sqrt(R_tau) p|^2 = nu p1^2 + p2^2
  double r_norm_sq(double p1, double p2) const { return nu * p1 * p1 + p2 * p2; }
};

}  // namespace sbe
