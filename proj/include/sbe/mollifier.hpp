#pragma once

#include <array>
#include <vector>

#include "sbe/scale.hpp"

namespace sbe::noise {

// Radial bump mollifier rho_a(x) = (c/a^2) exp(-1/(1-|x/a|^2)) for |x| < a.
// c is fixed by unit mass (independent of a), then a is tuned so that the
// L2 norm is also 1.  The Fourier side is tabulated as 2*pi*rho_hat(s) on a
// fine radial grid in the (2pi)^{-d/2} transform convention.
struct Mollifier {
  double radius = 0.0;     // a
  double amplitude = 0.0;  // c / a^2
  double mass = 0.0;
  double l2_norm = 0.0;

  double s_max = 0.0;      // Fourier table extent
  double ds = 0.0;
  std::vector<double> two_pi_rho_hat;  // sampled at s = i*ds

  double profile(double r) const;          // rho(|x| = r)
  double rho_hat2pi(double s) const;       // 2*pi*rho_hat(s), cubic interpolation
  double theta1(double s) const;           // (2*pi*rho_hat(s))^2, clamped at 0 beyond table
  // smallest s* in the table with sup_{s>=s*} theta1 < eps
  double theta_threshold(double eps) const;
};

Mollifier build_mollifier(double target_radius_hint = 1.0);

// Theta_tau(p) = (2 pi rho_hat(tau^{-1/2} sqrt(R_tau) p))^2
double theta_tau(double p1, double p2, const ScaleParams& s, const Mollifier& m);

// Xi^tau_n weight of a lattice tuple: prod_i Theta_tau(p_i) * dp^{2n}.
// tau_infinite selects the Theta == 1 Lebesgue convention.
double xi_weight(const std::vector<std::array<double, 2>>& tuple, double dp,
                 const ScaleParams& s, const Mollifier& m, bool tau_infinite = false);

}  // namespace sbe::noise
