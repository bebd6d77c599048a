#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "sbe/quadrature.hpp"

namespace sbe::hermite {

enum class Family { polynomial, sqrt_shift, exp_real, abs_value };

// The nonlinearity F together with its growth exponent kappa in (0, 1/4).
// Built-in families are closed under the first two derivatives, which the
// coefficient routines use instead of numerical differentiation. abs_value
// is non-smooth and only admitted to coefficient-level computations.
struct NonlinearitySpec {
  Family family = Family::polynomial;
  std::vector<double> poly;          // coefficients, poly[k] * x^k
  double shift_a = 1.0;              // F(x) = sqrt(a + x^2)
  std::complex<double> omega{1.0, 0.0};  // F(x) = Re exp(omega x)
  double kappa = 0.1;

  static NonlinearitySpec polynomial(std::vector<double> coeffs, double kappa);
  static NonlinearitySpec sqrt_shift(double a, double kappa);
  static NonlinearitySpec exp_real(std::complex<double> omega, double kappa);
  static NonlinearitySpec abs_value(double kappa);

  double eval(double x) const;
  double deriv1(double x) const;  // for abs_value: sign(x), a.e. derivative
  double deriv2(double x) const;  // throws for abs_value
  bool smooth() const { return family != Family::abs_value; }
  std::string name() const;
};

struct HermiteTable {
  int m_max = 0;
  std::vector<double> c;        // c_m = m! <F, H_m>_{L2(pi_1)}
  std::vector<double> c_hat;    // c_m / sqrt(m!)
  double c1 = 0.0;              // int F' dpi_1
  double c2 = 0.0;              // int F'' dpi_1
  bool c2_available = true;
  double l2_norm_sq = 0.0;      // ||F||^2_{L2(pi_1)} by direct quadrature
  QuadRule quad;                // the pi_1 rule used

  double c2_checked() const;    // throws if unavailable (abs family)
};

// H_m normalized to leading coefficient 1/m!, stable
// three-term recurrence (m+1) H_{m+1} = x H_m - H_{m-1}.  m <= 500.
double hermite_eval(int m, double x);

// Orthonormal value sqrt(m!) H_m(x); same recurrence, normalized running
// terms so no factorial overflow occurs.
double hermite_orthonormal_eval(int m, double x);

// Hermite coefficients of F by Gauss-Hermite quadrature against pi_1;
// requires n_quad >= 2*m_max.  The abs family goes through the even-symmetry
// Gauss-Laguerre route with doubled node count.
HermiteTable hermite_coeffs(const NonlinearitySpec& F, int m_max, int n_quad);

struct DecayReport {
  std::array<double, 5> sup_mk{};  // sup_{m>=10} m^k |c_hat_m|, k = 1..5
  double slope = 0.0;              // fit of log|c_hat_m| against sqrt(m), even m
  double intercept = 0.0;
  double r2 = 0.0;
  int fit_points = 0;
  bool underflow = false;          // all |c_hat_m| below 1e-300
};

DecayReport decay_profile(const HermiteTable& table);

struct PolyApprox {
  double sigma = 1.0;
  std::vector<double> coeffs;  // coordinates in the orthonormal sigma-Hermite basis
  double sup_err = 0.0;        // sup_{|x|<=40} |F - P_M| e^{-kappa x^2}, grid max
  double eval(double x) const;
};

// Projection of F onto sigma-Hermite polynomials of degree <= M with
// sigma^2 = 1/(2 kappa).  abs family unsupported.
PolyApprox poly_approx(const NonlinearitySpec& F, int M, double kappa);

// Grid maximum over |x| <= 40 of (|F| v |F'|) e^{-kappa x^2}; a documented
// approximation of the sup over all of R.
double exp_norm(const NonlinearitySpec& F, double kappa);

// Moment sums sum_{1<=m<=M} m^k |c_hat_m| for convergence diagnostics.
double moment_sum(const HermiteTable& table, int k, int m_upper);

}  // namespace sbe::hermite
