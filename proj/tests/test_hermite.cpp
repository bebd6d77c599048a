#include <doctest.h>

#include <cmath>
#include <vector>

#include "sbe/hermite.hpp"

using namespace sbe;
using namespace sbe::hermite;

namespace {

// Independent oracle for H_m: Rodrigues form via exact polynomial recursion.
// d^m/dx^m e^{-x^2/2} = q_m(x) e^{-x^2/2} with q_0 = 1, q_{m+1} = q_m' - x q_m;
// H_m = (-1)^m q_m / m!.
double hermite_rodrigues_oracle(int m, double x) {
  std::vector<double> q{1.0};
  for (int k = 0; k < m; ++k) {
    std::vector<double> next(q.size() + 1, 0.0);
    for (size_t i = 1; i < q.size(); ++i) next[i - 1] += q[i] * static_cast<double>(i);
    for (size_t i = 0; i < q.size(); ++i) next[i + 1] -= q[i];
    q = std::move(next);
  }
  double acc = 0.0;
  for (size_t i = q.size(); i-- > 0;) acc = acc * x + q[i];
  double mf = 1.0;
  for (int i = 2; i <= m; ++i) mf *= i;
  return (m % 2 ? -1.0 : 1.0) * acc / mf;
}

// Closed Hermite-algebra expansion of monomials:
// x^k = sum_j C(k, 2j) (2j-1)!! (k-2j)! H_{k-2j}.
double monomial_cm_oracle(int k, int m) {
  if ((k - m) % 2 != 0 || m > k || m < 0) return 0.0;
  int j = (k - m) / 2;
  double binom = 1.0;
  for (int i = 0; i < 2 * j; ++i) binom = binom * (k - i) / (i + 1);
  double dfact = 1.0;
  for (int i = 2 * j - 1; i >= 1; i -= 2) dfact *= i;
  double mf = 1.0;
  for (int i = 2; i <= m; ++i) mf *= i;
  return binom * dfact * mf;
}

// |x|: c_{2k} = sqrt(2/pi) (-1)^{k-1} (2k-3)!! by integration by parts.
double abs_cm_oracle(int m) {
  if (m % 2 != 0) return 0.0;
  int k = m / 2;
  if (k == 0) return std::sqrt(2.0 / M_PI);
  double dfact = 1.0;
  for (int i = 2 * k - 3; i >= 1; i -= 2) dfact *= i;
  return std::sqrt(2.0 / M_PI) * (k % 2 ? 1.0 : -1.0) * dfact;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::abs(b));
}

}  // namespace

TEST_CASE("hermite_eval matches the leading-coefficient-1/m! normalization") {
  CHECK(hermite_eval(0, 7.3) == 1.0);
  CHECK(hermite_eval(2, 3.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(hermite_eval(3, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  for (int m = 0; m <= 12; ++m)
    for (double x : {-3.7, -1.0, 0.0, 0.4, 2.9})
      CHECK(hermite_eval(m, x) ==
            doctest::Approx(hermite_rodrigues_oracle(m, x)).epsilon(1e-11));
  CHECK_THROWS_AS(hermite_eval(501, 0.0), std::domain_error);
  CHECK_THROWS_AS(hermite_eval(-1, 0.0), std::domain_error);
}

TEST_CASE("quadrature orthonormality to 1e-10 for m, n <= 20") {
  auto rule = gauss_hermite_pi1(2 * 20 + 64);
  for (int m = 0; m <= 20; ++m)
    for (int n = m; n <= 20; ++n) {
      double acc = 0.0;
      for (size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * hermite_orthonormal_eval(m, rule.nodes[i]) *
               hermite_orthonormal_eval(n, rule.nodes[i]);
      double expect = m == n ? 1.0 : 0.0;
      CHECK(std::abs(acc - expect) <= 1e-10);
    }
}

TEST_CASE("monomial coefficients are exact Hermite algebra") {
  for (int k = 0; k <= 8; ++k) {
    std::vector<double> poly(k + 1, 0.0);
    poly[k] = 1.0;
    auto F = NonlinearitySpec::polynomial(poly, 0.1);
    auto t = hermite_coeffs(F, 10, 84);
    double scale = 1.0;
    for (int m = 0; m <= 10; ++m) scale = std::max(scale, std::abs(monomial_cm_oracle(k, m)));
    for (int m = 0; m <= 10; ++m) {
      double expect = monomial_cm_oracle(k, m);
      if (expect == 0.0)
        CHECK(std::abs(t.c[m]) <= 1e-9 * scale);
      else
        CHECK(rel_err(t.c[m], expect) <= 1e-9);
    }
  }
  // the two spec fixtures
  auto t2 = hermite_coeffs(NonlinearitySpec::polynomial({0, 0, 1}, 0.1), 2, 64);
  CHECK(t2.c[2] == doctest::Approx(2.0).epsilon(1e-12));
  auto t4 = hermite_coeffs(NonlinearitySpec::polynomial({0, 0, 0, 0, 1}, 0.1), 4, 64);
  CHECK(t4.c[2] == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(t4.c[4] == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(t4.c[0] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("c1 and c2 from analytic derivatives") {
  auto t3 = hermite_coeffs(NonlinearitySpec::polynomial({0, 0, 0, 1}, 0.1), 4, 64);
  CHECK(t3.c1 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(t3.c2) <= 1e-12);

  // c2 == 2! <F, H_2> for every smooth family (Eq. A.6 with l = 2)
  std::vector<NonlinearitySpec> fams = {
      NonlinearitySpec::polynomial({0.3, -1.2, 0.5, 0.25}, 0.1),
      NonlinearitySpec::sqrt_shift(1.0, 0.2),
      NonlinearitySpec::exp_real({0.7, 0.0}, 0.2),
      NonlinearitySpec::exp_real({0.0, 1.3}, 0.2),
  };
  for (const auto& F : fams) {
    auto t = hermite_coeffs(F, 8, 128);
    CHECK(rel_err(t.c2, t.c[2]) <= 1e-8);
    if (std::abs(t.c[1]) > 1e-10)
      CHECK(rel_err(t.c1, t.c[1]) <= 1e-8);
    else
      CHECK(std::abs(t.c1 - t.c[1]) <= 1e-12);
  }

  auto tabs = hermite_coeffs(NonlinearitySpec::abs_value(0.1), 8, 64);
  CHECK(tabs.c1 == 0.0);
  CHECK_FALSE(tabs.c2_available);
  CHECK_THROWS_AS(tabs.c2_checked(), std::domain_error);
}

TEST_CASE("abs coefficients match the double-factorial closed form") {
  auto t = hermite_coeffs(NonlinearitySpec::abs_value(0.1), 60, 128);
  for (int m = 0; m <= 60; ++m) {
    double expect = abs_cm_oracle(m);
    if (m % 2) {
      CHECK(t.c[m] == 0.0);
    } else {
      CHECK(rel_err(t.c[m], expect) <= 1e-10);
    }
  }
}

TEST_CASE("abs asymptotics: m^{5/4} |c_hat_m| plateaus near (2/pi)^{3/4}") {
  const double target = std::pow(2.0 / M_PI, 0.75);
  auto t = hermite_coeffs(NonlinearitySpec::abs_value(0.1), 200, 400);
  double v200 = std::pow(200.0, 1.25) * std::abs(t.c_hat[200]);
  CHECK(v200 == doctest::Approx(0.71583937).epsilon(1e-6));  // exact-formula value
  CHECK(std::abs(v200 - target) / target <= 0.05);
  double v40 = std::pow(40.0, 1.25) * std::abs(t.c_hat[40]);
  CHECK(v40 == doctest::Approx(0.72869946).epsilon(1e-6));
}

TEST_CASE("derivative identity c_hat_m(F^l) = sqrt((m+1)..(m+l)) c_hat_{m+l}(F)") {
  std::vector<NonlinearitySpec> fams = {
      NonlinearitySpec::polynomial({0.0, 1.0, 0.0, 0.5, 0.0, 0.01}, 0.1),
      NonlinearitySpec::sqrt_shift(1.0, 0.2),
      NonlinearitySpec::sqrt_shift(2.5, 0.2),
      NonlinearitySpec::exp_real({1.0, 0.0}, 0.2),
      NonlinearitySpec::exp_real({0.0, 1.0}, 0.2),
  };
  const int n_quad = 240;
  auto rule = gauss_hermite_pi1(n_quad);
  for (const auto& F : fams) {
    auto t = hermite_coeffs(F, 23, n_quad);
    for (int l = 1; l <= 2; ++l) {
      // c_hat of the l-th derivative by direct quadrature
      for (int m = 0; m <= 20; ++m) {
        double chat_d = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
          double fx = l == 1 ? F.deriv1(rule.nodes[i]) : F.deriv2(rule.nodes[i]);
          chat_d += rule.weights[i] * fx * hermite_orthonormal_eval(m, rule.nodes[i]);
        }
        double fac = 1.0;
        for (int q = 1; q <= l; ++q) fac *= (m + q);
        double rhs = std::sqrt(fac) * t.c_hat[m + l];
        // coefficients below the double-precision quadrature floor (~1e-14
        // absolute) are compared absolutely: 1e-7 relative is meaningless
        // against roundoff noise
        if (std::abs(rhs) < 3e-7) {
          CHECK(std::abs(chat_d - rhs) <= 1e-12);
        } else {
          CHECK(rel_err(chat_d, rhs) <= 1e-7);
        }
      }
    }
  }
}

TEST_CASE("Parseval: partial sums increase to the direct L2 norm") {
  auto F = NonlinearitySpec::sqrt_shift(1.0, 0.2);
  auto t = hermite_coeffs(F, 100, 300);
  CHECK(t.l2_norm_sq == doctest::Approx(2.0).epsilon(1e-10));  // E[1 + X^2] = 2
  double part = 0.0, prev = -1.0;
  for (int m = 0; m <= 100; ++m) {
    part += t.c_hat[m] * t.c_hat[m];
    CHECK(part >= prev);
    CHECK(part <= t.l2_norm_sq * (1 + 1e-12));
    prev = part;
  }
  CHECK(rel_err(part, t.l2_norm_sq) <= 1e-8);
}

TEST_CASE("decay_profile: polynomial truncates exactly, analytic family fits") {
  auto tp = hermite_coeffs(NonlinearitySpec::polynomial({0, 1, 0, 0, 0, 1}, 0.1), 44, 160);
  for (int m = 6; m <= 44; ++m) CHECK(std::abs(tp.c_hat[m]) <= 1e-9);

  auto F = NonlinearitySpec::sqrt_shift(1.0, 0.2);
  auto t = hermite_coeffs(F, 60, 304);
  auto rep = decay_profile(t);
  CHECK_FALSE(rep.underflow);
  CHECK(rep.slope < 0.0);
  CHECK(rep.r2 > 0.95);
  CHECK(std::abs(t.c_hat[60] - (-9.272877832e-6)) <= 1e-12);  // high-precision oracle
  // frozen from the high-precision oracle (fit over even m in [2, 60])
  CHECK(rep.slope == doctest::Approx(-1.5479388).epsilon(2e-4));
  CHECK(rep.r2 == doctest::Approx(0.98823229).epsilon(1e-5));
  CHECK_THROWS_AS(decay_profile(hermite_coeffs(F, 20, 64)), std::domain_error);
}

TEST_CASE("poly_approx reproduces polynomials and decreases in M") {
  auto P = NonlinearitySpec::polynomial({1.0, -0.5, 0.0, 2.0}, 0.2);
  auto ap = poly_approx(P, 5, 0.2);
  CHECK(ap.sup_err <= 1e-10);

  auto F = NonlinearitySpec::sqrt_shift(1.0, 0.2);
  double e4 = poly_approx(F, 4, 0.2).sup_err;
  double e8 = poly_approx(F, 8, 0.2).sup_err;
  double e16 = poly_approx(F, 16, 0.2).sup_err;
  CHECK(e4 > e8);
  CHECK(e8 > e16);
  // frozen oracle values
  CHECK(e4 == doctest::Approx(0.097914261).epsilon(0.02));
  CHECK(e8 == doctest::Approx(0.03993815).epsilon(0.02));
  CHECK(e16 == doctest::Approx(0.01261312).epsilon(0.02));

  auto E = NonlinearitySpec::exp_real({1.0, 0.0}, 0.2);
  double e20 = poly_approx(E, 20, 0.2).sup_err;
  CHECK(e20 == doctest::Approx(2.8254464e-6).epsilon(0.05));
  CHECK(e20 < 5e-6);

  CHECK_THROWS_AS(poly_approx(NonlinearitySpec::abs_value(0.1), 4, 0.2), std::domain_error);
}

TEST_CASE("exp_norm grid maxima") {
  CHECK(exp_norm(NonlinearitySpec::polynomial({0.0}, 0.1), 0.2) == 0.0);
  CHECK(exp_norm(NonlinearitySpec::polynomial({0.0, 1.0}, 0.1), 0.2) ==
        doctest::Approx(1.0).epsilon(1e-9));
  double v = exp_norm(NonlinearitySpec::sqrt_shift(1.0, 0.01), 0.01);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  // abs is admitted to hermite-level operations
  CHECK(std::isfinite(exp_norm(NonlinearitySpec::abs_value(0.1), 0.2)));
}

TEST_CASE("moment sums converge for sqrt_shift(1)") {
  auto F = NonlinearitySpec::sqrt_shift(1.0, 0.2);
  auto t = hermite_coeffs(F, 120, 304);
  for (int k = 0; k <= 6; ++k) {
    double w1 = moment_sum(t, k, 100) - moment_sum(t, k, 80);
    double w2 = moment_sum(t, k, 120) - moment_sum(t, k, 100);
    CHECK(w2 <= w1 * 1.000001);  // increments shrink beyond the m^k e^{-c sqrt m} saddle
  }
  // low moments are already well converged by m = 80
  double s0_full = moment_sum(t, 0, 120), s0_80 = moment_sum(t, 0, 80);
  CHECK((s0_full - s0_80) / s0_full < 1e-4);
  double s1_full = moment_sum(t, 1, 120), s1_80 = moment_sum(t, 1, 80);
  CHECK((s1_full - s1_80) / s1_full < 1e-2);
}

TEST_CASE("kappa and preconditions are enforced") {
  CHECK_THROWS_AS(NonlinearitySpec::sqrt_shift(1.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearitySpec::sqrt_shift(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearitySpec::sqrt_shift(-1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearitySpec::polynomial({0.0, 1.0}, 0.3), std::invalid_argument);
  auto F = NonlinearitySpec::sqrt_shift(1.0, 0.2);
  CHECK_THROWS_AS(hermite_coeffs(F, 40, 60), std::invalid_argument);  // n_quad < 2 m_max
  CHECK_THROWS_AS(NonlinearitySpec::abs_value(0.1).deriv2(1.0), std::domain_error);
}
