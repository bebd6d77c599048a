#include "sbe/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbe::hermite {

namespace {

void check_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 0.25))
    throw std::invalid_argument("kappa must lie strictly inside (0, 1/4)");
}

double lfact(int m) { return std::lgamma(static_cast<double>(m) + 1.0); }

}  // namespace

NonlinearitySpec NonlinearitySpec::polynomial(std::vector<double> coeffs, double kappa) {
  check_kappa(kappa);
  NonlinearitySpec s;
  s.family = Family::polynomial;
  s.poly = std::move(coeffs);
  if (s.poly.empty()) s.poly.push_back(0.0);
  s.kappa = kappa;
  return s;
}

NonlinearitySpec NonlinearitySpec::sqrt_shift(double a, double kappa) {
  check_kappa(kappa);
  if (!(a > 0.0)) throw std::invalid_argument("sqrt_shift requires a > 0");
  NonlinearitySpec s;
  s.family = Family::sqrt_shift;
  s.shift_a = a;
  s.kappa = kappa;
  return s;
}

NonlinearitySpec NonlinearitySpec::exp_real(std::complex<double> omega, double kappa) {
  check_kappa(kappa);
  NonlinearitySpec s;
  s.family = Family::exp_real;
  s.omega = omega;
  s.kappa = kappa;
  return s;
}

NonlinearitySpec NonlinearitySpec::abs_value(double kappa) {
  check_kappa(kappa);
  NonlinearitySpec s;
  s.family = Family::abs_value;
  s.kappa = kappa;
  return s;
}

double NonlinearitySpec::eval(double x) const {
  switch (family) {
    case Family::polynomial: {
      double acc = 0.0;
      for (size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
      return acc;
    }
    case Family::sqrt_shift:
      return std::sqrt(shift_a + x * x);
    case Family::exp_real:
      return (std::exp(omega * x)).real();
    case Family::abs_value:
      return std::abs(x);
  }
  return 0.0;
}

double NonlinearitySpec::deriv1(double x) const {
  switch (family) {
    case Family::polynomial: {
      double acc = 0.0;
      for (size_t k = poly.size(); k-- > 1;) acc = acc * x + poly[k] * static_cast<double>(k);
      return acc;
    }
    case Family::sqrt_shift:
      return x / std::sqrt(shift_a + x * x);
    case Family::exp_real:
      return (omega * std::exp(omega * x)).real();
    case Family::abs_value:
      return x >= 0.0 ? 1.0 : -1.0;
  }
  return 0.0;
}

double NonlinearitySpec::deriv2(double x) const {
  switch (family) {
    case Family::polynomial: {
      double acc = 0.0;
      for (size_t k = poly.size(); k-- > 2;)
        acc = acc * x + poly[k] * static_cast<double>(k) * static_cast<double>(k - 1);
      return acc;
    }
    case Family::sqrt_shift:
      return shift_a / std::pow(shift_a + x * x, 1.5);
    case Family::exp_real:
      return (omega * omega * std::exp(omega * x)).real();
    case Family::abs_value:
      throw std::domain_error("abs family has no pointwise second derivative");
  }
  return 0.0;
}

std::string NonlinearitySpec::name() const {
  switch (family) {
    case Family::polynomial: return "polynomial";
    case Family::sqrt_shift: return "sqrt_shift";
    case Family::exp_real: return "exp_real";
    case Family::abs_value: return "abs";
  }
  return "?";
}

double HermiteTable::c2_checked() const {
  if (!c2_available) throw std::domain_error("c2 unavailable: abs family is non-smooth");
  return c2;
}

double hermite_eval(int m, double x) {
  if (m < 0 || m > 500) throw std::domain_error("hermite_eval: m out of range [0, 500]");
  if (m == 0) return 1.0;
  double hm1 = 1.0;       // H_0
  double hm = x;          // H_1
  for (int k = 1; k < m; ++k) {
    double hp = (x * hm - hm1) / (k + 1);
    hm1 = hm;
    hm = hp;
  }
  return hm;
}

double hermite_orthonormal_eval(int m, double x) {
  if (m < 0 || m > 500) throw std::domain_error("hermite_orthonormal_eval: m out of range");
  double hm1 = 0.0, hm = 1.0;  // h_0 = 1
  for (int k = 0; k < m; ++k) {
    double hp = (x * hm - std::sqrt(static_cast<double>(k)) * hm1) /
                std::sqrt(static_cast<double>(k + 1));
    hm1 = hm;
    hm = hp;
  }
  return hm;
}

namespace {

// c_hat_m for all m <= m_max at once (single pass over nodes, running
// orthonormal recurrence per node).
std::vector<double> chat_by_quadrature(const NonlinearitySpec& F, int m_max,
                                       const QuadRule& rule, int deriv_order) {
  std::vector<double> chat(m_max + 1, 0.0);
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double w = rule.weights[i];
    double fx;
    switch (deriv_order) {
      case 0: fx = F.eval(x); break;
      case 1: fx = F.deriv1(x); break;
      default: fx = F.deriv2(x); break;
    }
    double hm1 = 0.0, hm = 1.0;
    chat[0] += w * fx;
    for (int m = 0; m < m_max; ++m) {
      double hp = (x * hm - std::sqrt(static_cast<double>(m)) * hm1) /
                  std::sqrt(static_cast<double>(m + 1));
      hm1 = hm;
      hm = hp;
      chat[m + 1] += w * fx * hm;
    }
  }
  return chat;
}

// abs family: c_{2k} = 2 int_0^inf x He_2k(x) phi(x) dx
//           = sqrt(2/pi) int_0^inf He_2k(sqrt(2t)) e^-t dt,
// with He_2k(sqrt(2t)) a degree-k polynomial in t, so Gauss-Laguerre is exact.
std::vector<double> chat_abs(int m_max, int n_lag) {
  QuadRule rule = gauss_laguerre(n_lag);
  std::vector<double> chat(m_max + 1, 0.0);
  std::vector<double> acc(m_max + 1, 0.0);  // accumulates orthonormal-basis integrals
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    const double w = rule.weights[i];
    const double x = std::sqrt(2.0 * t);
    double hm1 = 0.0, hm = 1.0;
    acc[0] += w * hm;
    for (int m = 0; m < m_max; ++m) {
      double hp = (x * hm - std::sqrt(static_cast<double>(m)) * hm1) /
                  std::sqrt(static_cast<double>(m + 1));
      hm1 = hm;
      hm = hp;
      acc[m + 1] += w * hm;
    }
  }
  const double pref = std::sqrt(2.0 / M_PI);
  for (int m = 0; m <= m_max; m += 2) chat[m] = pref * acc[m];
  // odd coefficients vanish by symmetry
  return chat;
}

}  // namespace

HermiteTable hermite_coeffs(const NonlinearitySpec& F, int m_max, int n_quad) {
  if (m_max < 0) throw std::invalid_argument("hermite_coeffs: m_max must be >= 0");
  if (n_quad < 2 * m_max)
    throw std::invalid_argument("hermite_coeffs: n_quad must be >= 2*m_max");

  HermiteTable t;
  t.m_max = m_max;
  t.quad = gauss_hermite_pi1(n_quad);

  if (F.family == Family::abs_value) {
    t.c_hat = chat_abs(m_max, 2 * n_quad);
    t.c1 = 0.0;  // sign is odd
    t.c2 = 0.0;
    t.c2_available = false;
  } else {
    t.c_hat = chat_by_quadrature(F, m_max, t.quad, 0);
    t.c1 = 0.0;
    t.c2 = 0.0;
    for (size_t i = 0; i < t.quad.nodes.size(); ++i) {
      t.c1 += t.quad.weights[i] * F.deriv1(t.quad.nodes[i]);
      t.c2 += t.quad.weights[i] * F.deriv2(t.quad.nodes[i]);
    }
    t.c2_available = true;
  }

  t.c.resize(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    const double lc = 0.5 * lfact(m);
    // c_m = c_hat_m * sqrt(m!), in log space once sqrt(m!) alone would not
    // change the conclusion of an underflowing c_hat
    t.c[m] = t.c_hat[m] * std::exp(lc);
    if (!std::isfinite(t.c[m]) && t.c_hat[m] != 0.0) {
      double s = t.c_hat[m] > 0 ? 1.0 : -1.0;
      t.c[m] = s * std::exp(std::log(std::abs(t.c_hat[m])) + lc);
    }
  }

  t.l2_norm_sq = 0.0;
  for (size_t i = 0; i < t.quad.nodes.size(); ++i) {
    double fx = F.eval(t.quad.nodes[i]);
    t.l2_norm_sq += t.quad.weights[i] * fx * fx;
  }
  return t;
}

DecayReport decay_profile(const HermiteTable& table) {
  if (table.m_max < 40) throw std::domain_error("decay_profile: table needs m_max >= 40");
  DecayReport r;

  bool any = false;
  for (int m = 0; m <= table.m_max; ++m)
    if (std::abs(table.c_hat[m]) >= 1e-300) any = true;
  r.underflow = !any;

  for (int k = 1; k <= 5; ++k) {
    double sup = 0.0;
    for (int m = 10; m <= table.m_max; ++m)
      sup = std::max(sup, std::pow(static_cast<double>(m), k) * std::abs(table.c_hat[m]));
    r.sup_mk[k - 1] = sup;
  }

  // least squares of log|c_hat_m| against sqrt(m), even m, nonzero entries
  std::vector<double> xs, ys;
  for (int m = 2; m <= table.m_max; m += 2) {
    double a = std::abs(table.c_hat[m]);
    if (a < 1e-300) continue;
    xs.push_back(std::sqrt(static_cast<double>(m)));
    ys.push_back(std::log(a));
  }
  r.fit_points = static_cast<int>(xs.size());
  if (r.fit_points >= 3) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.intercept = (sy - r.slope * sx) / n;
    double ybar = sy / n, ssr = 0, sst = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      double fit = r.slope * xs[i] + r.intercept;
      ssr += (ys[i] - fit) * (ys[i] - fit);
      sst += (ys[i] - ybar) * (ys[i] - ybar);
    }
    r.r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
  } else {
    r.slope = std::nan("");
    r.intercept = std::nan("");
    r.r2 = 0.0;
  }
  return r;
}

double PolyApprox::eval(double x) const {
  const double y = x / sigma;
  double hm1 = 0.0, hm = 1.0;
  double acc = coeffs.empty() ? 0.0 : coeffs[0];
  for (size_t m = 0; m + 1 < coeffs.size(); ++m) {
    double hp = (y * hm - std::sqrt(static_cast<double>(m)) * hm1) /
                std::sqrt(static_cast<double>(m + 1));
    hm1 = hm;
    hm = hp;
    acc += coeffs[m + 1] * hm;
  }
  return acc;
}

PolyApprox poly_approx(const NonlinearitySpec& F, int M, double kappa) {
  if (F.family == Family::abs_value)
    throw std::domain_error("poly_approx: abs family unsupported");
  check_kappa(kappa);
  if (M < 0) throw std::invalid_argument("poly_approx: M must be >= 0");

  PolyApprox p;
  p.sigma = 1.0 / std::sqrt(2.0 * kappa);
  p.coeffs.assign(M + 1, 0.0);

  // <F, H_m^sigma>_{L2(pi_sigma)} via the pi_1 rule with x = sigma * node
  QuadRule rule = gauss_hermite_pi1(std::max(2 * M + 64, 96));
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double y = rule.nodes[i];
    const double w = rule.weights[i];
    const double fx = F.eval(p.sigma * y);
    double hm1 = 0.0, hm = 1.0;
    p.coeffs[0] += w * fx;
    for (int m = 0; m < M; ++m) {
      double hp = (y * hm - std::sqrt(static_cast<double>(m)) * hm1) /
                  std::sqrt(static_cast<double>(m + 1));
      hm1 = hm;
      hm = hp;
      p.coeffs[m + 1] += w * fx * hm;
    }
  }

  // weighted sup-norm error on the standard grid
  const int n_grid = 100000;
  double err = 0.0;
  for (int i = 0; i <= n_grid; ++i) {
    double x = -40.0 + 80.0 * i / n_grid;
    double e = std::abs(F.eval(x) - p.eval(x)) * std::exp(-kappa * x * x);
    err = std::max(err, e);
  }
  p.sup_err = err;
  return p;
}

double exp_norm(const NonlinearitySpec& F, double kappa) {
  check_kappa(kappa);
  // logarithmically refined grid: dense near 0, geometric out to 40,
  // plus a uniform sweep; ~1e5 points total
  double sup = 0.0;
  auto probe = [&](double x) {
    double v = std::max(std::abs(F.eval(x)), std::abs(F.deriv1(x))) * std::exp(-kappa * x * x);
    sup = std::max(sup, v);
  };
  probe(0.0);
  const int n_log = 25000, n_lin = 25000;
  for (int i = 0; i <= n_log; ++i) {
    double x = 1e-6 * std::pow(40.0 / 1e-6, static_cast<double>(i) / n_log);
    probe(x);
    probe(-x);
  }
  for (int i = 0; i <= n_lin; ++i) {
    double x = 40.0 * i / n_lin;
    probe(x);
    probe(-x);
  }
  return sup;
}

double moment_sum(const HermiteTable& table, int k, int m_upper) {
  double s = 0.0;
  int hi = std::min(m_upper, table.m_max);
  for (int m = 1; m <= hi; ++m)
    s += std::pow(static_cast<double>(m), k) * std::abs(table.c_hat[m]);
  return s;
}

}  // namespace sbe::hermite
