#include "sbe/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sbe {

namespace {

// Nodes: eigenvalues of the Jacobi matrix.  Weights: Christoffel sums
// w_i = mu0 / sum_k p_k(x_i)^2 over the orthonormal polynomials, which stays
// accurate where eigenvector first components underflow.  The running pair
// is rescaled so the sum survives extreme nodes.
std::vector<double> jacobi_eigenvalues(const std::vector<double>& diag,
                                       const std::vector<double>& offdiag) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolve failed");
  std::vector<double> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = es.eigenvalues()(i);
  return nodes;
}

// orthonormal recurrence b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1}
double christoffel_weight(double x, const std::vector<double>& a,
                          const std::vector<double>& b, double mu0) {
  const int n = static_cast<int>(a.size());
  double hm1 = 0.0, hm = 1.0;  // p_0 = 1 in the mu0-normalized measure
  double sum = 1.0;
  double log_scale = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    double hp = ((x - a[k]) * hm - (k > 0 ? b[k - 1] : 0.0) * hm1) / b[k];
    hm1 = hm;
    hm = hp;
    if (std::abs(hm) > 1e140) {
      hm *= 1e-140;
      hm1 *= 1e-140;
      sum *= 1e-280;
      log_scale += 140.0 * std::log(10.0);
    }
    sum += hm * hm;
  }
  double logw = std::log(mu0) - std::log(sum) - 2.0 * log_scale;
  return logw < -745.0 ? 0.0 : std::exp(logw);
}

QuadRule rule_from_recurrence(const std::vector<double>& a, const std::vector<double>& b,
                              double mu0) {
  const int n = static_cast<int>(a.size());
  std::vector<double> off(b.begin(), b.begin() + (n - 1));
  QuadRule r;
  r.nodes = jacobi_eigenvalues(a, off);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) r.weights[i] = christoffel_weight(r.nodes[i], a, b, mu0);
  return r;
}

}  // namespace

QuadRule gauss_hermite_pi1(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_pi1: n must be >= 1");
  // orthonormal Hermite for the pi_1 weight: a_k = 0, b_k = sqrt(k+1)
  std::vector<double> a(n, 0.0), b(n);
  for (int k = 0; k < n; ++k) b[k] = std::sqrt(static_cast<double>(k + 1));
  QuadRule r = rule_from_recurrence(a, b, 1.0);
  // enforce the exact +- symmetry of the rule (nodes are sorted)
  for (int i = 0; i < n / 2; ++i) {
    double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2) r.nodes[n / 2] = 0.0;
  return r;
}

QuadRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be >= 1");
  std::vector<double> a(n), b(n);
  for (int k = 0; k < n; ++k) {
    a[k] = 2.0 * k + 1.0;
    b[k] = static_cast<double>(k + 1);
  }
  return rule_from_recurrence(a, b, 1.0);
}

QuadRule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<double> a(n, 0.0), b(n);
  for (int k = 0; k < n; ++k) {
    double kk = k + 1;
    b[k] = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  QuadRule r = rule_from_recurrence(a, b, 2.0);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = 0.5 * (hi - lo) * r.nodes[i] + 0.5 * (lo + hi);
    r.weights[i] *= 0.5 * (hi - lo);
  }
  return r;
}

}  // namespace sbe
