#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sbe/hermite.hpp"
#include "sbe/mollifier.hpp"
#include "sbe/scale.hpp"

namespace sbe::fock {

using cdouble = std::complex<double>;

// Momentum lattice {dp * k : |k|_inf <= K} with per-mode Theta_tau weights
// and canonical (sorted multiset) tuple indexing per chaos level.
class FockGrid {
 public:
  FockGrid(int K, double dp, int n_max, double tau, const noise::Mollifier& mol,
           bool tau_infinite = false);

  uint64_t uid() const { return uid_; }
  int K() const { return K_; }
  double dp() const { return dp_; }
  int n_max() const { return n_max_; }
  int n_modes() const { return M_; }
  const ScaleParams& scale() const { return sc_; }
  double tau() const { return sc_.tau; }

  int mode_id(int kx, int ky) const;  // -1 outside the lattice
  std::array<int, 2> mode_k(int id) const { return modes_[id]; }
  double p1(int id) const { return dp_ * modes_[id][0]; }
  double p2(int id) const { return dp_ * modes_[id][1]; }
  int neg_id(int id) const { return neg_[id]; }
  double theta(int id) const { return theta_[id]; }
  double r_norm_sq(int id) const { return sc_.r_norm_sq(p1(id), p2(id)); }

  size_t level_size(int n) const;
  // ids must be sorted ascending
  size_t rank(const int* ids, int n) const;
  void unrank(int n, size_t r, int* ids) const;
  double log_multiplicity(const int* ids, int n) const;  // log(n!/prod rep!)
  double multiplicity(const int* ids, int n) const;
  // prod_i theta(id_i) * dp^{2n}
  double xi_weight(const int* ids, int n) const;
  double r_norm_sq_tuple(const int* ids, int n) const;
  double p1_norm_sq_tuple(const int* ids, int n) const;  // sum p1_i^2
  double p2_norm_sq_tuple(const int* ids, int n) const;

 private:
  uint64_t uid_;
  int K_, n_max_, M_;
  double dp_;
  ScaleParams sc_;
  std::vector<std::array<int, 2>> modes_;
  std::vector<int> neg_;
  std::vector<double> theta_;
  std::vector<std::vector<double>> binom_;
};

// Truncated Fock-space element: one symmetric kernel per level n <= n_max,
// stored on canonical tuples.
struct ChaosVector {
  const FockGrid* grid = nullptr;
  std::vector<std::vector<cdouble>> levels;
  std::optional<double> chi_tag;  // Fourier-support radius tag: |sqrt(R)p|^2 <= chi*tau

  ChaosVector() = default;
  explicit ChaosVector(const FockGrid& g);
  ChaosVector& operator+=(const ChaosVector& o);
  ChaosVector& operator-=(const ChaosVector& o);
  ChaosVector& operator*=(cdouble s);
  bool empty_level(int n) const;
};

cdouble dot(const ChaosVector& f, const ChaosVector& g);  // <f, g>_tau, conjugates g

struct FockNorms {
  double l2 = 0.0;    // ||.||_tau
  double h1 = 0.0;    // ||.||_{H^1_tau}
  double hm1 = 0.0;   // ||.||_{H^-1_tau}
  double aniso = 0.0; // ||(-nu L0^{e1})^{1/2} .||_tau
};
FockNorms norms(const ChaosVector& v);

// Diagonal operators: kernel evaluated on each canonical tuple.
using DiagKernel = std::function<double(int /*level*/, const int* /*ids*/, int /*n*/)>;
ChaosVector apply_diagonal(const DiagKernel& k, const ChaosVector& v);

// named kernels
DiagKernel kernel_S(const FockGrid& g);        // -1/2 |sqrt(R) p|^2
DiagKernel kernel_L0e1(const FockGrid& g);     // -1/2 sum p1^2
DiagKernel kernel_L0e2(const FockGrid& g);     // -1/2 sum p2^2
DiagKernel kernel_number();                    // n
DiagKernel kernel_G_M(const FockGrid& g, double M, double c2);
DiagKernel kernel_Pi_left(const FockGrid& g, double c);
DiagKernel kernel_effective(const FockGrid& g, double d11);  // d11 L0e1 + L0e2

// g^tau, g^tau_M and L^tau of the ansatz construction
double g_tau(double x, double nu);
double g_tau_M(double x, double nu, double M);
double L_tau(double x, double tau, double nu, double c2);

struct LeakStats {
  size_t dropped_terms = 0;   // inner momenta falling off the lattice
  size_t dropped_levels = 0;  // output levels beyond n_max
};

// A^{tau,m}_a on the truncated space; a must lie in {-m+1, -m+3, ..., m-1}.
ChaosVector apply_A(int m, int a, const ChaosVector& v, LeakStats* leak = nullptr);
// sum over all valid a
ChaosVector apply_A_all(int m, const ChaosVector& v, LeakStats* leak = nullptr);

struct AssembleReport {
  double tail_bound = 0.0;   // sum_{m > M_A} |c_hat_m| C m^{n/2} envelope
  double fitted_C = 0.0;
  LeakStats leaks;
};

// sum_{m <= M_A} c_m(F) A^{tau,m} v, with the B.1-envelope tail report.
ChaosVector assemble_A(const hermite::HermiteTable& table, const ChaosVector& v, int M_A,
                       AssembleReport* report = nullptr);
// the same sum with the m = 2 term removed
ChaosVector assemble_A_neq2(const hermite::HermiteTable& table, const ChaosVector& v,
                            int M_A, AssembleReport* report = nullptr);

// Sharp operator: A^{tau,2}_{+-1} with the multiplier
// 1{|sqrt(R)q| ^ |sqrt(R)q'| > 2 |sqrt(R) p_{1:N}|} inserted; flat is the rest,
// so sharp + flat = A^{tau,2}_{+-1} identically and sharp_{-1} = -(sharp_{+1})^*.
ChaosVector apply_sharp(int direction, const ChaosVector& v);
ChaosVector apply_flat(int direction, const ChaosVector& v);

struct AnsatzResult {
  ChaosVector s_tilde;
  bool truncated = false;  // K_terms clipped at n_max
};

// s_tilde = sum_{k <= K_terms} c2^k (G_M A^sharp_{+1})^k G_M phi
AnsatzResult build_ansatz(const ChaosVector& phi, int K_terms, double M, double c2);
// amended ansatz: Pi_left s_tilde
ChaosVector amend_ansatz(const ChaosVector& s_tilde, double c);

// (1 - L^{tau,2}) v with L^{tau,2} = S + c2 (A_{+1} + A_{-1}), truncated.
ChaosVector apply_one_minus_L2(const ChaosVector& v, double c2);

struct ResidualBreakdown {
  double phi_l2 = 0.0;
  double residual_hm1 = 0.0;  // ||(1 - L^{tau,2}) s_tilde - phi||_{H^-1_tau}
  double ratio = 0.0;
  double s_l2 = 0.0, s_h1 = 0.0;
};

// Ansatz residual at the grid's tau.  The grid should have n_max at least
// n0 + K_terms + 1 so the top-level creation is charged to the residual
// rather than silently truncated.
ResidualBreakdown ansatz_residual(const ChaosVector& phi, int K_terms, double M, double c2);

struct SolveResult {
  ChaosVector x;
  double rel_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

// GMRES with (1-S)^{-1} right preconditioning for (1 - L^{tau,2}) x = rhs.
SolveResult resolvent_solve(const ChaosVector& rhs, double c2, double tol,
                            int max_iter = 400);

// Wiener-Ito product of pure-level elements f (level n1) and g (level n2).
ChaosVector wick_product(const ChaosVector& f, int n1, const ChaosVector& g, int n2);

// deterministic random test vector; level n filled with unit-scale complex
// Gaussian entries (optionally restricted to |sqrt(R)p|^2 <= chi*tau)
ChaosVector random_vector(const FockGrid& g, const std::vector<int>& fill_levels,
                          uint64_t seed, std::optional<double> chi = std::nullopt);

}  // namespace sbe::fock
