#include "sbe/fock.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "sbe/rng.hpp"

namespace sbe::fock {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void sorted_insert(const int* ids, int n, int extra, int* out) {
  // merge one id into a sorted array
  int i = 0;
  while (i < n && ids[i] <= extra) {
    out[i] = ids[i];
    ++i;
  }
  out[i] = extra;
  for (; i < n; ++i) out[i + 1] = ids[i];
}

}  // namespace

namespace {
std::atomic<uint64_t> g_grid_serial{1};
}

FockGrid::FockGrid(int K, double dp, int n_max, double tau, const noise::Mollifier& mol,
                   bool tau_infinite)
    : uid_(g_grid_serial.fetch_add(1)), K_(K), n_max_(n_max),
      M_((2 * K + 1) * (2 * K + 1)), dp_(dp) {
  if (K < 1) throw std::invalid_argument("FockGrid: K must be >= 1");
  if (n_max < 0) throw std::invalid_argument("FockGrid: n_max must be >= 0");
  sc_ = ScaleParams::at(tau);
  modes_.resize(M_);
  neg_.resize(M_);
  theta_.resize(M_);
  int id = 0;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky) modes_[id++] = {kx, ky};
  for (int i = 0; i < M_; ++i) {
    neg_[i] = mode_id(-modes_[i][0], -modes_[i][1]);
    theta_[i] = tau_infinite
                    ? 1.0
                    : noise::theta_tau(dp_ * modes_[i][0], dp_ * modes_[i][1], sc_, mol);
  }
  // binomial table C(i, j) for tuple ranking, i <= M + n_max, j <= n_max + 1
  int imax = M_ + n_max_ + 2;
  int jmax = n_max_ + 2;
  binom_.assign(imax, std::vector<double>(jmax, 0.0));
  for (int i = 0; i < imax; ++i) {
    binom_[i][0] = 1.0;
    for (int j = 1; j < jmax && j <= i; ++j)
      binom_[i][j] = binom_[i - 1][j - 1] + (i - 1 >= j ? binom_[i - 1][j] : 0.0);
  }
}

int FockGrid::mode_id(int kx, int ky) const {
  if (std::abs(kx) > K_ || std::abs(ky) > K_) return -1;
  return (kx + K_) * (2 * K_ + 1) + (ky + K_);
}

size_t FockGrid::level_size(int n) const {
  if (n == 0) return 1;
  return static_cast<size_t>(binom_[M_ + n - 1][n]);
}

size_t FockGrid::rank(const int* ids, int n) const {
  // combinatorial number system on the strictly increasing j_t = ids[t] + t
  double r = 0.0;
  for (int t = 0; t < n; ++t) {
    int jt = ids[t] + t;
    if (jt >= t + 1) r += binom_[jt][t + 1];
  }
  return static_cast<size_t>(r);
}

void FockGrid::unrank(int n, size_t r, int* ids) const {
  double rem = static_cast<double>(r);
  for (int t = n; t >= 1; --t) {
    // largest j with C(j, t) <= rem
    int j = t - 1;
    while (j + 1 < M_ + n && binom_[j + 1][t] <= rem) ++j;
    rem -= binom_[j][t];
    ids[t - 1] = j - (t - 1);
  }
}

double FockGrid::log_multiplicity(const int* ids, int n) const {
  return std::log(multiplicity(ids, n));
}

double FockGrid::multiplicity(const int* ids, int n) const {
  double m = factorial(n);
  int run = 1;
  for (int i = 1; i < n; ++i) {
    if (ids[i] == ids[i - 1])
      ++run;
    else {
      m /= factorial(run);
      run = 1;
    }
  }
  m /= factorial(run);
  return m;
}

double FockGrid::xi_weight(const int* ids, int n) const {
  double w = 1.0;
  for (int i = 0; i < n; ++i) w *= theta_[ids[i]] * dp_ * dp_;
  return w;
}

double FockGrid::r_norm_sq_tuple(const int* ids, int n) const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += r_norm_sq(ids[i]);
  return s;
}

double FockGrid::p1_norm_sq_tuple(const int* ids, int n) const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += p1(ids[i]) * p1(ids[i]);
  return s;
}

double FockGrid::p2_norm_sq_tuple(const int* ids, int n) const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += p2(ids[i]) * p2(ids[i]);
  return s;
}

ChaosVector::ChaosVector(const FockGrid& g) : grid(&g) {
  levels.resize(g.n_max() + 1);
  for (int n = 0; n <= g.n_max(); ++n) levels[n].assign(g.level_size(n), cdouble{0, 0});
}

ChaosVector& ChaosVector::operator+=(const ChaosVector& o) {
  for (size_t n = 0; n < levels.size(); ++n)
    for (size_t i = 0; i < levels[n].size(); ++i) levels[n][i] += o.levels[n][i];
  return *this;
}

ChaosVector& ChaosVector::operator-=(const ChaosVector& o) {
  for (size_t n = 0; n < levels.size(); ++n)
    for (size_t i = 0; i < levels[n].size(); ++i) levels[n][i] -= o.levels[n][i];
  return *this;
}

ChaosVector& ChaosVector::operator*=(cdouble s) {
  for (auto& lv : levels)
    for (auto& z : lv) z *= s;
  return *this;
}

bool ChaosVector::empty_level(int n) const {
  for (const auto& z : levels[n])
    if (z != cdouble{0, 0}) return false;
  return true;
}

namespace {

// iterate canonical tuples (non-decreasing id sequences) of a level; the
// rank passed to fn is the colex rank used by rank()/unrank(), not the
// visitation index
template <typename Fn>
void for_each_tuple(const FockGrid& g, int n, Fn&& fn) {
  if (n == 0) {
    int dummy = 0;
    fn(&dummy, size_t{0});
    return;
  }
  std::vector<int> ids(n, 0);
  const int M = g.n_modes();
  for (;;) {
    fn(ids.data(), g.rank(ids.data(), n));
    int i = n - 1;
    while (i >= 0 && ids[i] == M - 1) --i;
    if (i < 0) break;
    int v = ids[i] + 1;
    for (int t = i; t < n; ++t) ids[t] = v;
  }
}

// per-level entry weights n! * multiplicity * Xi  (the <,>_tau quadrature)
std::vector<double> entry_weights(const FockGrid& g, int n) {
  std::vector<double> w(g.level_size(n));
  double nf = factorial(n);
  for_each_tuple(g, n, [&](const int* ids, size_t r) {
    w[r] = nf * g.multiplicity(ids, n) * g.xi_weight(ids, n);
  });
  return w;
}

struct WeightsCache {
  uint64_t uid = 0;
  std::vector<std::vector<double>> w;
};

const std::vector<double>& weights_for(const FockGrid& g, int n) {
  thread_local WeightsCache cache;
  if (cache.uid != g.uid()) {
    cache.uid = g.uid();
    cache.w.assign(g.n_max() + 1, {});
  }
  if (cache.w[n].empty()) cache.w[n] = entry_weights(g, n);
  return cache.w[n];
}

}  // namespace

cdouble dot(const ChaosVector& f, const ChaosVector& g) {
  const FockGrid& grid = *f.grid;
  cdouble acc{0, 0};
  for (int n = 0; n <= grid.n_max(); ++n) {
    const auto& w = weights_for(grid, n);
    for (size_t i = 0; i < w.size(); ++i) acc += w[i] * f.levels[n][i] * std::conj(g.levels[n][i]);
  }
  return acc;
}

FockNorms norms(const ChaosVector& v) {
  const FockGrid& g = *v.grid;
  FockNorms out;
  double l2 = 0, h1 = 0, hm1 = 0, an = 0;
  for (int n = 0; n <= g.n_max(); ++n) {
    const auto& w = weights_for(g, n);
    for_each_tuple(g, n, [&](const int* ids, size_t r) {
      double a2 = std::norm(v.levels[n][r]);
      if (a2 == 0.0) return;
      double base = w[r] * a2;
      double sob = 1.0 + 0.5 * g.r_norm_sq_tuple(ids, n);
      l2 += base;
      h1 += base * sob;
      hm1 += base / sob;
      an += base * 0.5 * g.scale().nu * g.p1_norm_sq_tuple(ids, n);
    });
  }
  out.l2 = std::sqrt(l2);
  out.h1 = std::sqrt(h1);
  out.hm1 = std::sqrt(hm1);
  out.aniso = std::sqrt(an);
  return out;
}

ChaosVector apply_diagonal(const DiagKernel& k, const ChaosVector& v) {
  const FockGrid& g = *v.grid;
  ChaosVector out(g);
  for (int n = 0; n <= g.n_max(); ++n) {
    if (v.empty_level(n)) continue;
    for_each_tuple(g, n, [&](const int* ids, size_t r) {
      out.levels[n][r] = k(n, ids, n) * v.levels[n][r];
    });
  }
  out.chi_tag = v.chi_tag;
  return out;
}

DiagKernel kernel_S(const FockGrid& g) {
  return [&g](int, const int* ids, int n) { return -0.5 * g.r_norm_sq_tuple(ids, n); };
}

DiagKernel kernel_L0e1(const FockGrid& g) {
  return [&g](int, const int* ids, int n) { return -0.5 * g.p1_norm_sq_tuple(ids, n); };
}

DiagKernel kernel_L0e2(const FockGrid& g) {
  return [&g](int, const int* ids, int n) { return -0.5 * g.p2_norm_sq_tuple(ids, n); };
}

DiagKernel kernel_number() {
  return [](int level, const int*, int) { return static_cast<double>(level); };
}

double g_tau(double x, double nu) {
  return std::pow(1.5 * x + std::pow(nu, 1.5), 2.0 / 3.0) - nu;
}

double g_tau_M(double x, double nu, double M) { return std::max(M * nu, g_tau(x, nu)); }

double L_tau(double x, double tau, double nu, double c2) {
  return c2 * c2 * std::pow(nu, 1.5) / M_PI * std::log1p(tau / (1.0 + x));
}

DiagKernel kernel_G_M(const FockGrid& g, double M, double c2) {
  double nu = g.scale().nu, tau = g.tau();
  return [&g, M, c2, nu, tau](int, const int* ids, int n) {
    double x = 0.5 * g.r_norm_sq_tuple(ids, n);  // -S kernel
    double gm = g_tau_M(L_tau(x, tau, nu, c2), nu, M);
    return 1.0 / (1.0 + x + gm * 0.5 * g.p1_norm_sq_tuple(ids, n));
  };
}

DiagKernel kernel_Pi_left(const FockGrid& g, double c) {
  double nu = g.scale().nu, tau = g.tau();
  return [&g, c, nu, tau](int level, const int* ids, int n) {
    if (level > -std::log(nu) / c) return 0.0;
    double r2 = g.r_norm_sq_tuple(ids, n);
    return r2 <= tau * std::exp(-std::exp(c * level)) ? 1.0 : 0.0;
  };
}

DiagKernel kernel_effective(const FockGrid& g, double d11) {
  return [&g, d11](int, const int* ids, int n) {
    return -0.5 * (d11 * g.p1_norm_sq_tuple(ids, n) + g.p2_norm_sq_tuple(ids, n));
  };
}

namespace {

struct InnerCache {
  std::unordered_map<uint64_t, cdouble> map;
};

// constrained lattice sum over r_{1:j+1} with r_{[1:j+1]} fixed to ksum
cdouble inner_sum(const FockGrid& g, const std::vector<cdouble>& level_data, int n, int j,
                  std::array<int, 2> ksum, const int* pass, int n_pass, LeakStats* leak) {
  const int M = g.n_modes();
  std::vector<int> buf(n);
  if (j == 0) {
    int idP = g.mode_id(ksum[0], ksum[1]);
    if (idP < 0) {
      if (leak) ++leak->dropped_terms;
      return {0, 0};
    }
    sorted_insert(pass, n_pass, idP, buf.data());
    return g.theta(idP) * level_data[g.rank(buf.data(), n)];
  }
  // ordered sum over j free momenta; the last one is fixed by the constraint
  cdouble acc{0, 0};
  std::vector<int> rs(j, 0);
  std::vector<int> merged(n);
  const double dp2 = g.dp() * g.dp();
  for (;;) {
    int sx = ksum[0], sy = ksum[1];
    double w = 1.0;
    for (int t = 0; t < j; ++t) {
      auto k = g.mode_k(rs[t]);
      sx -= k[0];
      sy -= k[1];
      w *= g.theta(rs[t]) * dp2;
    }
    int idl = g.mode_id(sx, sy);
    if (idl >= 0) {
      w *= g.theta(idl);
      // merge {rs..., idl, pass...} sorted
      std::vector<int> tmp(j + 1);
      for (int t = 0; t < j; ++t) tmp[t] = rs[t];
      tmp[j] = idl;
      std::sort(tmp.begin(), tmp.end());
      std::merge(tmp.begin(), tmp.end(), pass, pass + n_pass, merged.begin());
      acc += w * level_data[g.rank(merged.data(), n)];
    } else if (leak) {
      ++leak->dropped_terms;
    }
    // odometer over ordered tuples rs in [0, M)^j
    int i = j - 1;
    while (i >= 0 && rs[i] == M - 1) {
      rs[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++rs[i];
  }
  return acc;
}

cdouble cached_inner(const FockGrid& g, const std::vector<cdouble>& level_data, int n, int j,
                     std::array<int, 2> ksum, const int* pass, int n_pass, int ext,
                     InnerCache& cache, LeakStats* leak) {
  const int W = 2 * ext + 1;
  uint64_t eid = static_cast<uint64_t>(ksum[0] + ext) * W + (ksum[1] + ext);
  uint64_t prank = n_pass > 0 ? g.rank(pass, n_pass) : 0;
  uint64_t key = eid * (g.level_size(std::max(n_pass, 0)) + 1) + prank;
  auto it = cache.map.find(key);
  if (it != cache.map.end()) return it->second;
  cdouble v = inner_sum(g, level_data, n, j, ksum, pass, n_pass, leak);
  cache.map.emplace(key, v);
  return v;
}

// iterate size-c position subsets of {0..q-1}
template <typename Fn>
void for_each_subset(int q, int c, Fn&& fn) {
  std::vector<int> idx(c);
  for (int i = 0; i < c; ++i) idx[i] = i;
  if (c == 0) {
    fn(idx);
    return;
  }
  for (;;) {
    fn(idx);
    int i = c - 1;
    while (i >= 0 && idx[i] == q - c + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int t = i + 1; t < c; ++t) idx[t] = idx[t - 1] + 1;
  }
}

void validate_ma(int m, int a) {
  if (m < 1) throw std::domain_error("apply_A: m must be >= 1");
  int d = m - 1 - a;
  if (d < 0 || d % 2 != 0 || d / 2 > m - 1)
    throw std::domain_error("apply_A: a must lie in {-m+1, -m+3, ..., m-1}");
}

}  // namespace

ChaosVector apply_A(int m, int a, const ChaosVector& v, LeakStats* leak) {
  validate_ma(m, a);
  const FockGrid& g = *v.grid;
  const int j = (m - 1 - a) / 2;
  ChaosVector out(g);
  const double tau = g.tau(), nu = g.scale().nu, dp = g.dp();

  for (int n = 0; n <= g.n_max(); ++n) {
    if (v.empty_level(n)) continue;

    if (m == 1) {
      for_each_tuple(g, n, [&](const int* ids, size_t r) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += g.p1(ids[i]) * (g.theta(ids[i]) - 1.0);
        out.levels[n][r] += cdouble(0, -1) * std::sqrt(tau * nu) * s * v.levels[n][r];
      });
      continue;
    }

    if (j + 1 > n) continue;
    const int q = n + a;
    if (q < 1) continue;
    if (q > g.n_max()) {
      if (leak) ++leak->dropped_levels;
      continue;
    }

    const double pref = std::exp((1.0 - 0.5 * m) * std::log(tau)) *
                        std::pow(nu, 0.25 * (1 + m)) / std::pow(2.0 * M_PI, m - 1) *
                        factorial(n) / (factorial(q) * factorial(j + 1));
    const int take = m - j;  // new momenta count
    const int ext = take * g.K();
    InnerCache cache;
    const auto& data = v.levels[n];

    std::vector<int> pass(std::max(q - take, 0));
    for_each_tuple(g, q, [&](const int* ids, size_t r) {
      cdouble acc{0, 0};
      for_each_subset(q, take, [&](const std::vector<int>& idx) {
        int sx = 0, sy = 0;
        for (int t : idx) {
          auto k = g.mode_k(ids[t]);
          sx += k[0];
          sy += k[1];
        }
        double e1P = dp * sx;
        if (e1P == 0.0) return;
        // passthrough = ids minus chosen positions (stays sorted)
        int pi = 0, ci = 0;
        for (int t = 0; t < q; ++t) {
          if (ci < take && idx[ci] == t) {
            ++ci;
            continue;
          }
          pass[pi++] = ids[t];
        }
        cdouble inner = cached_inner(g, data, n, j, {sx, sy}, pass.data(), pi, ext, cache, leak);
        acc += e1P * inner;
      });
      if (acc != cdouble{0, 0}) out.levels[q][r] += cdouble(0, -1) * pref * acc;
    });
  }
  return out;
}

ChaosVector apply_A_all(int m, const ChaosVector& v, LeakStats* leak) {
  const FockGrid& g = *v.grid;
  ChaosVector out(g);
  for (int j = 0; j <= m - 1; ++j) {
    int a = m - 2 * j - 1;
    ChaosVector part = apply_A(m, a, v, leak);
    out += part;
  }
  return out;
}

ChaosVector assemble_A(const hermite::HermiteTable& table, const ChaosVector& v, int M_A,
                       AssembleReport* report) {
  const FockGrid& g = *v.grid;
  ChaosVector out(g);
  int n_top = 0;
  for (int n = 0; n <= g.n_max(); ++n)
    if (!v.empty_level(n)) n_top = n;
  double vnorm = norms(v).l2;
  double fitted_C = 0.0;
  LeakStats leaks;
  int m_hi = std::min(M_A, table.m_max);
  for (int m = 1; m <= m_hi; ++m) {
    if (table.c[m] == 0.0) continue;
    ChaosVector part = apply_A_all(m, v, &leaks);
    double ratio = vnorm > 0
                       ? std::sqrt(factorial(m)) * norms(part).l2 /
                             (std::pow(static_cast<double>(m), 0.5 * n_top) * vnorm)
                       : 0.0;
    fitted_C = std::max(fitted_C, ratio);
    part *= table.c[m];
    out += part;
  }
  if (report) {
    report->fitted_C = fitted_C;
    report->leaks = leaks;
    double tail = 0.0;
    for (int m = M_A + 1; m <= table.m_max; ++m)
      tail += std::abs(table.c_hat[m]) * fitted_C * std::pow(static_cast<double>(m), 0.5 * n_top);
    report->tail_bound = tail;
  }
  return out;
}

ChaosVector assemble_A_neq2(const hermite::HermiteTable& table, const ChaosVector& v,
                            int M_A, AssembleReport* report) {
  hermite::HermiteTable t = table;
  if (t.m_max >= 2) {
    t.c[2] = 0.0;
    t.c_hat[2] = 0.0;
  }
  return assemble_A(t, v, M_A, report);
}

namespace {

bool sharp_multiplier(const FockGrid& g, int id_q, int id_qp, double state_r2) {
  double a = g.r_norm_sq(id_q), b = g.r_norm_sq(id_qp);
  return std::min(a, b) > 4.0 * state_r2;
}

ChaosVector apply_quadratic(int direction, const ChaosVector& v, int want_sharp_flag) {
  // want_sharp_flag: 0 -> full A^{tau,2}_dir, 1 -> sharp part, -1 -> flat part
  const FockGrid& g = *v.grid;
  ChaosVector out(g);
  const double nu = g.scale().nu, dp = g.dp();
  const double dp2 = dp * dp;
  const int M = g.n_modes();

  for (int n = 0; n <= g.n_max(); ++n) {
    if (v.empty_level(n)) continue;
    const auto& data = v.levels[n];

    if (direction == +1) {
      const int q = n + 1;
      if (q > g.n_max()) continue;
      const double pref = std::pow(nu, 0.75) / (2.0 * M_PI) / q;
      std::vector<int> merged(n);
      std::vector<int> pass(std::max(n - 1, 0));
      for_each_tuple(g, q, [&](const int* ids, size_t r) {
        cdouble acc{0, 0};
        for (int i = 0; i < q; ++i)
          for (int jj = i + 1; jj < q; ++jj) {
            auto ki = g.mode_k(ids[i]);
            auto kj = g.mode_k(ids[jj]);
            int sx = ki[0] + kj[0], sy = ki[1] + kj[1];
            if (sx == 0) continue;  // e1 . P factor vanishes
            int idP = g.mode_id(sx, sy);
            if (idP < 0) continue;  // leakage
            int pi = 0;
            for (int t = 0; t < q; ++t)
              if (t != i && t != jj) pass[pi++] = ids[t];
            if (want_sharp_flag != 0) {
              double state_r2 = g.r_norm_sq(idP);
              for (int t = 0; t < pi; ++t) state_r2 += g.r_norm_sq(pass[t]);
              bool sharp = sharp_multiplier(g, ids[i], ids[jj], state_r2);
              if (want_sharp_flag == 1 && !sharp) continue;
              if (want_sharp_flag == -1 && sharp) continue;
            }
            sorted_insert(pass.data(), pi, idP, merged.data());
            acc += dp * sx * g.theta(idP) * data[g.rank(merged.data(), n)];
          }
        if (acc != cdouble{0, 0}) out.levels[q][r] += cdouble(0, -1) * pref * acc;
      });
    } else {
      const int q = n - 1;
      if (q < 1) continue;
      const double pref = std::pow(nu, 0.75) / (2.0 * M_PI) * n / 2.0;
      std::vector<int> merged(n);
      std::vector<int> pass(std::max(q - 1, 0));
      std::vector<int> pair2(2);
      for_each_tuple(g, q, [&](const int* ids, size_t r) {
        double state_r2 = g.r_norm_sq_tuple(ids, q);
        cdouble acc{0, 0};
        for (int i = 0; i < q; ++i) {
          auto kP = g.mode_k(ids[i]);
          if (kP[0] == 0) continue;  // e1 . p_i factor vanishes
          int pi = 0;
          for (int t = 0; t < q; ++t)
            if (t != i) pass[pi++] = ids[t];
          cdouble inner{0, 0};
          for (int idr = 0; idr < M; ++idr) {
            auto kr = g.mode_k(idr);
            int id2 = g.mode_id(kP[0] - kr[0], kP[1] - kr[1]);
            if (id2 < 0) continue;
            if (want_sharp_flag != 0) {
              bool sharp = sharp_multiplier(g, idr, id2, state_r2);
              if (want_sharp_flag == 1 && !sharp) continue;
              if (want_sharp_flag == -1 && sharp) continue;
            }
            pair2[0] = std::min(idr, id2);
            pair2[1] = std::max(idr, id2);
            std::merge(pair2.begin(), pair2.end(), pass.data(), pass.data() + pi,
                       merged.begin());
            inner += dp2 * g.theta(idr) * g.theta(id2) * data[g.rank(merged.data(), n)];
          }
          acc += dp * kP[0] * inner;
        }
        if (acc != cdouble{0, 0}) out.levels[q][r] += cdouble(0, -1) * pref * acc;
      });
    }
  }
  return out;
}

}  // namespace

ChaosVector apply_sharp(int direction, const ChaosVector& v) {
  if (direction != 1 && direction != -1)
    throw std::domain_error("apply_sharp: direction must be +-1");
  return apply_quadratic(direction, v, 1);
}

ChaosVector apply_flat(int direction, const ChaosVector& v) {
  if (direction != 1 && direction != -1)
    throw std::domain_error("apply_flat: direction must be +-1");
  return apply_quadratic(direction, v, -1);
}

AnsatzResult build_ansatz(const ChaosVector& phi, int K_terms, double M, double c2) {
  const FockGrid& g = *phi.grid;
  int n0 = 0;
  for (int n = g.n_max(); n >= 0; --n)
    if (!phi.empty_level(n)) n0 = n;
  AnsatzResult res;
  if (K_terms > g.n_max() - n0) {
    K_terms = g.n_max() - n0;
    res.truncated = true;
  }
  auto GM = kernel_G_M(g, M, c2);
  ChaosVector w = apply_diagonal(GM, phi);
  res.s_tilde = w;
  for (int k = 1; k <= K_terms; ++k) {
    ChaosVector aw = apply_sharp(+1, w);
    w = apply_diagonal(GM, aw);
    w *= cdouble(c2, 0.0);
    res.s_tilde += w;
  }
  return res;
}

ChaosVector amend_ansatz(const ChaosVector& s_tilde, double c) {
  return apply_diagonal(kernel_Pi_left(*s_tilde.grid, c), s_tilde);
}

ChaosVector apply_one_minus_L2(const ChaosVector& v, double c2) {
  const FockGrid& g = *v.grid;
  ChaosVector out = apply_diagonal(
      [&g](int, const int* ids, int n) { return 1.0 + 0.5 * g.r_norm_sq_tuple(ids, n); }, v);
  ChaosVector a_up = apply_A(2, +1, v);
  ChaosVector a_dn = apply_A(2, -1, v);
  a_up += a_dn;
  a_up *= cdouble(-c2, 0.0);
  out += a_up;
  return out;
}

ResidualBreakdown ansatz_residual(const ChaosVector& phi, int K_terms, double M, double c2) {
  auto ans = build_ansatz(phi, K_terms, M, c2);
  ChaosVector r = apply_one_minus_L2(ans.s_tilde, c2);
  r -= phi;
  ResidualBreakdown out;
  out.phi_l2 = norms(phi).l2;
  out.residual_hm1 = norms(r).hm1;
  out.ratio = out.phi_l2 > 0 ? out.residual_hm1 / out.phi_l2 : 0.0;
  auto ns = norms(ans.s_tilde);
  out.s_l2 = ns.l2;
  out.s_h1 = ns.h1;
  return out;
}

namespace {

size_t flat_size(const FockGrid& g) {
  size_t s = 0;
  for (int n = 0; n <= g.n_max(); ++n) s += g.level_size(n);
  return s;
}

void to_flat(const ChaosVector& v, std::vector<cdouble>& f) {
  size_t i = 0;
  for (const auto& lv : v.levels)
    for (auto z : lv) f[i++] = z;
}

void from_flat(const std::vector<cdouble>& f, ChaosVector& v) {
  size_t i = 0;
  for (auto& lv : v.levels)
    for (auto& z : lv) z = f[i++];
}

}  // namespace

SolveResult resolvent_solve(const ChaosVector& rhs, double c2, double tol, int max_iter) {
  if (!(tol > 0)) throw std::invalid_argument("resolvent_solve: tol must be > 0");
  const FockGrid& g = *rhs.grid;
  const size_t D = flat_size(g);

  // entry weights for the Fock inner product, flattened
  std::vector<double> w(D);
  {
    size_t i = 0;
    for (int n = 0; n <= g.n_max(); ++n) {
      const auto& wn = weights_for(g, n);
      for (double x : wn) w[i++] = x;
    }
  }
  auto wdot = [&](const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    cdouble s{0, 0};
    for (size_t i = 0; i < D; ++i) s += w[i] * a[i] * std::conj(b[i]);
    return s;
  };
  auto wnorm = [&](const std::vector<cdouble>& a) { return std::sqrt(std::abs(wdot(a, a))); };

  // diagonal right preconditioner (1 - S)^{-1}
  std::vector<double> prec(D);
  {
    size_t i = 0;
    for (int n = 0; n <= g.n_max(); ++n)
      for_each_tuple(g, n, [&](const int* ids, size_t) {
        prec[i++] = 1.0 / (1.0 + 0.5 * g.r_norm_sq_tuple(ids, n));
      });
  }

  ChaosVector tmp_in(g), tmp_out(g);
  auto apply_op = [&](const std::vector<cdouble>& x, std::vector<cdouble>& y) {
    // y = (1 - L^{tau,2}) M^{-1} x
    std::vector<cdouble> xp(D);
    for (size_t i = 0; i < D; ++i) xp[i] = prec[i] * x[i];
    from_flat(xp, tmp_in);
    tmp_out = apply_one_minus_L2(tmp_in, c2);
    to_flat(tmp_out, y);
  };

  std::vector<cdouble> b(D);
  to_flat(rhs, b);
  const double bnorm = wnorm(b);
  SolveResult res;
  res.x = ChaosVector(g);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  // GMRES (no restart) with Givens rotations
  int mx = std::min<int>(max_iter, static_cast<int>(D));
  std::vector<std::vector<cdouble>> V;
  V.reserve(mx + 1);
  std::vector<std::vector<cdouble>> H(mx + 1, std::vector<cdouble>(mx, {0, 0}));
  std::vector<cdouble> cs(mx), sn(mx), beta_vec(mx + 1, {0, 0});

  std::vector<cdouble> r0 = b;  // x0 = 0
  double beta = wnorm(r0);
  for (auto& z : r0) z /= beta;
  V.push_back(std::move(r0));
  beta_vec[0] = beta;

  int k_done = 0;
  std::vector<cdouble> wvec(D);
  for (int k = 0; k < mx; ++k) {
    apply_op(V[k], wvec);
    for (int i = 0; i <= k; ++i) {
      cdouble h = wdot(wvec, V[i]);
      H[i][k] = h;
      for (size_t t = 0; t < D; ++t) wvec[t] -= h * V[i][t];
    }
    // one reorthogonalization pass
    for (int i = 0; i <= k; ++i) {
      cdouble h = wdot(wvec, V[i]);
      H[i][k] += h;
      for (size_t t = 0; t < D; ++t) wvec[t] -= h * V[i][t];
    }
    double hk1 = wnorm(wvec);
    H[k + 1][k] = hk1;

    // apply accumulated rotations to the new column
    for (int i = 0; i < k; ++i) {
      cdouble t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
      H[i + 1][k] = -std::conj(sn[i]) * H[i][k] + std::conj(cs[i]) * H[i + 1][k];
      H[i][k] = t;
    }
    // new rotation annihilating H[k+1][k]
    {
      cdouble a = H[k][k];
      double bb = hk1;
      double denom = std::sqrt(std::norm(a) + bb * bb);
      if (denom == 0) {
        cs[k] = 1;
        sn[k] = 0;
      } else {
        cs[k] = std::abs(a) / denom;
        cdouble phase = a == cdouble{0, 0} ? cdouble{1, 0} : a / std::abs(a);
        sn[k] = phase * bb / denom;
        H[k][k] = phase * denom;
        H[k + 1][k] = 0;
      }
      beta_vec[k + 1] = -std::conj(sn[k]) * beta_vec[k];
      beta_vec[k] = cs[k] * beta_vec[k];
    }
    k_done = k + 1;
    double rel = std::abs(beta_vec[k + 1]) / bnorm;
    res.residual_history.push_back(rel);
    if (rel < tol) break;
    if (hk1 == 0.0) break;
    for (auto& z : wvec) z /= hk1;
    V.push_back(wvec);
  }

  // back substitution H y = beta_vec
  std::vector<cdouble> y(k_done, {0, 0});
  for (int i = k_done - 1; i >= 0; --i) {
    cdouble s = beta_vec[i];
    for (int t = i + 1; t < k_done; ++t) s -= H[i][t] * y[t];
    y[i] = s / H[i][i];
  }
  std::vector<cdouble> xf(D, {0, 0});
  for (int i = 0; i < k_done; ++i)
    for (size_t t = 0; t < D; ++t) xf[t] += y[i] * V[i][t];
  for (size_t t = 0; t < D; ++t) xf[t] *= prec[t];

  from_flat(xf, res.x);
  // true residual
  ChaosVector ax = apply_one_minus_L2(res.x, c2);
  ax -= rhs;
  res.rel_residual = norms(ax).l2 / bnorm;
  res.iterations = k_done;
  res.converged = res.rel_residual <= tol * 10;
  return res;
}

ChaosVector wick_product(const ChaosVector& f, int n1, const ChaosVector& g_in, int n2) {
  // output levels beyond n_max are dropped (chaos truncation)
  const FockGrid& g = *f.grid;
  ChaosVector out(g);
  const int M = g.n_modes();
  const double dp2 = g.dp() * g.dp();

  for (int k = 0; k <= std::min(n1, n2); ++k) {
    const int N = n1 + n2 - 2 * k;
    if (N > g.n_max()) continue;
    const double comb =
        factorial(k) * (factorial(n1) / (factorial(k) * factorial(n1 - k))) *
        (factorial(n2) / (factorial(k) * factorial(n2 - k)));
    const int c1 = n1 - k;
    // splits of the output tuple: choose positions for f's surviving slots
    double nsplit = factorial(N) / (factorial(c1) * factorial(N - c1));
    std::vector<int> fp(c1), gp(N - c1);
    std::vector<int> fids(n1), gids(n2);
    for_each_tuple(g, N, [&](const int* ids, size_t r) {
      cdouble sym{0, 0};
      for_each_subset(N, c1, [&](const std::vector<int>& idx) {
        int fi = 0, ci = 0, gi = 0;
        for (int t = 0; t < N; ++t) {
          if (ci < c1 && idx[ci] == t) {
            fp[fi++] = ids[t];
            ++ci;
          } else {
            gp[gi++] = ids[t];
          }
        }
        // contract k internal momenta
        cdouble inner{0, 0};
        if (k == 0) {
          std::copy(fp.begin(), fp.end(), fids.begin());
          std::copy(gp.begin(), gp.end(), gids.begin());
          inner = f.levels[n1][g.rank(fids.data(), n1)] *
                  g_in.levels[n2][g.rank(gids.data(), n2)];
        } else {
          std::vector<int> rs(k, 0);
          for (;;) {
            double wgt = 1.0;
            for (int t = 0; t < k; ++t) wgt *= g.theta(rs[t]) * dp2;
            std::vector<int> fr(rs);
            std::sort(fr.begin(), fr.end());
            std::merge(fp.begin(), fp.end(), fr.begin(), fr.end(), fids.begin());
            std::vector<int> gr(k);
            for (int t = 0; t < k; ++t) gr[t] = g.neg_id(rs[t]);
            std::sort(gr.begin(), gr.end());
            std::merge(gp.begin(), gp.end(), gr.begin(), gr.end(), gids.begin());
            inner += wgt * f.levels[n1][g.rank(fids.data(), n1)] *
                     g_in.levels[n2][g.rank(gids.data(), n2)];
            int i = k - 1;
            while (i >= 0 && rs[i] == M - 1) {
              rs[i] = 0;
              --i;
            }
            if (i < 0) break;
            ++rs[i];
          }
        }
        sym += inner;
      });
      out.levels[N][r] += comb * sym / nsplit;
    });
  }
  return out;
}

ChaosVector random_vector(const FockGrid& g, const std::vector<int>& fill_levels,
                          uint64_t seed, std::optional<double> chi) {
  ChaosVector v(g);
  GaussianStream gs(seed);
  for (int n : fill_levels) {
    if (n < 0 || n > g.n_max()) throw std::invalid_argument("random_vector: bad level");
    for_each_tuple(g, n, [&](const int* ids, size_t r) {
      cdouble z(gs.normal() * M_SQRT1_2, gs.normal() * M_SQRT1_2);
      if (chi && g.r_norm_sq_tuple(ids, n) > *chi * g.tau()) z = {0, 0};
      v.levels[n][r] = z;
    });
  }
  if (chi) v.chi_tag = chi;
  return v;
}

}  // namespace sbe::fock
