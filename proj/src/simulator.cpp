#include "sbe/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace sbe::sim {

namespace {

double phi1(double z) {
  if (z < 1e-8) return 1.0 - 0.5 * z;
  return (1.0 - std::exp(-z)) / z;
}

const noise::Mollifier& shared_mollifier() {
  static noise::Mollifier m = noise::build_mollifier();
  return m;
}

}  // namespace

void SimConfig::validate() const {
  grid.validate();
  if (!(tau >= 1.0)) throw std::invalid_argument("SimConfig: tau must be >= 1");
  if (ensemble < 1) throw std::invalid_argument("SimConfig: ensemble must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("SimConfig: horizon must be > 0");
  if (n_records < 2) throw std::invalid_argument("SimConfig: need at least 2 records");
  if (F && !F->smooth())
    throw std::invalid_argument("SimConfig: abs nonlinearity violates the smoothness assumption");
  if (microscopic && tau != 1.0)
    throw std::invalid_argument("SimConfig: microscopic mode is the tau = 1 equation");
}

StepTables make_step_tables(const SimConfig& cfg, const noise::Mollifier& mol) {
  cfg.validate();
  StepTables t;
  t.grid = cfg.grid;
  t.sc = ScaleParams::at(cfg.tau);
  t.microscopic = cfg.microscopic;
  t.has_F = cfg.F.has_value() && cfg.coupling != 0.0;
  if (cfg.F) t.F = *cfg.F;
  t.coupling = t.has_F ? cfg.coupling : 0.0;
  t.kk = cfg.grid.k_keep();
  t.a_arg = t.microscopic ? 1.0 : t.sc.a_arg;

  const int n = cfg.grid.N;
  const int nxs = n / 2 + 1;
  const double dp = cfg.grid.dp();
  const double l2 = cfg.grid.L * cfg.grid.L;

  // the transport removal constant c1(coupling * F)
  t.c1_eff = 0.0;
  if (t.has_F && !t.microscopic) {
    auto table = hermite::hermite_coeffs(t.F, 2, 96);
    t.c1_eff = t.coupling * table.c1;
  }

  double lambda_max = 0.0;
  std::vector<double> lam(static_cast<size_t>(n) * nxs, 0.0);
  t.active.assign(static_cast<size_t>(n) * nxs, 0);
  for (int iy = 0; iy < n; ++iy) {
    int ky = iy <= n / 2 ? iy : iy - n;
    for (int ix = 0; ix < nxs; ++ix) {
      size_t id = static_cast<size_t>(iy) * nxs + ix;
      bool act = std::max(std::abs(ix), std::abs(ky)) <= t.kk;
      t.active[id] = act ? 1 : 0;
      if (!act) continue;
      double p1 = dp * ix, p2 = dp * ky;
      lam[id] = 0.5 * t.sc.r_norm_sq(p1, p2);
      lambda_max = std::max(lambda_max, lam[id]);
    }
  }

  t.dt = cfg.grid.dt > 0.0 ? cfg.grid.dt : (lambda_max > 0 ? 0.5 / lambda_max : 0.1);
  if (lambda_max * t.dt > 20.0)
    throw std::invalid_argument("step: dt too large, need dt * lambda_max <= 20");

  t.lambda = lam;
  t.decay.assign(lam.size(), 0.0);
  t.phi1dt.assign(lam.size(), 0.0);
  t.noise_var.assign(lam.size(), 0.0);
  t.conv_mult.assign(lam.size(), {0, 0});
  t.lin_mult.assign(lam.size(), {0, 0});
  const double a_pre = t.microscopic ? 1.0 : t.sc.a_pre;
  const double a_lin = t.microscopic ? 0.0 : t.sc.a_lin;
  for (int iy = 0; iy < n; ++iy) {
    int ky = iy <= n / 2 ? iy : iy - n;
    for (int ix = 0; ix < nxs; ++ix) {
      size_t id = static_cast<size_t>(iy) * nxs + ix;
      if (!t.active[id]) continue;
      double p1 = dp * ix, p2 = dp * ky;
      double theta = noise::theta_tau(p1, p2, t.sc, mol);
      double z = lam[id] * t.dt;
      t.decay[id] = std::exp(-z);
      t.phi1dt[id] = t.dt * phi1(z);
      t.noise_var[id] =
          lam[id] > 0 ? cfg.noise_scale * cfg.noise_scale * theta *
                            (1.0 - std::exp(-2.0 * z)) / l2
                      : 0.0;
      t.conv_mult[id] = std::complex<double>(0.0, a_pre * p1 * theta);
      t.lin_mult[id] = std::complex<double>(0.0, -t.c1_eff * a_lin * p1);
    }
  }
  return t;
}

Workspace::Workspace(const GridSpec& grid)
    : N(grid.N),
      fft_n(grid.N),
      fft_2n(2 * grid.N),
      pad_hat(2 * grid.N, grid.L),
      g_pad_hat(2 * grid.N, grid.L),
      nl_hat(grid.N, grid.L),
      real_pad(static_cast<size_t>(2 * grid.N) * (2 * grid.N), 0.0) {}

void nonlinearity(const SpectralField& u_hat, const StepTables& t, Workspace& ws,
                  SpectralField& out) {
  const int n = t.grid.N;
  if (out.N != n) out = SpectralField(n, t.grid.L);

  if (!t.has_F) {
    for (auto& z : out.c) z = {0.0, 0.0};
    return;
  }

  zero_pad_spectrum(u_hat, ws.pad_hat);
  ws.fft_2n.backward(ws.pad_hat.c.data(), ws.real_pad.data());
  const double a = t.a_arg, cpl = t.coupling;
  for (auto& v : ws.real_pad) v = cpl * t.F.eval(a * v);
  ws.fft_2n.forward(ws.real_pad.data(), ws.g_pad_hat.c.data());
  truncate_spectrum(ws.g_pad_hat, out);

  for (size_t id = 0; id < out.c.size(); ++id) {
    if (!t.active[id]) {
      out.c[id] = {0.0, 0.0};
      continue;
    }
    out.c[id] = t.conv_mult[id] * out.c[id] + t.lin_mult[id] * u_hat.c[id];
  }
}

void step(SpectralField& u_hat, double& time, const StepTables& t, Workspace& ws,
          GaussianStream& g) {
  const int n = t.grid.N;
  const int nxs = n / 2 + 1;
  const int kk = t.kk;

  if (t.has_F) {
    nonlinearity(u_hat, t, ws, ws.nl_hat);
  }

  // deterministic drift + decay
  bool bad = false;
  for (size_t id = 0; id < u_hat.c.size(); ++id) {
    if (!t.active[id]) {
      u_hat.c[id] = {0.0, 0.0};
      continue;
    }
    std::complex<double> v = t.decay[id] * u_hat.c[id];
    if (t.has_F) v += t.phi1dt[id] * ws.nl_hat.c[id];
    u_hat.c[id] = v;
  }

  // exact OU noise increment, fixed draw order (same enumeration as the
  // stationary sampler)
  auto draw = [&](double var) {
    double s = std::sqrt(0.5 * var);
    double re = s * g.normal();
    double im = s * g.normal();
    return std::complex<double>(re, im);
  };
  for (int ky = 1; ky <= kk; ++ky) {
    size_t id = static_cast<size_t>(ky) * nxs;
    double var = t.noise_var[id];
    if (var > 0) {
      auto z = draw(var);
      u_hat.c[id] += z;
      u_hat.c[static_cast<size_t>(n - ky) * nxs] += std::conj(z);
    } else {
      g.normal();
      g.normal();
    }
  }
  for (int kx = 1; kx <= kk; ++kx) {
    for (int ky = -kk; ky <= kk; ++ky) {
      int iy = ky >= 0 ? ky : ky + n;
      size_t id = static_cast<size_t>(iy) * nxs + kx;
      double var = t.noise_var[id];
      if (var > 0)
        u_hat.c[id] += draw(var);
      else {
        g.normal();
        g.normal();
      }
    }
  }

  for (size_t id = 0; id < u_hat.c.size(); ++id) {
    double re = u_hat.c[id].real(), im = u_hat.c[id].imag();
    if (!std::isfinite(re) || !std::isfinite(im)) {
      bad = true;
      break;
    }
  }
  if (bad) throw std::runtime_error("step: state blew up (NaN/Inf) at t = " + std::to_string(time));
  time += t.dt;
}

namespace {

// Evolve one ensemble member, recording tracked-mode snapshots and the
// spatial variance (Parseval) at each record time.
struct MemberRecord {
  std::vector<std::vector<std::complex<double>>> snaps;  // [time][mode]
  std::vector<double> point_var;                         // [time]
};

double parseval_point_var(const SpectralField& u, int kk) {
  const int n = u.N;
  const int nxs = n / 2 + 1;
  double acc = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    int ky = iy <= n / 2 ? iy : iy - n;
    if (std::abs(ky) > kk) continue;
    for (int ix = 0; ix <= kk; ++ix) {
      double a = std::norm(u.at(ix, iy));
      acc += ix == 0 ? a : 2.0 * a;
    }
  }
  return acc;
}

std::complex<double> mode_value(const SpectralField& u, int kx, int ky) {
  const int n = u.N;
  if (kx >= 0) {
    int iy = ky >= 0 ? ky : ky + n;
    return u.at(kx, iy);
  }
  int iy = -ky >= 0 ? -ky : -ky + n;
  return std::conj(u.at(-kx, iy));
}

MemberRecord run_member(const SimConfig& cfg, const StepTables& t, Workspace& ws,
                        const noise::Mollifier& mol, int member,
                        RealField* final_field = nullptr) {
  SpectralField u = noise::sample_mollified_noise_spectral(
      cfg.grid, t.sc, mol, derive_seed(cfg.seed, 2 * static_cast<uint64_t>(member)));
  GaussianStream g(derive_seed(cfg.seed, 2 * static_cast<uint64_t>(member) + 1));

  const double rec_dt = cfg.horizon / (cfg.n_records - 1);
  MemberRecord rec;
  rec.snaps.reserve(cfg.n_records);
  double time = 0.0;
  double next_rec = 0.0;
  for (int r = 0; r < cfg.n_records; ++r) {
    while (time < next_rec - 1e-12) step(u, time, t, ws, g);
    std::vector<std::complex<double>> snap(cfg.track_modes.size());
    for (size_t i = 0; i < cfg.track_modes.size(); ++i)
      snap[i] = mode_value(u, cfg.track_modes[i][0], cfg.track_modes[i][1]);
    rec.snaps.push_back(std::move(snap));
    rec.point_var.push_back(parseval_point_var(u, t.kk));
    next_rec += rec_dt;
  }
  if (final_field) {
    *final_field = RealField(cfg.grid.N, cfg.grid.L);
    ws.fft_n.backward(u.c.data(), final_field->v.data());
  }
  return rec;
}

// Fixed-thread-pool map over members; results land in member order.
template <typename Fn>
void parallel_members(int ensemble, int threads, const GridSpec& grid, Fn&& fn) {
  threads = std::max(1, std::min(threads, ensemble));
  if (threads == 1) {
    Workspace ws(grid);
    for (int m = 0; m < ensemble; ++m) fn(m, ws);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      Workspace ws(grid);
      for (;;) {
        int m = next.fetch_add(1);
        if (m >= ensemble) break;
        fn(m, ws);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

stats::EnsembleStats run_stationary(const SimConfig& cfg, RealField* final_field) {
  cfg.validate();
  const auto& mol = shared_mollifier();
  StepTables tables = make_step_tables(cfg, mol);

  stats::EnsembleStats es;
  es.ensemble = cfg.ensemble;
  es.seed = cfg.seed;
  es.tau = cfg.tau;
  es.L = cfg.grid.L;
  es.N = cfg.grid.N;
  es.modes = cfg.track_modes;
  const double rec_dt = cfg.horizon / (cfg.n_records - 1);
  for (int r = 0; r < cfg.n_records; ++r) es.times.push_back(r * rec_dt);

  std::vector<MemberRecord> recs(cfg.ensemble);
  parallel_members(cfg.ensemble, cfg.threads, cfg.grid, [&](int m, Workspace& ws) {
    recs[m] = run_member(cfg, tables, ws, mol, m, m == 0 ? final_field : nullptr);
  });

  es.snaps.resize(cfg.ensemble);
  for (int m = 0; m < cfg.ensemble; ++m) es.snaps[m] = std::move(recs[m].snaps);

  // derived tables
  const int M = cfg.ensemble, R = cfg.n_records;
  const int nmodes = static_cast<int>(cfg.track_modes.size());
  // per-mode variance at each record time
  for (int j = 0; j < nmodes; ++j) {
    for (int r = 0; r < R; ++r) {
      std::vector<double> vals(M);
      for (int m = 0; m < M; ++m) vals[m] = std::norm(es.snaps[m][r][j]);
      double v = stats::mean(vals);
      double se = M > 1 ? std::sqrt(stats::variance(vals) / M) : 0.0;
      es.rows.push_back({"var_mode", cfg.track_modes[j][0], cfg.track_modes[j][1],
                         es.times[r], v, M > 1 ? se : -1.0});
    }
  }
  // two-point function C(lag, p): member average over all origins
  for (int j = 0; j < nmodes; ++j) {
    for (int lag = 0; lag < R; ++lag) {
      std::vector<double> vals(M);
      for (int m = 0; m < M; ++m) {
        double acc = 0.0;
        int cnt = 0;
        for (int s = 0; s + lag < R; ++s) {
          acc += (es.snaps[m][s + lag][j] * std::conj(es.snaps[m][s][j])).real();
          ++cnt;
        }
        vals[m] = cnt ? acc / cnt : 0.0;
      }
      double v = stats::mean(vals);
      double se;
      if (M >= 8)
        se = stats::bootstrap_mean(vals, 400, derive_seed(cfg.seed, 7000 + j * 1000 + lag)).se;
      else
        se = M > 1 ? std::sqrt(stats::variance(vals) / M) : -1.0;
      es.rows.push_back({"corr", cfg.track_modes[j][0], cfg.track_modes[j][1],
                         es.times[lag], v, se});
    }
  }
  // one-point variance (spatial Parseval average)
  for (int r = 0; r < R; ++r) {
    std::vector<double> vals(M);
    for (int m = 0; m < M; ++m) vals[m] = recs[m].point_var[r];
    double v = stats::mean(vals);
    double se = M > 1 ? std::sqrt(stats::variance(vals) / M) : -1.0;
    es.rows.push_back({"point_var", 0, 0, es.times[r], v, se});
  }
  // Gaussianity of the first tracked mode, pooled over members at final time
  if (nmodes > 0 && M >= 64) {
    std::vector<double> vals(M);
    for (int m = 0; m < M; ++m) vals[m] = es.snaps[m][R - 1][0].real();
    auto e = stats::gaussianity(vals, 400, derive_seed(cfg.seed, 99));
    es.rows.push_back({"excess_kurtosis", cfg.track_modes[0][0], cfg.track_modes[0][1],
                       es.times[R - 1], e.value, e.se});
  }
  return es;
}

SkewReport skew_reversibility_check(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.track_modes.size() < 2)
    throw std::invalid_argument("skew_reversibility_check: need two tracked modes (phi, psi)");

  auto run_pairs = [&](double sign) {
    SimConfig c = cfg;
    c.coupling *= sign;
    c.n_records = 2;  // u_0 and u_T
    c.seed = derive_seed(cfg.seed, sign > 0 ? 11 : 22);
    return run_stationary(c);
  };
  auto fwd = run_pairs(+1.0);
  auto rev = run_pairs(-1.0);

  // real pairings of the two test modes at the two times
  auto X = [&](const stats::EnsembleStats& es, int m, int r, int j) {
    return es.snaps[m][r][j].real();
  };
  struct GH {
    const char* name;
    double (*g)(double);
    double (*h)(double);
  };
  static const GH pairs[] = {
      {"lin_lin", [](double x) { return x; }, [](double x) { return x; }},
      {"lin_sq", [](double x) { return x; }, [](double x) { return x * x; }},
      {"sq_lin", [](double x) { return x * x; }, [](double x) { return x; }},
      {"sq_sq", [](double x) { return x * x; }, [](double x) { return x * x; }},
      {"cub_lin", [](double x) { return x * x * x; }, [](double x) { return x; }},
  };

  SkewReport rep;
  const int M = cfg.ensemble;

  // momentum-conserving triad statistic: Im[ u_hat_T(phi) conj(u_hat_0(psi))^2 ]
  // with phi at 2 psi; the d1-vertex makes the three-point transfer purely
  // imaginary at leading order, so Im carries the c2-odd signal
  {
    auto Z = [&](const stats::EnsembleStats& es, int m, int r, int j) {
      return es.snaps[m][r][j];
    };
    std::vector<double> a(M), b(M), d(M);
    for (int m = 0; m < M; ++m) {
      a[m] = (Z(fwd, m, 1, 0) * std::conj(Z(fwd, m, 0, 1) * Z(fwd, m, 0, 1))).imag();
      b[m] = (Z(rev, m, 0, 0) * std::conj(Z(rev, m, 1, 1) * Z(rev, m, 1, 1))).imag();
      d[m] = a[m] - (Z(fwd, m, 0, 0) * std::conj(Z(fwd, m, 1, 1) * Z(fwd, m, 1, 1))).imag();
    }
    double ma = stats::mean(a), mb = stats::mean(b);
    double sea = std::sqrt(stats::variance(a) / M), seb = std::sqrt(stats::variance(b) / M);
    double se = std::sqrt(sea * sea + seb * seb);
    rep.stats.push_back({"triad", ma, mb, se, se > 0 ? (ma - mb) / se : 0.0});
    double md = stats::mean(d);
    double sed = std::sqrt(stats::variance(d) / M);
    rep.negative_control.push_back({"triad", ma, ma - md, sed, sed > 0 ? md / sed : 0.0});
  }

  for (const auto& gh : pairs) {
    std::vector<double> a(M), b(M), d(M);
    for (int m = 0; m < M; ++m) {
      // forward with F: g(u_T(phi)) h(u_0(psi))
      a[m] = gh.g(X(fwd, m, 1, 0)) * gh.h(X(fwd, m, 0, 1));
      // reversed with -F: g(u_0(phi)) h(u_T(psi))
      b[m] = gh.g(X(rev, m, 0, 0)) * gh.h(X(rev, m, 1, 1));
      // wrong-sign reversal (same +F ensemble, reversed pairing)
      d[m] = a[m] - gh.g(X(fwd, m, 0, 0)) * gh.h(X(fwd, m, 1, 1));
    }
    double ma = stats::mean(a), mb = stats::mean(b);
    double sea = std::sqrt(stats::variance(a) / M), seb = std::sqrt(stats::variance(b) / M);
    double se = std::sqrt(sea * sea + seb * seb);
    rep.stats.push_back({gh.name, ma, mb, se, se > 0 ? (ma - mb) / se : 0.0});
    double md = stats::mean(d);
    double sed = std::sqrt(stats::variance(d) / M);
    rep.negative_control.push_back(
        {gh.name, ma, ma - md, sed, sed > 0 ? md / sed : 0.0});
  }
  return rep;
}

DriftReport galilean_drift(const SimConfig& cfg, double eps) {
  SimConfig c = cfg;
  c.microscopic = true;
  c.tau = 1.0;
  c.coupling = eps;
  c.validate();
  if (!c.F) throw std::invalid_argument("galilean_drift: needs a nonlinearity");

  const auto& mol = shared_mollifier();
  StepTables tables = make_step_tables(c, mol);
  auto ftab = hermite::hermite_coeffs(*c.F, 2, 96);
  const double c1 = ftab.c1;

  const int n = c.grid.N;
  const int nxs = n / 2 + 1;
  const int kk = tables.kk;
  const int R = c.n_records;
  const double rec_dt = c.horizon / (R - 1);

  // per member: e1-collapsed cross spectrum q(kx; t) = sum_ky u_t conj(u_0)
  const int nkx = 2 * kk + 1;
  std::vector<std::vector<std::complex<double>>> q(
      c.ensemble, std::vector<std::complex<double>>(static_cast<size_t>(R) * nkx, {0, 0}));

  parallel_members(c.ensemble, c.threads, c.grid, [&](int m, Workspace& ws) {
    SpectralField u = noise::sample_mollified_noise_spectral(
        c.grid, tables.sc, mol, derive_seed(c.seed, 2 * static_cast<uint64_t>(m)));
    GaussianStream g(derive_seed(c.seed, 2 * static_cast<uint64_t>(m) + 1));
    SpectralField u0 = u;
    double time = 0.0;
    double next_rec = 0.0;
    for (int r = 0; r < R; ++r) {
      while (time < next_rec - 1e-12) step(u, time, tables, ws, g);
      for (int kx = -kk; kx <= kk; ++kx) {
        std::complex<double> acc{0, 0};
        for (int ky = -kk; ky <= kk; ++ky) {
          std::complex<double> ut, u0v;
          if (kx >= 0) {
            int iy = ky >= 0 ? ky : ky + n;
            ut = u.c[static_cast<size_t>(iy) * nxs + kx];
            u0v = u0.c[static_cast<size_t>(iy) * nxs + kx];
          } else {
            int iy = -ky >= 0 ? -ky : -ky + n;
            ut = std::conj(u.c[static_cast<size_t>(iy) * nxs - kx]);
            u0v = std::conj(u0.c[static_cast<size_t>(iy) * nxs - kx]);
          }
          acc += ut * std::conj(u0v);
        }
        q[m][static_cast<size_t>(r) * nkx + (kx + kk)] = acc;
      }
      next_rec += rec_dt;
    }
  });

  // peak of C(t, x1 e1) per record over the member-averaged cross section
  const double dp = c.grid.dp();
  auto peak_of = [&](const std::vector<std::complex<double>>& qbar, int r) -> std::array<double, 2> {
    const int nx1 = 4 * n;  // refined x1 grid for the cut
    double best = -1e300, bx = 0;
    int bi = 0;
    std::vector<double> cvals(nx1);
    for (int i = 0; i < nx1; ++i) {
      double x1 = (i - nx1 / 2) * (c.grid.L / nx1);
      double acc = 0.0;
      for (int kx = -kk; kx <= kk; ++kx) {
        auto z = qbar[static_cast<size_t>(r) * nkx + (kx + kk)];
        acc += (z * std::exp(std::complex<double>(0, dp * kx * x1))).real();
      }
      cvals[i] = acc;
      if (acc > best) {
        best = acc;
        bx = x1;
        bi = i;
      }
    }
    // parabolic refinement
    double xm = bx;
    if (bi > 0 && bi + 1 < nx1) {
      double y0 = cvals[bi - 1], y1 = cvals[bi], y2 = cvals[bi + 1];
      double den = y0 - 2 * y1 + y2;
      if (std::abs(den) > 1e-300) xm = bx - 0.5 * (y2 - y0) / den * (c.grid.L / nx1);
    }
    return {xm, best};
  };

  auto velocity_from = [&](const std::vector<int>& members) -> std::pair<double, bool> {
    std::vector<std::complex<double>> qbar(static_cast<size_t>(R) * nkx, {0, 0});
    for (int m : members)
      for (size_t i = 0; i < qbar.size(); ++i) qbar[i] += q[m][i];
    for (auto& z : qbar) z /= static_cast<double>(members.size());
    auto p0 = peak_of(qbar, 0);
    double sx = 0, sxx = 0;
    bool usable = false;
    int used = 0;
    for (int r = 1; r < R; ++r) {
      auto pr = peak_of(qbar, r);
      if (pr[1] < 0.2 * p0[1]) break;
      double tr = r * rec_dt;
      sx += pr[0] * tr;
      sxx += tr * tr;
      ++used;
    }
    if (used >= 3 && sxx > 0) usable = true;
    return {usable ? sx / sxx : 0.0, usable};
  };

  std::vector<int> all(c.ensemble);
  for (int m = 0; m < c.ensemble; ++m) all[m] = m;
  auto [v, ok] = velocity_from(all);

  DriftReport rep;
  rep.expected = -eps * c1;
  rep.resolvable = ok;
  rep.velocity = v;
  if (!ok) return rep;

  // bootstrap over members
  GaussianStream g(derive_seed(c.seed, 4242));
  const int B = 200;
  std::vector<double> vb;
  vb.reserve(B);
  std::vector<int> pick(c.ensemble);
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < c.ensemble; ++i)
      pick[i] = static_cast<int>(g.raw() % static_cast<uint64_t>(c.ensemble));
    auto [vv, okb] = velocity_from(pick);
    if (okb) vb.push_back(vv);
  }
  if (vb.size() >= 50) {
    std::sort(vb.begin(), vb.end());
    double m = stats::mean(vb);
    double s = 0;
    for (double x : vb) s += (x - m) * (x - m);
    rep.se = std::sqrt(s / (vb.size() - 1));
    rep.lo = vb[static_cast<size_t>(0.025 * (vb.size() - 1))];
    rep.hi = vb[static_cast<size_t>(0.975 * (vb.size() - 1))];
  }
  return rep;
}

}  // namespace sbe::sim
