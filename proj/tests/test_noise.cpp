#include <doctest.h>

#include <cmath>
#include <complex>

#include "sbe/fft.hpp"
#include "sbe/mollifier.hpp"
#include "sbe/noise.hpp"
#include "sbe/rng.hpp"
#include "sbe/stats.hpp"

using namespace sbe;
using namespace sbe::noise;

namespace {
const Mollifier& mol() {
  static Mollifier m = build_mollifier();
  return m;
}
}  // namespace

TEST_CASE("bump mollifier: unit mass, unit L2 norm, recorded radius") {
  const auto& m = mol();
  CHECK(std::abs(m.mass - 1.0) <= 1e-8);
  CHECK(std::abs(m.l2_norm - 1.0) <= 1e-8);
  // root of ||rho_a||_L2 = 1 for the bump family (high-precision oracle)
  CHECK(m.radius == doctest::Approx(0.736081140108).epsilon(1e-8));
  CHECK(m.profile(m.radius * 1.0001) == 0.0);
  CHECK(m.profile(0.0) > 0.0);
  CHECK_THROWS_AS(build_mollifier(-1.0), std::invalid_argument);
}

TEST_CASE("Theta_tau: normalization, range, limits, decay threshold") {
  const auto& m = mol();
  auto s1 = ScaleParams::at(1.0);
  CHECK(std::abs(theta_tau(0.0, 0.0, s1, m) - 1.0) <= 1e-8);

  // frozen high-precision values of (2 pi rho_hat)^2
  CHECK(m.theta1(1.0) == doctest::Approx(0.93136).epsilon(2e-4));
  CHECK(m.theta1(5.0) == doctest::Approx(0.130664).epsilon(2e-4));
  CHECK(m.theta1(10.0) == doctest::Approx(0.00400059).epsilon(2e-3));

  // Theta in [0, 1]: rho >= 0 with mass 1 forces |2 pi rho_hat| <= 1
  for (double s = 0.0; s <= 60.0; s += 0.37) {
    CHECK(m.theta1(s) >= 0.0);
    CHECK(m.theta1(s) <= 1.0 + 1e-8);
  }

  // tau -> infinity at fixed p drives the argument to 0
  auto sbig = ScaleParams::at(1e12);
  CHECK(theta_tau(3.0, -2.0, sbig, m) == doctest::Approx(1.0).epsilon(1e-6));

  // large |tau^{-1/2} sqrt(R) p| lands below 1e-6 (threshold read from the table)
  double thr = m.theta_threshold(1e-6);
  CHECK(thr > 0.0);
  CHECK(m.theta1(thr + 0.01) < 1e-6);
  auto s100 = ScaleParams::at(100.0);
  double plarge = 10.0 * (thr + 1.0);  // |sqrt(R) p| / sqrt(tau) beyond threshold
  CHECK(theta_tau(0.0, plarge, s100, m) < 1e-6);
}

TEST_CASE("ScaleParams: nu_tau floor and prefactors") {
  auto s1 = ScaleParams::at(1.0);
  CHECK(s1.nu == 1.0);
  auto se = ScaleParams::at(std::exp(1.0));
  CHECK(se.nu == doctest::Approx(1.0));
  auto s = ScaleParams::at(100.0);
  double expect = 1.0 / std::pow(std::log(100.0), 2.0 / 3.0);
  CHECK(s.nu == doctest::Approx(expect).epsilon(1e-14));
  CHECK(s.nu > 0.0);
  CHECK(s.nu <= 1.0);
  CHECK(s.a_pre == doctest::Approx(100.0 * std::pow(s.nu, 0.25)));
  CHECK(s.a_arg == doctest::Approx(std::pow(s.nu, 0.25) / 10.0));
  CHECK(s.a_lin == doctest::Approx(std::sqrt(100.0 * s.nu)));
  CHECK_THROWS_AS(ScaleParams::at(0.5), std::invalid_argument);
}

TEST_CASE("xi weights factorize with the lattice volume element") {
  const auto& m = mol();
  auto s = ScaleParams::at(10.0);
  double dp = 0.5;
  std::vector<std::array<double, 2>> one = {{0.0, 0.0}};
  CHECK(xi_weight(one, dp, s, m) == doctest::Approx(dp * dp).epsilon(1e-8));

  std::vector<std::array<double, 2>> p = {{1.0, -0.5}};
  std::vector<std::array<double, 2>> q = {{-2.0, 0.5}};
  std::vector<std::array<double, 2>> pq = {{1.0, -0.5}, {-2.0, 0.5}};
  CHECK(xi_weight(pq, dp, s, m) ==
        doctest::Approx(xi_weight(p, dp, s, m) * xi_weight(q, dp, s, m)).epsilon(1e-12));

  // tau = infinity convention: Theta == 1
  CHECK(xi_weight(pq, dp, s, m, true) == doctest::Approx(std::pow(dp, 4)).epsilon(1e-14));
}

TEST_CASE("mollified noise sampler: determinism and per-mode variance") {
  GridSpec grid;
  grid.L = 2.0 * M_PI * 8;
  grid.N = 64;
  grid.k_cut = 1.0;
  auto s = ScaleParams::at(1.0);

  auto f1 = sample_mollified_noise(grid, s, mol(), 42);
  auto f2 = sample_mollified_noise(grid, s, mol(), 42);
  auto f3 = sample_mollified_noise(grid, s, mol(), 43);
  CHECK(f1.v == f2.v);  // bit-identical
  bool same = true;
  for (size_t i = 0; i < f1.v.size(); ++i)
    if (f1.v[i] != f3.v[i]) same = false;
  CHECK_FALSE(same);

  // per-mode second moment: E|eta_p|^2 = Theta(p)/L^2, ensemble of 4096
  const int M = 4096;
  double dp = grid.dp();
  const double l2 = grid.L * grid.L;
  std::vector<std::array<int, 2>> probes = {{1, 0}, {0, 3}, {5, -2}, {11, 7}};
  std::vector<std::vector<double>> acc(probes.size());
  for (int r = 0; r < M; ++r) {
    auto sf = sample_mollified_noise_spectral(grid, s, mol(), derive_seed(1234, r));
    for (size_t j = 0; j < probes.size(); ++j) {
      int kx = probes[j][0], ky = probes[j][1];
      int iy = ky >= 0 ? ky : ky + grid.N;
      acc[j].push_back(std::norm(sf.at(kx, iy)));
    }
  }
  for (size_t j = 0; j < probes.size(); ++j) {
    double want = theta_tau(dp * probes[j][0], dp * probes[j][1], s, mol()) / l2;
    double got = stats::mean(acc[j]);
    double se = std::sqrt(stats::variance(acc[j]) / M);
    CHECK(std::abs(got - want) <= 3.0 * se);
  }
}

TEST_CASE("isometry: Cov(eta(phi), eta(psi)) matches the discrete Xi^1 pairing") {
  GridSpec grid;
  grid.L = 2.0 * M_PI * 4;
  grid.N = 32;
  grid.k_cut = 1.0;
  auto s = ScaleParams::at(2.0);
  const double dp = grid.dp();
  const double l2 = grid.L * grid.L;

  // test functions with compactly supported spectra: phi_hat on modes
  // {(1,0), (2,1)}, psi_hat on {(1,0), (0,2)} (Hermitian-symmetric)
  auto pair_field = [&](const SpectralField& sf, int kx, int ky) {
    int iy = ky >= 0 ? ky : ky + grid.N;
    return sf.at(kx, iy);
  };
  const int M = 4096;
  std::vector<double> prods;
  prods.reserve(M);
  for (int r = 0; r < M; ++r) {
    auto sf = sample_mollified_noise_spectral(grid, s, mol(), derive_seed(777, r));
    // eta(phi) = L^2 sum_p eta_p phi_{-p} with phi real
    double ephi = l2 * 2.0 * (pair_field(sf, 1, 0) + pair_field(sf, 2, 1)).real() / 2.0;
    double epsi = l2 * 2.0 * (pair_field(sf, 1, 0) + pair_field(sf, 0, 2)).real() / 2.0;
    prods.push_back(ephi * epsi);
  }
  // Cov = L^2 sum_p phi_p psi_p Theta(p): overlap only at (1,0) and (-1,0),
  // coefficients 1/2 each from the real cosine normalization
  double want = l2 * 2.0 * 0.25 * theta_tau(dp, 0.0, s, mol());
  double got = stats::mean(prods);
  double se = std::sqrt(stats::variance(prods) / M);
  CHECK(std::abs(got - want) <= 3.0 * se);
}

TEST_CASE("pointwise variance of the tau = 1 field is ||rho||_L2^2 = 1") {
  GridSpec grid;
  grid.L = 2.0 * M_PI * 8;
  grid.N = 128;
  grid.k_cut = 1.0;
  auto s = ScaleParams::at(1.0);
  const int M = 10000;
  // variance of u(x0) across the ensemble at a fixed grid point; use the
  // spectral Parseval identity per sample for the spatial average instead
  std::vector<double> var_samples;
  var_samples.reserve(M);
  for (int r = 0; r < M; ++r) {
    auto sf = sample_mollified_noise_spectral(grid, s, mol(), derive_seed(9001, r));
    double acc = 0.0;
    for (int iy = 0; iy < grid.N; ++iy)
      for (int ix = 0; ix <= grid.N / 2; ++ix) {
        double a = std::norm(sf.at(ix, iy));
        acc += ix == 0 ? a : 2.0 * a;
      }
    var_samples.push_back(acc);
  }
  double got = stats::mean(var_samples);
  double se = std::sqrt(stats::variance(var_samples) / M);
  // exact lattice prediction: sum over kept modes of Theta(p)/L^2; it is a
  // Riemann sum of ||rho||_L2^2 = 1, short only of the sub-percent tail
  // beyond the Nyquist square
  double lattice_sum = 0.0;
  for (int kx = -grid.N / 2 + 1; kx < grid.N / 2; ++kx)
    for (int ky = -grid.N / 2 + 1; ky < grid.N / 2; ++ky) {
      if (kx == 0 && ky == 0) continue;
      lattice_sum += theta_tau(grid.dp() * kx, grid.dp() * ky, s, mol());
    }
  lattice_sum /= grid.L * grid.L;
  CHECK(std::abs(got - lattice_sum) <= 3.0 * se);
  CHECK(lattice_sum == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("periodize tiles the fundamental cell") {
  RealField cell(8, 2.0);
  for (int iy = 0; iy < 8; ++iy)
    for (int ix = 0; ix < 8; ++ix) cell.at(ix, iy) = ix == 2 && iy == 3 ? 1.0 : 0.0;

  auto tiled = periodize(cell, 3);
  CHECK(tiled.N == 24);
  CHECK(tiled.L == doctest::Approx(6.0));
  // identity on the fundamental cell
  auto same = periodize(cell, 1);
  CHECK(same.v == cell.v);
  // single-cell bump becomes a lattice of bumps
  int bumps = 0;
  for (double v : tiled.v) bumps += v == 1.0 ? 1 : 0;
  CHECK(bumps == 9);
  // mass multiplies by the copy count
  double m_cell = 0, m_tiled = 0;
  for (double v : cell.v) m_cell += v;
  for (double v : tiled.v) m_tiled += v;
  CHECK(m_tiled == doctest::Approx(9.0 * m_cell));
}

TEST_CASE("field binary snapshots round-trip") {
  RealField f(16, 3.5);
  GaussianStream g(5);
  for (auto& v : f.v) v = g.normal();
  write_field("/tmp/sbe_field_test.bin", f, 7.0, 99);
  double tau = 0;
  uint64_t seed = 0;
  auto f2 = read_field("/tmp/sbe_field_test.bin", &tau, &seed);
  CHECK(f2.v == f.v);
  CHECK(f2.N == 16);
  CHECK(f2.L == doctest::Approx(3.5));
  CHECK(tau == doctest::Approx(7.0));
  CHECK(seed == 99);
}

TEST_CASE("rho even implies real transform: table is the radial Hankel form") {
  // evenness is structural (radial profile); the imaginary part of the
  // transform is identically zero by construction, so check the table
  // reproduces 2 pi rho_hat(0) = mass and oscillates through zero
  const auto& m = mol();
  CHECK(std::abs(m.rho_hat2pi(0.0) - 1.0) <= 1e-8);
  bool negative_somewhere = false;
  for (double s = 0; s < 40; s += 0.05)
    if (m.rho_hat2pi(s) < -1e-6) negative_somewhere = true;
  CHECK(negative_somewhere);
}
