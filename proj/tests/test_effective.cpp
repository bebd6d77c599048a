#include <doctest.h>

#include <cmath>

#include "sbe/effective.hpp"
#include "sbe/fock.hpp"
#include "sbe/mollifier.hpp"
#include "sbe/simulator.hpp"

using namespace sbe;
using namespace sbe::eff;

TEST_CASE("d_eff closed form, homogeneity, and the c2 = 0 rejection") {
  auto D = d_eff(1.0);
  CHECK(D[0][0] == doctest::Approx(0.484862).epsilon(1e-5));  // 3^{2/3}/(2 pi^{2/3})
  CHECK(D[1][1] == 1.0);
  CHECK(D[0][1] == 0.0);

  // |c2|^{4/3} homogeneity and sign invariance
  CHECK(d_eff(2.0)[0][0] == doctest::Approx(std::pow(2.0, 4.0 / 3.0) * D[0][0]));
  CHECK(d_eff(-1.0)[0][0] == doctest::Approx(D[0][0]));
  CHECK_THROWS_AS(d_eff(0.0), std::invalid_argument);

  // monotone in |c2| (sampled)
  double prev = 0.0;
  for (double c2 = 0.25; c2 <= 4.0; c2 *= 2.0) {
    double v = d_eff(c2)[0][0];
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("she_covariance: stationary marginal, conserved zero mode, decay") {
  auto m = effective_model(1.0);
  CHECK(she_covariance(0.0, 0.3, -2.0, m) == 1.0);
  CHECK(she_covariance(5.0, 0.0, 0.0, m) == 1.0);
  double lam = m.rate(1.0, 2.0);
  CHECK(she_covariance(1.0 / lam, 1.0, 2.0, m) == doctest::Approx(std::exp(-1.0)));
  double prev = 1.0;
  for (double t = 0.1; t < 3.0; t += 0.3) {
    double v = she_covariance(t, 0.7, 0.1, m);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK_THROWS_AS(she_covariance(-1.0, 1.0, 1.0, m), std::invalid_argument);
}

TEST_CASE("effective generator agrees with the fock diagonal on level 1") {
  static noise::Mollifier mol = noise::build_mollifier();
  fock::FockGrid g(3, 0.5, 2, 100.0, mol);
  auto m = effective_model(0.7);
  auto kern = fock::kernel_effective(g, m.d11);
  for (int id = 0; id < g.n_modes(); ++id) {
    double want = -m.rate(g.p1(id), g.p2(id));
    CHECK(std::abs(kern(1, &id, 1) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("compare_fdd: self-comparison is exact, F = 0 matches the OU rates") {
  sim::SimConfig cfg;
  cfg.grid.L = 2.0 * M_PI * 2;
  cfg.grid.N = 32;
  cfg.tau = 4.0;
  cfg.ensemble = 192;
  cfg.horizon = 2.5;
  cfg.n_records = 6;
  cfg.track_modes = {{1, 0}, {0, 1}, {1, 1}};
  cfg.seed = 31337;
  auto es = sim::run_stationary(cfg);

  auto sc = ScaleParams::at(cfg.tau);
  auto rep = compare_fdd(es, es.rows, cfg.grid.dp(), [&](double p1, double p2) {
    return 0.5 * sc.r_norm_sq(p1, p2);
  });
  CHECK(rep.n_rows > 0);
  CHECK(rep.max_abs_z <= 3.0);

  // identical inputs, rate from the measured decay itself: z at t = 0 is 0
  for (const auto& row : rep.rows)
    if (row.t == 0.0) CHECK(row.z == 0.0);
}
