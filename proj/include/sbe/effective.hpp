#pragma once

#include <array>
#include <string>
#include <vector>

#include "sbe/stats.hpp"

namespace sbe::eff {

// The limiting anisotropic stochastic heat equation: closed-form Gaussian
// statistics only, never time-stepped.
struct EffectiveModel {
  double d11 = 0.0;  // first diagonal entry of D_eff

  // stationary per-mode relaxation rate (D11 p1^2 + p2^2) / 2
  double rate(double p1, double p2) const { return 0.5 * (d11 * p1 * p1 + p2 * p2); }
};

// D_eff = diag(3^{2/3}/(2 pi^{2/3}) |c2|^{4/3}, 1); rejects c2 = 0, under
// which the superdiffusive limit theorem does not apply.
std::array<std::array<double, 2>, 2> d_eff(double c2);

EffectiveModel effective_model(double c2);

// Stationary normalized space-time covariance per mode: exp(-rate * t).
double she_covariance(double t, double p1, double p2, const EffectiveModel& model);

struct CompareRow {
  int kx = 0, ky = 0;
  double t = 0.0;
  double measured = 0.0;
  double se = 0.0;
  double predicted = 0.0;
  double z = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double max_abs_z = 0.0;
  int n_rows = 0;
  bool qualitative = true;  // desk-scale comparison, documented as such
};

// Covariance-level comparison of simulator output against a per-mode
// Gaussian OU prediction with rates rate_fn(p1, p2).  For F = 0 input use
// rates (nu p1^2 + p2^2)/2 rather than the D_eff limit.
CompareReport compare_fdd(const stats::EnsembleStats& sim,
                          const std::vector<stats::StatRow>& corr_rows, double dp,
                          const std::function<double(double, double)>& rate_fn);

}  // namespace sbe::eff
