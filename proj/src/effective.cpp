#include "sbe/effective.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace sbe::eff {

std::array<std::array<double, 2>, 2> d_eff(double c2) {
  if (c2 == 0.0)
    throw std::invalid_argument(
        "d_eff: c2(F) must be nonzero (hypothesis of the superdiffusive CLT)");
  double d11 = std::pow(3.0, 2.0 / 3.0) / (2.0 * std::pow(M_PI, 2.0 / 3.0)) *
               std::pow(std::abs(c2), 4.0 / 3.0);
  return {{{d11, 0.0}, {0.0, 1.0}}};
}

EffectiveModel effective_model(double c2) {
  EffectiveModel m;
  m.d11 = d_eff(c2)[0][0];
  return m;
}

double she_covariance(double t, double p1, double p2, const EffectiveModel& model) {
  if (t < 0.0) throw std::invalid_argument("she_covariance: t must be >= 0");
  return std::exp(-model.rate(p1, p2) * t);
}

CompareReport compare_fdd(const stats::EnsembleStats& sim,
                          const std::vector<stats::StatRow>& corr_rows, double dp,
                          const std::function<double(double, double)>& rate_fn) {
  CompareReport rep;
  // group rows per mode; normalize by the lag-0 value
  std::map<std::pair<int, int>, std::vector<const stats::StatRow*>> per_mode;
  for (const auto& r : corr_rows)
    if (r.kind == "corr") per_mode[{r.kx, r.ky}].push_back(&r);

  for (auto& [mode, rows] : per_mode) {
    const stats::StatRow* at0 = nullptr;
    for (auto* r : rows)
      if (r->t == 0.0) at0 = r;
    if (!at0 || at0->value <= 0.0) continue;
    double c0 = at0->value;
    double rate = rate_fn(dp * mode.first, dp * mode.second);
    for (auto* r : rows) {
      CompareRow out;
      out.kx = mode.first;
      out.ky = mode.second;
      out.t = r->t;
      out.measured = r->value / c0;
      out.se = r->se > 0 ? r->se / c0 : 0.0;
      out.predicted = std::exp(-rate * r->t);
      out.z = out.se > 0 ? (out.measured - out.predicted) / out.se : 0.0;
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(out.z));
      rep.rows.push_back(out);
    }
  }
  rep.n_rows = static_cast<int>(rep.rows.size());
  (void)sim;
  return rep;
}

}  // namespace sbe::eff
