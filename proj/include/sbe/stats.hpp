#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sbe::stats {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  double lo = 0.0;  // percentile bootstrap CI
  double hi = 0.0;
};

using Statistic = std::function<double(const std::vector<double>&)>;

// Percentile bootstrap (95% CI), deterministic given seed.  Refuses fewer
// than 8 samples; requires resamples >= 200.
Estimate bootstrap_ci(const std::vector<double>& samples, const Statistic& stat,
                      int resamples, uint64_t seed);

Estimate bootstrap_mean(const std::vector<double>& samples, int resamples, uint64_t seed);

struct RateFit {
  double rate = 0.0;
  double se = 0.0;
  bool ok = false;          // false: window unusable or non-monotone beyond noise
  int window_points = 0;
};

// Least-squares exponential-rate fit of C(t) over the window C > 0.2 C(0).
// se_c, when provided, flags non-monotonicity beyond noise.
RateFit correlation_time(const std::vector<double>& t, const std::vector<double>& c,
                         const std::vector<double>& se_c = {});

// Excess kurtosis with percentile-bootstrap CI; needs >= 64 samples.
Estimate gaussianity(const std::vector<double>& samples, int resamples, uint64_t seed);

// Long-format statistics row shared by the simulator and the comparisons.
struct StatRow {
  std::string kind;
  int kx = 0, ky = 0;
  double t = 0.0;
  double value = 0.0;
  double se = 0.0;
};

struct EnsembleStats {
  int ensemble = 0;
  uint64_t seed = 0;
  double tau = 1.0;
  double L = 0.0;
  int N = 0;
  std::vector<double> times;
  std::vector<std::array<int, 2>> modes;
  // snapshots of tracked modes: [member][time][mode]
  std::vector<std::vector<std::vector<std::complex<double>>>> snaps;
  std::vector<StatRow> rows;
};

void write_stats_csv(const std::string& path, const std::vector<StatRow>& rows);
std::vector<StatRow> read_stats_csv(const std::string& path);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased

}  // namespace sbe::stats
