#include "sbe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "sbe/rng.hpp"

namespace sbe::stats {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

Estimate bootstrap_ci(const std::vector<double>& samples, const Statistic& stat,
                      int resamples, uint64_t seed) {
  if (resamples < 200) throw std::invalid_argument("bootstrap_ci: resamples must be >= 200");
  if (samples.size() < 8) throw std::invalid_argument("bootstrap_ci: need at least 8 samples");

  Estimate e;
  e.value = stat(samples);

  std::vector<double> reps(resamples);
  std::vector<double> buf(samples.size());
  const uint64_t n = samples.size();
  for (int r = 0; r < resamples; ++r) {
    // deterministic per-resample stream so parallel resampling stays stable
    GaussianStream g(derive_seed(seed, static_cast<uint64_t>(r)));
    for (size_t i = 0; i < n; ++i) {
      uint64_t idx = g.raw() % n;
      buf[i] = samples[idx];
    }
    reps[r] = stat(buf);
  }
  std::sort(reps.begin(), reps.end());
  auto pct = [&](double q) {
    double pos = q * (resamples - 1);
    size_t i = static_cast<size_t>(pos);
    double f = pos - i;
    return i + 1 < reps.size() ? reps[i] * (1 - f) + reps[i + 1] * f : reps.back();
  };
  e.lo = pct(0.025);
  e.hi = pct(0.975);
  double m = mean(reps), s = 0.0;
  for (double x : reps) s += (x - m) * (x - m);
  e.se = std::sqrt(s / (resamples - 1));
  return e;
}

Estimate bootstrap_mean(const std::vector<double>& samples, int resamples, uint64_t seed) {
  return bootstrap_ci(samples, [](const std::vector<double>& v) { return mean(v); },
                      resamples, seed);
}

RateFit correlation_time(const std::vector<double>& t, const std::vector<double>& c,
                         const std::vector<double>& se_c) {
  RateFit r;
  if (t.size() != c.size() || t.empty()) return r;
  if (!(c[0] > 0.0)) return r;
  const double floor_c = 0.2 * c[0];

  std::vector<double> xs, ys;
  bool monotone = true;
  double prev = c[0];
  for (size_t i = 0; i < t.size(); ++i) {
    if (c[i] <= floor_c) break;
    if (c[i] > prev) {
      double slack = se_c.size() == c.size() ? 3.0 * (se_c[i] + se_c[i ? i - 1 : 0]) : 0.0;
      if (c[i] - prev > slack) {
        monotone = false;  // non-monotone beyond noise: fit what we have, flag it
        break;
      }
    }
    xs.push_back(t[i]);
    ys.push_back(std::log(c[i]));
    prev = c[i];
  }
  if (xs.size() < 3) return r;

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double inter = (sy - slope * sx) / n;
  double ssr = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double fit = slope * xs[i] + inter;
    ssr += (ys[i] - fit) * (ys[i] - fit);
  }
  double denom = n * sxx - sx * sx;
  r.rate = -slope;
  r.se = n > 2 ? std::sqrt(std::max(0.0, ssr / (n - 2)) * n / denom) : 0.0;
  r.window_points = static_cast<int>(xs.size());
  r.ok = monotone;
  return r;
}

Estimate gaussianity(const std::vector<double>& samples, int resamples, uint64_t seed) {
  if (samples.size() < 64) throw std::invalid_argument("gaussianity: need >= 64 samples");
  auto kurt = [](const std::vector<double>& v) {
    double m = mean(v);
    double m2 = 0, m4 = 0;
    for (double x : v) {
      double d = x - m;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    m2 /= v.size();
    m4 /= v.size();
    return m2 > 0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  };
  return bootstrap_ci(samples, kurt, resamples, seed);
}

void write_stats_csv(const std::string& path, const std::vector<StatRow>& rows) {
  FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("write_stats_csv: cannot open " + path);
  std::fprintf(fp, "kind,kx,ky,t,value,se\n");
  for (const auto& r : rows)
    std::fprintf(fp, "%s,%d,%d,%.17g,%.17g,%.17g\n", r.kind.c_str(), r.kx, r.ky, r.t,
                 r.value, r.se);
  std::fclose(fp);
}

std::vector<StatRow> read_stats_csv(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "r");
  if (!fp) throw std::runtime_error("read_stats_csv: cannot open " + path);
  std::vector<StatRow> rows;
  char line[512];
  bool first = true;
  while (std::fgets(line, sizeof(line), fp)) {
    if (first) {
      first = false;
      continue;
    }
    StatRow r;
    char kind[64];
    if (std::sscanf(line, "%63[^,],%d,%d,%lg,%lg,%lg", kind, &r.kx, &r.ky, &r.t, &r.value,
                    &r.se) == 6) {
      r.kind = kind;
      rows.push_back(r);
    }
  }
  std::fclose(fp);
  return rows;
}

}  // namespace sbe::stats
