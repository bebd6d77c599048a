#include "sbe/noise.hpp"

#include <cmath>

#include "sbe/fft.hpp"
#include "sbe/rng.hpp"

namespace sbe::noise {

void sample_spectral_gaussian(const GridSpec& grid,
                              const std::function<double(int, int)>& var_fn,
                              uint64_t seed, SpectralField& out) {
  grid.validate();
  const int n = grid.N;
  const int kk = grid.k_keep();
  out = SpectralField(n, grid.L);
  GaussianStream g(seed);

  // Draw in a fixed (kx, ky) order over the stored half-spectrum.
  // kx in 1..kk: free complex modes (conjugates live outside the storage).
  // kx = 0: pair (0, ky) with (0, -ky); draw ky > 0 and mirror; (0,0) real.
  auto cgauss = [&](double var) {
    double s = std::sqrt(0.5 * var);
    double re = s * g.normal();
    double im = s * g.normal();
    return std::complex<double>(re, im);
  };

  for (int ky = 1; ky <= kk; ++ky) {
    double var = var_fn(0, ky);
    if (var > 0) {
      auto z = cgauss(var);
      out.at(0, ky) = z;
      out.at(0, n - ky) = std::conj(z);
    } else {
      g.normal();
      g.normal();
    }
  }
  for (int kx = 1; kx <= kk; ++kx) {
    for (int ky = -kk; ky <= kk; ++ky) {
      double var = var_fn(kx, ky);
      int iy = ky >= 0 ? ky : ky + n;
      if (var > 0)
        out.at(kx, iy) = cgauss(var);
      else {
        g.normal();
        g.normal();
      }
    }
  }
  // zero mode: conserved quantity, left at zero (mean-zero field)
  out.at(0, 0) = {0.0, 0.0};
}

SpectralField sample_mollified_noise_spectral(const GridSpec& grid, const ScaleParams& s,
                                              const Mollifier& m, uint64_t seed) {
  const double dp = grid.dp();
  const double l2 = grid.L * grid.L;
  SpectralField out;
  sample_spectral_gaussian(
      grid,
      [&](int kx, int ky) { return theta_tau(dp * kx, dp * ky, s, m) / l2; },
      seed, out);
  return out;
}

RealField sample_mollified_noise(const GridSpec& grid, const ScaleParams& s,
                                 const Mollifier& m, uint64_t seed) {
  SpectralField sf = sample_mollified_noise_spectral(grid, s, m, seed);
  RealField rf(grid.N, grid.L);
  Fft fft(grid.N);
  fft.backward(sf.c.data(), rf.v.data());
  return rf;
}

RealField periodize(const RealField& cell, int copies) {
  if (copies < 1) throw std::invalid_argument("periodize: copies must be >= 1");
  RealField out(cell.N * copies, cell.L * copies);
  for (int iy = 0; iy < out.N; ++iy)
    for (int ix = 0; ix < out.N; ++ix)
      out.at(ix, iy) = cell.at(ix % cell.N, iy % cell.N);
  return out;
}

}  // namespace sbe::noise
