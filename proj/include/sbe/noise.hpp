#pragma once

#include <cstdint>
#include <functional>

#include "sbe/field.hpp"
#include "sbe/mollifier.hpp"
#include "sbe/scale.hpp"

namespace sbe::noise {

// Hermitian-symmetric spectral Gaussian draw with per-mode complex variance
// var_fn(kx, ky) (in series-coefficient normalization).  Modes beyond
// grid.k_keep() and the Nyquist lines stay zero.
void sample_spectral_gaussian(const GridSpec& grid,
                              const std::function<double(int, int)>& var_fn,
                              uint64_t seed, SpectralField& out);

// eta^tau = rho_tau * eta sampled in Fourier: per-mode variance
// Theta_tau(p) / L^2, returned in real space.
RealField sample_mollified_noise(const GridSpec& grid, const ScaleParams& s,
                                 const Mollifier& m, uint64_t seed);

// Spectral version of the same draw (the simulator's stationary start).
SpectralField sample_mollified_noise_spectral(const GridSpec& grid, const ScaleParams& s,
                                              const Mollifier& m, uint64_t seed);

// Periodic extension of a fundamental-cell field: tiles the cell `copies`
// times per axis.  On a torus simulation (copies == 1) this is the identity.
RealField periodize(const RealField& cell, int copies);

}  // namespace sbe::noise
