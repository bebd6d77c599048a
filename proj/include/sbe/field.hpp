#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbe {

struct GridSpec {
  double L = 2.0 * M_PI * 64.0;  // torus side length
  int N = 256;                   // modes per axis, power of two
  double dt = 0.0;               // 0 selects the lambda_max dt <= 0.5 default
  double k_cut = 2.0 / 3.0;      // spectral cutoff fraction of Nyquist

  void validate() const {
    if (N < 4 || (N & (N - 1)) != 0) throw std::invalid_argument("GridSpec: N must be a power of two >= 4");
    if (!(L > 0.0)) throw std::invalid_argument("GridSpec: L must be > 0");
    if (!(k_cut > 0.0 && k_cut <= 1.0)) throw std::invalid_argument("GridSpec: K_cut must be in (0, 1]");
    if (dt < 0.0) throw std::invalid_argument("GridSpec: dt must be >= 0");
  }
  double dp() const { return 2.0 * M_PI / L; }
  double dx() const { return L / N; }
  // max |k| (integer wavenumber per axis) kept by the cutoff
  int k_keep() const {
    int kk = static_cast<int>(k_cut * (N / 2));
    return std::min(kk, N / 2 - 1);
  }
};

// Real-space samples, row-major v[iy*N + ix].
struct RealField {
  int N = 0;
  double L = 0.0;
  std::vector<double> v;

  RealField() = default;
  RealField(int n, double l) : N(n), L(l), v(static_cast<size_t>(n) * n, 0.0) {}
  double& at(int ix, int iy) { return v[static_cast<size_t>(iy) * N + ix]; }
  double at(int ix, int iy) const { return v[static_cast<size_t>(iy) * N + ix]; }
};

// Half-spectrum coefficients in FFTW r2c layout: c[iy*(N/2+1) + ix],
// ix = 0..N/2, physical kx = ix; ky = iy <= N/2 ? iy : iy - N.
// Coefficients are of the series u(x) = sum_k u_k exp(i dp k . x).
struct SpectralField {
  int N = 0;
  double L = 0.0;
  std::vector<std::complex<double>> c;

  SpectralField() = default;
  SpectralField(int n, double l)
      : N(n), L(l), c(static_cast<size_t>(n) * (n / 2 + 1), {0.0, 0.0}) {}
  int nx() const { return N / 2 + 1; }
  std::complex<double>& at(int ix, int iy) { return c[static_cast<size_t>(iy) * nx() + ix]; }
  std::complex<double> at(int ix, int iy) const { return c[static_cast<size_t>(iy) * nx() + ix]; }
  int ky_of(int iy) const { return iy <= N / 2 ? iy : iy - N; }
};

// Flat binary snapshot: header {magic, version, N, L, tau, seed} then N*N
// row-major little-endian doubles.
void write_field(const std::string& path, const RealField& f, double tau, uint64_t seed);
RealField read_field(const std::string& path, double* tau_out = nullptr,
                     uint64_t* seed_out = nullptr);
void write_field_csv(const std::string& path, const RealField& f);

}  // namespace sbe
