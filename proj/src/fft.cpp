#include "sbe/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace sbe {

namespace {
// FFTW planning mutates global state; serialize it.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  real_buf_ = fftw_alloc_real(static_cast<size_t>(n) * n);
  fftw_complex* cb = fftw_alloc_complex(static_cast<size_t>(n) * (n / 2 + 1));
  cplx_buf_ = cb;
  std::lock_guard<std::mutex> lk(plan_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_2d(n, n, real_buf_, cb, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_c2r_2d(n, n, cb, real_buf_, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lk(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(real_buf_);
  fftw_free(static_cast<fftw_complex*>(cplx_buf_));
}

void Fft::forward(const double* in, std::complex<double>* out) {
  size_t nr = static_cast<size_t>(n_) * n_;
  size_t nc = static_cast<size_t>(n_) * (n_ / 2 + 1);
  std::memcpy(real_buf_, in, nr * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  const double norm = 1.0 / (static_cast<double>(n_) * n_);
  auto* cb = static_cast<fftw_complex*>(cplx_buf_);
  for (size_t i = 0; i < nc; ++i)
    out[i] = std::complex<double>(cb[i][0] * norm, cb[i][1] * norm);
}

void Fft::backward(const std::complex<double>* in, double* out) {
  size_t nr = static_cast<size_t>(n_) * n_;
  size_t nc = static_cast<size_t>(n_) * (n_ / 2 + 1);
  auto* cb = static_cast<fftw_complex*>(cplx_buf_);
  for (size_t i = 0; i < nc; ++i) {
    cb[i][0] = in[i].real();
    cb[i][1] = in[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  std::memcpy(out, real_buf_, nr * sizeof(double));
}

void zero_pad_spectrum(const SpectralField& in, SpectralField& out) {
  const int n = in.N, n2 = out.N;
  for (auto& z : out.c) z = {0.0, 0.0};
  // Nyquist rows (|k| = N/2) are identically zero under the simulator's
  // cutoff invariant, so a plain coefficient copy keeps the pad Hermitian.
  for (int iy = 0; iy < n; ++iy) {
    int ky = in.ky_of(iy);
    int oy = ky >= 0 ? ky : ky + n2;
    for (int ix = 0; ix <= n / 2; ++ix) out.at(ix, oy) = in.at(ix, iy);
  }
}

void truncate_spectrum(const SpectralField& in, SpectralField& out) {
  const int n2 = in.N, n = out.N;
  for (auto& z : out.c) z = {0.0, 0.0};
  for (int iy = 0; iy < n; ++iy) {
    int ky = out.ky_of(iy);
    int sy = ky >= 0 ? ky : ky + n2;
    for (int ix = 0; ix <= n / 2; ++ix) out.at(ix, iy) = in.at(ix, sy);
  }
}

}  // namespace sbe
