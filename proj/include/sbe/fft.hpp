#pragma once

#include <complex>
#include <vector>

#include "sbe/field.hpp"

namespace sbe {

// Serial FFTW r2c/c2r pair for an N x N grid.  Plans use FFTW_ESTIMATE so
// planning is reproducible; execution is on the internal buffers.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int n() const { return n_; }

  // forward: real samples -> series coefficients (normalized by 1/N^2)
  void forward(const double* in, std::complex<double>* out);
  // backward: series coefficients -> real samples (no extra normalization)
  void backward(const std::complex<double>* in, double* out);

 private:
  int n_;
  void* plan_fwd_;
  void* plan_bwd_;
  double* real_buf_;
  void* cplx_buf_;
};

// Copy coefficients of a size-N spectrum into a size-2N spectrum (zero pad).
void zero_pad_spectrum(const SpectralField& in, SpectralField& out);
// Take the |k| <= N/2 block of a size-2N spectrum back onto size N.
void truncate_spectrum(const SpectralField& in, SpectralField& out);

}  // namespace sbe
