#include "dimred/fft.hpp"

#include <cmath>
#include <numbers>
#include <new>

namespace dimred {

Fft1d::Fft1d(int n) : n_(n) {
  buf_ = fftw_alloc_complex(static_cast<std::size_t>(n));
  if (buf_ == nullptr) throw std::bad_alloc();
  fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft1d::~Fft1d() {
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(buf_);
}

std::vector<double> wavenumbers(int n, double length) {
  std::vector<double> k(static_cast<std::size_t>(n));
  const double base = 2.0 * std::numbers::pi / length;
  for (int i = 0; i < n; ++i) k[i] = base * (i <= n / 2 ? i : i - n);
  return k;
}

}  // namespace dimred
