#pragma once

#include <complex>
#include <vector>

#include <fftw3.h>

namespace dimred {

// In-place 1D complex transform on an owned buffer. Planning uses
// FFTW_ESTIMATE so results are deterministic run to run.
class Fft1d {
 public:
  explicit Fft1d(int n);
  ~Fft1d();
  Fft1d(const Fft1d&) = delete;
  Fft1d& operator=(const Fft1d&) = delete;

  int size() const { return n_; }
  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
  // Unnormalized forward (e^{-ikx}) and backward transforms.
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

// Angular wavenumbers for n samples on a period of length L, FFT order.
std::vector<double> wavenumbers(int n, double length);

}  // namespace dimred
