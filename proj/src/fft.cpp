#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "morsegpe/error.hpp"

namespace morsegpe::detail {

namespace {

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  require(n >= 2, "FFT length must be >= 2");
  std::vector<std::complex<double>> scratch(n);
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(scratch.data()),
                                   as_fftw(scratch.data()), FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(scratch.data()),
                                   as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  require(forward_plan_ != nullptr && inverse_plan_ != nullptr,
          "FFTW planning failed");
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft::forward(std::span<std::complex<double>> data) const {
  require(data.size() == n_, "FFT length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
}

void Fft::inverse(std::span<std::complex<double>> data) const {
  require(data.size() == n_, "FFT length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& z : data) z *= scale;
}

}  // namespace morsegpe::detail
