#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace morsegpe::detail {

// In-place complex FFT of a fixed length. Plans are built with
// FFTW_ESTIMATE, so results are deterministic run to run.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<std::complex<double>> data) const;
  // Scaled by 1/n, so inverse(forward(x)) == x.
  void inverse(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace morsegpe::detail
