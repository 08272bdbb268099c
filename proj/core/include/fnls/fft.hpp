#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace fnls {

/// One-dimensional complex-to-complex DFT of a fixed length.
///
/// Convention: forward uses the kernel e^{-2*pi*i*j*k/n} and is unnormalized;
/// backward carries the 1/n factor, so backward(forward(x)) == x.
/// Instances are immutable after construction and may be shared across
/// threads; execution on distinct buffers is thread safe.
class Dft {
 public:
  explicit Dft(std::size_t n);
  ~Dft();

  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  std::size_t size() const { return n_; }

  /// In-place unnormalized forward transform of buf[0..n).
  void forward(std::complex<double>* buf) const;
  /// In-place backward transform of buf[0..n), including the 1/n factor.
  void backward(std::complex<double>* buf) const;

 private:
  std::size_t n_;
  void* plan_fwd_;
  void* plan_bwd_;
};

/// Smallest integer >= n whose prime factors are all in {2, 3, 5}.
std::size_t next_smooth_length(std::size_t n);

/// Global count of executed transforms (forward + backward); test
/// instrumentation for per-application operation counts.
std::uint64_t fft_transform_count();
void reset_fft_transform_count();

}  // namespace fnls
