#include "fnls/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <mutex>
#include <stdexcept>

namespace fnls {

namespace {

// FFTW plan creation/destruction is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::atomic<std::uint64_t> g_transform_count{0};

}  // namespace

Dft::Dft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Dft: length must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  // Plan against a scratch buffer; execute via the new-array interface so the
  // plan can be reused on any caller buffer. FFTW_UNALIGNED keeps that legal
  // for buffers FFTW did not allocate.
  std::vector<std::complex<double>> scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_fwd_ == nullptr || plan_bwd_ == nullptr)
    throw std::runtime_error("Dft: FFTW planning failed");
}

Dft::~Dft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Dft::forward(std::complex<double>* buf) const {
  auto* p = reinterpret_cast<fftw_complex*>(buf);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
  g_transform_count.fetch_add(1, std::memory_order_relaxed);
}

void Dft::backward(std::complex<double>* buf) const {
  auto* p = reinterpret_cast<fftw_complex*>(buf);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) buf[i] *= scale;
  g_transform_count.fetch_add(1, std::memory_order_relaxed);
}

std::size_t next_smooth_length(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t candidate = n;; ++candidate) {
    std::size_t r = candidate;
    for (std::size_t f : {2u, 3u, 5u})
      while (r % f == 0) r /= f;
    if (r == 1) return candidate;
  }
}

std::uint64_t fft_transform_count() {
  return g_transform_count.load(std::memory_order_relaxed);
}

void reset_fft_transform_count() {
  g_transform_count.store(0, std::memory_order_relaxed);
}

}  // namespace fnls
