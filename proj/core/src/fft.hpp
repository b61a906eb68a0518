#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <vector>

namespace fermibose::detail {

/// Aligned complex buffer for FFTW. Alignment is fixed so that every buffer
/// sees the same codelets, which keeps results bit-reproducible.
class FftBuffer {
public:
  FftBuffer() = default;
  explicit FftBuffer(std::size_t n)
      : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n ? n : 1)))),
        size_(n) {
    if (!data_) throw std::bad_alloc();
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  FftBuffer(FftBuffer&& o) noexcept : data_(o.data_), size_(o.size_) {
    o.data_ = nullptr;
    o.size_ = 0;
  }
  FftBuffer& operator=(FftBuffer&& o) noexcept {
    if (this != &o) {
      release();
      data_ = o.data_;
      size_ = o.size_;
      o.data_ = nullptr;
      o.size_ = 0;
    }
    return *this;
  }
  ~FftBuffer() { release(); }

  std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(data_); }
  const std::complex<double>* data() const noexcept {
    return reinterpret_cast<const std::complex<double>*>(data_);
  }
  fftw_complex* raw() noexcept { return data_; }
  std::size_t size() const noexcept { return size_; }
  std::complex<double>& operator[](std::size_t i) noexcept { return data()[i]; }

private:
  void release() noexcept {
    if (data_) fftw_free(data_);
    data_ = nullptr;
  }
  fftw_complex* data_ = nullptr;
  std::size_t size_ = 0;
};

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place multidimensional complex DFT plan. Planning is serialized; execution
/// through execute(buffer) is thread-safe for distinct buffers.
class FftPlan {
public:
  FftPlan() = default;
  FftPlan(const std::vector<int>& dims, int sign) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    FftBuffer scratch(total);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch.raw(), scratch.raw(),
                          sign, FFTW_ESTIMATE);
    size_ = total;
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& o) noexcept : plan_(o.plan_), size_(o.size_) { o.plan_ = nullptr; }
  FftPlan& operator=(FftPlan&& o) noexcept {
    if (this != &o) {
      destroy();
      plan_ = o.plan_;
      size_ = o.size_;
      o.plan_ = nullptr;
    }
    return *this;
  }
  ~FftPlan() { destroy(); }

  std::size_t size() const noexcept { return size_; }
  void execute(FftBuffer& buffer) const { fftw_execute_dft(plan_, buffer.raw(), buffer.raw()); }

private:
  void destroy() noexcept {
    if (plan_) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    plan_ = nullptr;
  }
  fftw_plan plan_ = nullptr;
  std::size_t size_ = 0;
};

}  // namespace fermibose::detail
