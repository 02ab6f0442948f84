// Rank-4 (batch, channels, height, width) tensor used by the network blocks.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "ctkit/errors.hpp"

namespace ctkit {

// Live/peak byte counters for TensorBatch storage. Tests use the peak value
// to assert the memory contracts of the ODE backward paths.
namespace memstats {

inline std::atomic<long long>& live_bytes() {
  static std::atomic<long long> v{0};
  return v;
}

inline std::atomic<long long>& peak_bytes() {
  static std::atomic<long long> v{0};
  return v;
}

inline void note_alloc(long long n) {
  const long long cur = live_bytes().fetch_add(n) + n;
  auto& pk = peak_bytes();
  long long old = pk.load();
  while (old < cur && !pk.compare_exchange_weak(old, cur)) {
  }
}

inline void note_free(long long n) { live_bytes().fetch_sub(n); }

inline void reset_peak() { peak_bytes().store(live_bytes().load()); }

}  // namespace memstats

template <typename T>
class TensorBatch {
  static_assert(std::is_floating_point_v<T>);

 public:
  TensorBatch() = default;

  TensorBatch(int batch, int channels, int height, int width)
      : b_(batch), c_(channels), h_(height), w_(width) {
    if (batch <= 0 || channels <= 0 || height <= 0 || width <= 0)
      throw ShapeError("TensorBatch dimensions must be positive");
    data_.assign(static_cast<size_t>(batch) * channels * height * width, T(0));
    track();
  }

  TensorBatch(const TensorBatch& other)
      : b_(other.b_), c_(other.c_), h_(other.h_), w_(other.w_),
        data_(other.data_) {
    track();
  }

  TensorBatch(TensorBatch&& other) noexcept
      : b_(other.b_), c_(other.c_), h_(other.h_), w_(other.w_),
        data_(std::move(other.data_)), tracked_(other.tracked_) {
    other.tracked_ = 0;
    other.b_ = other.c_ = other.h_ = other.w_ = 0;
  }

  TensorBatch& operator=(const TensorBatch& other) {
    if (this != &other) {
      untrack();
      b_ = other.b_; c_ = other.c_; h_ = other.h_; w_ = other.w_;
      data_ = other.data_;
      track();
    }
    return *this;
  }

  TensorBatch& operator=(TensorBatch&& other) noexcept {
    if (this != &other) {
      untrack();
      b_ = other.b_; c_ = other.c_; h_ = other.h_; w_ = other.w_;
      data_ = std::move(other.data_);
      tracked_ = other.tracked_;
      other.tracked_ = 0;
      other.b_ = other.c_ = other.h_ = other.w_ = 0;
    }
    return *this;
  }

  ~TensorBatch() { untrack(); }

  int batch() const { return b_; }
  int channels() const { return c_; }
  int height() const { return h_; }
  int width() const { return w_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> flat() { return {data_.data(), data_.size()}; }
  std::span<const T> flat() const { return {data_.data(), data_.size()}; }

  T& at(int b, int c, int y, int x) {
    return data_[((static_cast<size_t>(b) * c_ + c) * h_ + y) * w_ + x];
  }
  T at(int b, int c, int y, int x) const {
    return data_[((static_cast<size_t>(b) * c_ + c) * h_ + y) * w_ + x];
  }

  // Contiguous (height*width) plane for one (batch, channel) pair.
  std::span<T> plane(int b, int c) {
    return {data_.data() + (static_cast<size_t>(b) * c_ + c) * h_ * w_,
            static_cast<size_t>(h_) * w_};
  }
  std::span<const T> plane(int b, int c) const {
    return {data_.data() + (static_cast<size_t>(b) * c_ + c) * h_ * w_,
            static_cast<size_t>(h_) * w_};
  }

  bool same_shape(const TensorBatch& o) const {
    return b_ == o.b_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

  void fill(T v) {
    for (auto& e : data_) e = v;
  }

  bool all_finite() const {
    for (const T e : data_)
      if (!std::isfinite(e)) return false;
    return true;
  }

  static constexpr const char* dtype() {
    return sizeof(T) == 4 ? "f32" : "f64";
  }

 private:
  void track() {
    tracked_ = static_cast<long long>(data_.capacity() * sizeof(T));
    memstats::note_alloc(tracked_);
  }
  void untrack() {
    memstats::note_free(tracked_);
    tracked_ = 0;
  }

  int b_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<T> data_;
  long long tracked_ = 0;
};

// y += a * x
template <typename T>
void add_scaled(TensorBatch<T>& y, T a, const TensorBatch<T>& x) {
  if (!y.same_shape(x)) throw ShapeError("add_scaled: shape mismatch");
  T* yd = y.data();
  const T* xd = x.data();
  const size_t n = y.size();
  for (size_t i = 0; i < n; ++i) yd[i] += a * xd[i];
}

template <typename T>
void scale_inplace(TensorBatch<T>& y, T a) {
  for (auto& e : y.flat()) e *= a;
}

}  // namespace ctkit
