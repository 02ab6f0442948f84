// Image (n x n pixel grid) and Sinogram (num_angles x num_detectors grid).
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ctkit/errors.hpp"

namespace ctkit {

// Square attenuation image, row-major. Phantoms are nonnegative; iterative
// reconstructions may dip below zero and are kept as-is.
template <typename T>
struct Image {
  int size = 0;
  std::vector<T> pixels;

  Image() = default;
  explicit Image(int n) : size(n), pixels(static_cast<size_t>(n) * n, T(0)) {
    if (n <= 0) throw ShapeError("Image size must be positive");
  }

  T& at(int row, int col) { return pixels[static_cast<size_t>(row) * size + col]; }
  T at(int row, int col) const { return pixels[static_cast<size_t>(row) * size + col]; }

  std::span<T> flat() { return {pixels.data(), pixels.size()}; }
  std::span<const T> flat() const { return {pixels.data(), pixels.size()}; }

  bool all_finite() const {
    for (const T v : pixels)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool has_negative() const {
    for (const T v : pixels)
      if (v < T(0)) return true;
    return false;
  }
};

// Line-integral measurements, row-major with one row per angle.
template <typename T>
struct Sinogram {
  int num_angles = 0;
  int num_detectors = 0;
  std::vector<T> values;

  Sinogram() = default;
  Sinogram(int angles, int detectors)
      : num_angles(angles), num_detectors(detectors),
        values(static_cast<size_t>(angles) * detectors, T(0)) {
    if (angles <= 0 || detectors <= 0)
      throw ShapeError("Sinogram dimensions must be positive");
  }

  T& at(int angle, int det) {
    return values[static_cast<size_t>(angle) * num_detectors + det];
  }
  T at(int angle, int det) const {
    return values[static_cast<size_t>(angle) * num_detectors + det];
  }

  std::span<T> row(int angle) {
    return {values.data() + static_cast<size_t>(angle) * num_detectors,
            static_cast<size_t>(num_detectors)};
  }
  std::span<const T> row(int angle) const {
    return {values.data() + static_cast<size_t>(angle) * num_detectors,
            static_cast<size_t>(num_detectors)};
  }

  std::span<T> flat() { return {values.data(), values.size()}; }
  std::span<const T> flat() const { return {values.data(), values.size()}; }

  bool all_finite() const {
    for (const T v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

template <typename T>
double dot(std::span<const T> a, std::span<const T> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

template <typename T>
double norm2(std::span<const T> a) {
  return std::sqrt(dot(a, a));
}

}  // namespace ctkit
