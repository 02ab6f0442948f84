// Discrete Radon transform for 2D parallel-beam geometry.
//
// Joseph ray tracing: each ray steps one row (or column) at a time along the
// axis best aligned with its direction and linearly interpolates between the
// two straddled pixels; the per-step path length is pixel_size / |cos| (or
// /|sin|). The backprojector scatters with the identical weight enumeration,
// so <Ax, z> == <x, A^T z> holds to rounding error.
//
// Conventions: pixel (row i, col j) has center
//   x = (j - (n-1)/2) * pixel_size,  y = ((n-1)/2 - i) * pixel_size,
// and the ray for angle theta and detector offset s is the line
//   { p : p . (cos theta, sin theta) = s }.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ctkit/errors.hpp"
#include "ctkit/geometry.hpp"
#include "ctkit/image.hpp"

namespace ctkit {

namespace detail {

// Calls visit(flat_pixel_index, weight) for every pixel the ray touches.
template <typename Visit>
inline void trace_ray(const ScanGeometry& g, double sin_a, double cos_a,
                      double s, Visit&& visit) {
  const int n = g.image_size;
  const double px = g.pixel_size;
  const double half = 0.5 * (n - 1);

  if (std::abs(cos_a) >= std::abs(sin_a)) {
    // Drive over rows, interpolate along x.
    const double step_len = px / std::abs(cos_a);
    const double inv_cos = 1.0 / cos_a;
    for (int i = 0; i < n; ++i) {
      const double y = (half - i) * px;
      const double x = (s - y * sin_a) * inv_cos;
      const double jf = x / px + half;
      const double jfloor = std::floor(jf);
      const int j0 = static_cast<int>(jfloor);
      const double fr = jf - jfloor;
      if (j0 >= 0 && j0 < n) visit(i * n + j0, (1.0 - fr) * step_len);
      if (j0 + 1 >= 0 && j0 + 1 < n) visit(i * n + j0 + 1, fr * step_len);
    }
  } else {
    // Drive over columns, interpolate along y (rows).
    const double step_len = px / std::abs(sin_a);
    const double inv_sin = 1.0 / sin_a;
    for (int j = 0; j < n; ++j) {
      const double x = (j - half) * px;
      const double y = (s - x * cos_a) * inv_sin;
      const double ifl = half - y / px;
      const double ifloor = std::floor(ifl);
      const int i0 = static_cast<int>(ifloor);
      const double fr = ifl - ifloor;
      if (i0 >= 0 && i0 < n) visit(i0 * n + j, (1.0 - fr) * step_len);
      if (i0 + 1 >= 0 && i0 + 1 < n) visit((i0 + 1) * n + j, fr * step_len);
    }
  }
}

}  // namespace detail

// A x: overwrite `sino` with the projection of `img`.
template <typename T>
void forward_project_raw(const ScanGeometry& g, std::span<const T> img,
                         std::span<T> sino) {
  if (img.size() != static_cast<size_t>(g.image_size) * g.image_size)
    throw ShapeError("forward_project: image size mismatch");
  if (sino.size() != static_cast<size_t>(g.num_angles) * g.num_detectors)
    throw ShapeError("forward_project: sinogram size mismatch");
  for (int a = 0; a < g.num_angles; ++a) {
    const double th = g.angle(a);
    const double sin_a = std::sin(th), cos_a = std::cos(th);
    T* out_row = sino.data() + static_cast<size_t>(a) * g.num_detectors;
    for (int d = 0; d < g.num_detectors; ++d) {
      const double s = g.detector_position(d);
      double acc = 0.0;
      detail::trace_ray(g, sin_a, cos_a, s, [&](int idx, double w) {
        acc += w * static_cast<double>(img[idx]);
      });
      out_row[d] = static_cast<T>(acc);
    }
  }
}

// A^T z: overwrite `img` with the backprojection of `sino`.
template <typename T>
void back_project_raw(const ScanGeometry& g, std::span<const T> sino,
                      std::span<T> img) {
  if (img.size() != static_cast<size_t>(g.image_size) * g.image_size)
    throw ShapeError("back_project: image size mismatch");
  if (sino.size() != static_cast<size_t>(g.num_angles) * g.num_detectors)
    throw ShapeError("back_project: sinogram size mismatch");
  std::vector<double> acc(img.size(), 0.0);
  for (int a = 0; a < g.num_angles; ++a) {
    const double th = g.angle(a);
    const double sin_a = std::sin(th), cos_a = std::cos(th);
    const T* in_row = sino.data() + static_cast<size_t>(a) * g.num_detectors;
    for (int d = 0; d < g.num_detectors; ++d) {
      const double v = static_cast<double>(in_row[d]);
      if (v == 0.0) continue;
      const double s = g.detector_position(d);
      detail::trace_ray(g, sin_a, cos_a, s,
                        [&](int idx, double w) { acc[idx] += w * v; });
    }
  }
  for (size_t i = 0; i < img.size(); ++i) img[i] = static_cast<T>(acc[i]);
}

template <typename T>
Sinogram<T> forward_project(const Image<T>& x, const ScanGeometry& g) {
  if (x.size != g.image_size)
    throw ShapeError("forward_project: image size does not match geometry");
  Sinogram<T> y(g.num_angles, g.num_detectors);
  forward_project_raw<T>(g, x.flat(), y.flat());
  return y;
}

template <typename T>
Image<T> back_project(const Sinogram<T>& z, const ScanGeometry& g) {
  if (z.num_angles != g.num_angles || z.num_detectors != g.num_detectors)
    throw ShapeError("back_project: sinogram shape does not match geometry");
  Image<T> x(g.image_size);
  back_project_raw<T>(g, z.flat(), x.flat());
  return x;
}

// Power-method estimate of the largest singular value of A. Runs in double;
// the Rayleigh quotient of A^T A is nondecreasing over iterations.
inline double operator_norm(const ScanGeometry& g, int iterations,
                            uint64_t seed) {
  if (iterations < 10) throw ConfigError("operator_norm: iterations must be >= 10");
  g.validate();
  const size_t npix = static_cast<size_t>(g.image_size) * g.image_size;
  std::vector<double> x(npix);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& v : x) v = gauss(rng);

  std::vector<double> y(static_cast<size_t>(g.num_angles) * g.num_detectors);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    double nx = norm2<double>(x);
    if (nx == 0.0) throw ConfigError("operator_norm: degenerate start vector");
    for (auto& v : x) v /= nx;
    forward_project_raw<double>(g, x, y);
    estimate = norm2<double>(y);  // ||A x|| with ||x|| = 1
    back_project_raw<double>(g, y, x);
  }
  return estimate;
}

}  // namespace ctkit
