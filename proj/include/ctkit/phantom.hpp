// Phantom generators: the 10-ellipse Shepp-Logan head and seeded random
// ellipse images used as training data.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "ctkit/errors.hpp"
#include "ctkit/image.hpp"

namespace ctkit {

// Ellipse in the unit square [-1,1]^2. Center coordinates are fractions of
// the half-width; the ellipse must fit inside the unit disk after rotation.
struct EllipseSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double semi_axis_a = 0.5;
  double semi_axis_b = 0.5;
  double rotation = 0.0;  // radians
  double intensity = 1.0;

  bool inside_unit_disk() const {
    const double r = std::hypot(center_x, center_y);
    return r + std::max(semi_axis_a, semi_axis_b) <= 1.0 + 1e-12;
  }
};

// Adds intensity to every pixel whose center lies inside the ellipse.
template <typename T>
void rasterize_ellipse(Image<T>& img, const EllipseSpec& e) {
  const int n = img.size;
  const double step = 2.0 / n;
  const double c = std::cos(e.rotation), s = std::sin(e.rotation);
  const double inv_a2 = 1.0 / (e.semi_axis_a * e.semi_axis_a);
  const double inv_b2 = 1.0 / (e.semi_axis_b * e.semi_axis_b);
  for (int i = 0; i < n; ++i) {
    const double y = 1.0 - (i + 0.5) * step;
    for (int j = 0; j < n; ++j) {
      const double x = (j + 0.5) * step - 1.0;
      const double dx = x - e.center_x, dy = y - e.center_y;
      // rotate into the ellipse frame
      const double u = c * dx + s * dy;
      const double v = -s * dx + c * dy;
      if (u * u * inv_a2 + v * v * inv_b2 <= 1.0)
        img.at(i, j) += static_cast<T>(e.intensity);
    }
  }
}

namespace detail {

// Modified Shepp-Logan ellipses (intensity, a, b, x0, y0, rotation in deg);
// the variant whose summed values lie in [0, 1].
inline const std::array<std::array<double, 6>, 10>& shepp_logan_ellipses() {
  static const std::array<std::array<double, 6>, 10> table = {{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
      {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
      {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.605, 0.0},
      {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  }};
  return table;
}

}  // namespace detail

template <typename T>
Image<T> shepp_logan(int n) {
  if (n < 16) throw SizeError("shepp_logan: n must be >= 16");
  Image<T> img(n);
  const double deg = std::numbers::pi / 180.0;
  for (const auto& row : detail::shepp_logan_ellipses()) {
    EllipseSpec e;
    e.intensity = row[0];
    e.semi_axis_a = row[1];
    e.semi_axis_b = row[2];
    e.center_x = row[3];
    e.center_y = row[4];
    e.rotation = row[5] * deg;
    rasterize_ellipse(img, e);
  }
  for (auto& p : img.pixels) p = std::clamp(p, T(0), T(1));
  return img;
}

// Sum of k random ellipses clipped to [0, 1], deterministic in the seed.
// The first ellipse always has positive intensity so images are non-constant.
template <typename T>
Image<T> random_ellipse_phantom(uint64_t seed, int n,
                                std::pair<int, int> num_ellipses_range = {3, 8}) {
  if (n < 16) throw SizeError("random_ellipse_phantom: n must be >= 16");
  if (num_ellipses_range.first > num_ellipses_range.second ||
      num_ellipses_range.first < 1)
    throw ConfigError("random_ellipse_phantom: empty ellipse count range");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(num_ellipses_range.first,
                                                num_ellipses_range.second);
  std::uniform_real_distribution<double> axis_dist(0.06, 0.45);
  std::uniform_real_distribution<double> rot_dist(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> pos_intensity(0.3, 0.95);
  std::uniform_real_distribution<double> any_intensity(-0.35, 0.95);

  Image<T> img(n);
  const int k = count_dist(rng);
  for (int e = 0; e < k; ++e) {
    EllipseSpec spec;
    spec.semi_axis_a = axis_dist(rng);
    spec.semi_axis_b = axis_dist(rng);
    spec.rotation = rot_dist(rng);
    const double margin = 1.0 - std::max(spec.semi_axis_a, spec.semi_axis_b);
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    const double rad = margin * unit(rng);
    spec.center_x = rad * std::cos(ang);
    spec.center_y = rad * std::sin(ang);
    spec.intensity = (e == 0) ? pos_intensity(rng) : any_intensity(rng);
    rasterize_ellipse(img, spec);
  }
  for (auto& p : img.pixels) p = std::clamp(p, T(0), T(1));
  return img;
}

}  // namespace ctkit
