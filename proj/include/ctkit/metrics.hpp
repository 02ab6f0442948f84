// PSNR and SSIM image-quality metrics.
#pragma once

#include <cmath>
#include <limits>

#include "ctkit/errors.hpp"
#include "ctkit/image.hpp"

namespace ctkit {

struct MetricConfig {
  double data_range = 1.0;  // max - min of the ground truth
  int window = 7;           // uniform SSIM window, odd
  double k1 = 0.01;
  double k2 = 0.03;

  void validate() const {
    if (!(data_range > 0.0)) throw ConfigError("MetricConfig: data_range must be > 0");
    if (window < 3 || window % 2 == 0)
      throw ConfigError("MetricConfig: window must be odd and >= 3");
  }
};

// 10 log10(range^2 / MSE); identical images return +infinity.
template <typename T>
double psnr(const Image<T>& x, const Image<T>& ref,
            const MetricConfig& cfg = {}) {
  cfg.validate();
  if (x.size != ref.size) throw ShapeError("psnr: image sizes differ");
  double mse = 0.0;
  for (size_t i = 0; i < x.pixels.size(); ++i) {
    const double d = double(x.pixels[i]) - double(ref.pixels[i]);
    mse += d * d;
  }
  mse /= static_cast<double>(x.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(cfg.data_range * cfg.data_range / mse);
}

// Mean of the local SSIM map over all fully-contained uniform windows.
// Variances use the unbiased (N-1) estimator.
template <typename T>
double ssim(const Image<T>& x, const Image<T>& ref,
            const MetricConfig& cfg = {}) {
  cfg.validate();
  if (x.size != ref.size) throw ShapeError("ssim: image sizes differ");
  const int n = x.size;
  const int w = cfg.window;
  if (n < w) throw SizeError("ssim: image smaller than the window");

  const double c1 = (cfg.k1 * cfg.data_range) * (cfg.k1 * cfg.data_range);
  const double c2 = (cfg.k2 * cfg.data_range) * (cfg.k2 * cfg.data_range);
  const double np = static_cast<double>(w) * w;
  const double cov_norm = 1.0 / (np - 1.0);

  double total = 0.0;
  long long count = 0;
  for (int i0 = 0; i0 + w <= n; ++i0) {
    for (int j0 = 0; j0 + w <= n; ++j0) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = i0; i < i0 + w; ++i) {
        for (int j = j0; j < j0 + w; ++j) {
          const double a = x.at(i, j);
          const double b = ref.at(i, j);
          sx += a;
          sy += b;
          sxx += a * a;
          syy += b * b;
          sxy += a * b;
        }
      }
      const double mx = sx / np, my = sy / np;
      const double vx = (sxx - np * mx * mx) * cov_norm;
      const double vy = (syy - np * my * my) * cov_norm;
      const double vxy = (sxy - np * mx * my) * cov_norm;
      const double num = (2.0 * mx * my + c1) * (2.0 * vxy + c2);
      const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace ctkit
