// Primal Dual Hybrid Gradient baseline solver.
#pragma once

#include <chrono>
#include <cmath>
#include <vector>

#include "ctkit/errors.hpp"
#include "ctkit/geometry.hpp"
#include "ctkit/image.hpp"
#include "ctkit/projector.hpp"
#include "ctkit/prox.hpp"

namespace ctkit {

// Step sizes must satisfy sigma * tau * ||A||^2 <= 1; the constructor checks
// this against a caller-supplied operator-norm estimate.
template <typename T>
struct PdhgConfig {
  T sigma = T(0);
  T tau = T(0);
  T rho = T(1);
  int num_iterations = 0;
  T regularization_weight = T(0);

  PdhgConfig(T sigma_, T tau_, T rho_, int iterations, T lambda,
             double op_norm_estimate)
      : sigma(sigma_), tau(tau_), rho(rho_), num_iterations(iterations),
        regularization_weight(lambda) {
    if (!(sigma > T(0)) || !(tau > T(0)))
      throw ConfigError("PdhgConfig: sigma and tau must be positive");
    if (rho < T(0) || rho > T(1))
      throw ConfigError("PdhgConfig: rho must lie in [0, 1]");
    if (num_iterations < 0)
      throw ConfigError("PdhgConfig: num_iterations must be nonnegative");
    if (lambda < T(0))
      throw ConfigError("PdhgConfig: regularization weight must be >= 0");
    const double prod = double(sigma) * double(tau) * op_norm_estimate * op_norm_estimate;
    if (prod > 1.0 + 1e-9)
      throw ConfigError("PdhgConfig: sigma*tau*||A||^2 exceeds 1");
  }

  // sigma = tau = 0.95 / ||A||, rho = 1.
  static PdhgConfig balanced(double op_norm_estimate, int iterations, T lambda,
                             T rho = T(1)) {
    const T st = static_cast<T>(0.95 / op_norm_estimate);
    return PdhgConfig(st, st, rho, iterations, lambda, op_norm_estimate);
  }
};

struct PdhgTracePoint {
  int iteration = 0;
  double objective = 0.0;
  double time_ms = 0.0;
};

template <typename T>
struct PdhgResult {
  Image<T> x;
  std::vector<PdhgTracePoint> trace;
};

// Runs the three PDHG update lines for cfg.num_iterations steps:
//   z    <- prox_{sigma D}(z + sigma A xbar)
//   x    <- prox_{tau R}(x - tau A^T z)
//   xbar <- x_new + rho (x_new - x_old)
// The trace records the objective 0.5||Ax - y||^2 + (lambda/2)||x||^2.
template <typename T>
PdhgResult<T> pdhg_solve(const Sinogram<T>& y, const ScanGeometry& g,
                         const PdhgConfig<T>& cfg, const ProxKind<T>& data_prox,
                         const ProxKind<T>& reg_prox, const Image<T>& x0,
                         const Sinogram<T>& z0) {
  if (y.num_angles != g.num_angles || y.num_detectors != g.num_detectors)
    throw ShapeError("pdhg_solve: measurement shape does not match geometry");
  if (x0.size != g.image_size)
    throw ShapeError("pdhg_solve: x0 size does not match geometry");
  if (z0.num_angles != g.num_angles || z0.num_detectors != g.num_detectors)
    throw ShapeError("pdhg_solve: z0 shape does not match geometry");

  const auto t_start = std::chrono::steady_clock::now();
  Image<T> x = x0;
  Image<T> xbar = x0;
  Sinogram<T> z = z0;
  Sinogram<T> ax(g.num_angles, g.num_detectors);
  Image<T> atz(g.image_size);

  PdhgResult<T> result;
  result.trace.reserve(cfg.num_iterations);

  for (int it = 1; it <= cfg.num_iterations; ++it) {
    // dual ascent step
    forward_project_raw<T>(g, xbar.flat(), ax.flat());
    for (size_t i = 0; i < z.values.size(); ++i)
      z.values[i] += cfg.sigma * ax.values[i];
    prox_eval_inplace<T>(data_prox, cfg.sigma, z.flat());

    // primal descent step
    back_project_raw<T>(g, z.flat(), atz.flat());
    Image<T> x_new = x;
    for (size_t i = 0; i < x_new.pixels.size(); ++i)
      x_new.pixels[i] -= cfg.tau * atz.pixels[i];
    prox_eval_inplace<T>(reg_prox, cfg.tau, x_new.flat());

    // extrapolation
    for (size_t i = 0; i < xbar.pixels.size(); ++i)
      xbar.pixels[i] = x_new.pixels[i] + cfg.rho * (x_new.pixels[i] - x.pixels[i]);
    x = std::move(x_new);

    if (!x.all_finite() || !z.all_finite())
      throw DivergenceError("pdhg_solve: non-finite iterate", it);

    forward_project_raw<T>(g, x.flat(), ax.flat());
    double data_term = 0.0;
    for (size_t i = 0; i < ax.values.size(); ++i) {
      const double r = double(ax.values[i]) - double(y.values[i]);
      data_term += r * r;
    }
    double reg_term = 0.0;
    for (const T v : x.pixels) reg_term += double(v) * double(v);
    const double obj = 0.5 * data_term +
                       0.5 * double(cfg.regularization_weight) * reg_term;
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
    result.trace.push_back({it, obj, ms});
  }

  result.x = std::move(x);
  return result;
}

}  // namespace ctkit
