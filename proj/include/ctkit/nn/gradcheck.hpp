// Central finite-difference gradient checker, the oracle the layer and model
// backward passes are verified against.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ctkit/errors.hpp"

namespace ctkit {

// f must be a pure scalar function of the flat vector x. Compares the
// analytic gradient against (f(x+h e_i) - f(x-h e_i)) / 2h per coordinate and
// returns the maximum relative error, with the denominator floored to avoid
// blowups at near-zero entries.
template <typename T, typename F>
double finite_diff_max_rel_error(F&& f, std::vector<T>& x,
                                 std::span<const T> analytic_grad, T h,
                                 double denom_floor = 1e-6) {
  if (!(h > T(0)))
    throw ConfigError("finite_diff_max_rel_error: step h must be positive");
  if (x.size() != analytic_grad.size())
    throw ShapeError("finite_diff_max_rel_error: gradient length mismatch");

  double max_rel = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const T orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    const double fd = (fp - fm) / (2.0 * double(h));
    const double an = double(analytic_grad[i]);
    const double denom = std::max({std::abs(fd), std::abs(an), denom_floor});
    max_rel = std::max(max_rel, std::abs(fd - an) / denom);
  }
  return max_rel;
}

}  // namespace ctkit
