// Dose-dependent measurement noise: Poisson counting statistics in the
// transmission domain, mapped back to line integrals by the log transform.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "ctkit/errors.hpp"
#include "ctkit/image.hpp"

namespace ctkit {

// Incident photon budget per detector bin. Clinical ~1e5, extreme low ~1e3.
struct DoseLevel {
  double incident_photons = 1e5;

  void validate() const {
    if (!(incident_photons > 0.0))
      throw ConfigError("DoseLevel: incident_photons must be positive");
  }

  static DoseLevel clinical() { return {1e5}; }
  static DoseLevel extreme_low() { return {1e3}; }
};

// counts ~ Poisson(I0 * exp(-y)), y_noisy = -ln(max(counts,1) / I0).
// Zero counts are clamped to one photon so the log stays finite.
template <typename T>
Sinogram<T> apply_dose_noise(const Sinogram<T>& y_clean, DoseLevel dose,
                             uint64_t seed) {
  dose.validate();
  if (!y_clean.all_finite())
    throw ConfigError("apply_dose_noise: input sinogram has non-finite values");

  const double i0 = dose.incident_photons;
  std::mt19937_64 rng(seed);
  Sinogram<T> out(y_clean.num_angles, y_clean.num_detectors);
  for (size_t i = 0; i < y_clean.values.size(); ++i) {
    const double mean = i0 * std::exp(-static_cast<double>(y_clean.values[i]));
    std::poisson_distribution<long long> poisson(mean);
    const long long counts = std::max<long long>(poisson(rng), 1);
    out.values[i] = static_cast<T>(-std::log(static_cast<double>(counts) / i0));
  }
  return out;
}

}  // namespace ctkit
