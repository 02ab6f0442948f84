// Filtered backprojection: frequency-domain ramp filtering of each detector
// row followed by the matched backprojector.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ctkit/errors.hpp"
#include "ctkit/fft.hpp"
#include "ctkit/geometry.hpp"
#include "ctkit/image.hpp"
#include "ctkit/projector.hpp"

namespace ctkit {

enum class FbpFilter { ram_lak, hann };

inline FbpFilter parse_fbp_filter(const std::string& name) {
  if (name == "ram_lak" || name == "ramlak" || name == "ramp")
    return FbpFilter::ram_lak;
  if (name == "hann") return FbpFilter::hann;
  throw ConfigError("unknown FBP filter: " + name);
}

// Ramp-filter each angle row of `y` in place of a new sinogram. Rows are
// zero-padded to the next power of two >= 2 * num_detectors to avoid
// circular-convolution wraparound. Frequencies are in cycles per physical
// detector unit, so the result folds the 1/detector_spacing factor in.
template <typename T>
Sinogram<T> ramp_filter(const Sinogram<T>& y, const ScanGeometry& g,
                        FbpFilter filter) {
  const int nd = g.num_detectors;
  const size_t pad = next_pow2(static_cast<size_t>(2 * nd));
  const double ds = g.detector_spacing;

  // |nu_k| (optionally Hann-apodized) for each DFT bin.
  std::vector<double> response(pad);
  for (size_t k = 0; k < pad; ++k) {
    const size_t mag = std::min(k, pad - k);
    double r = static_cast<double>(mag) / (static_cast<double>(pad) * ds);
    if (filter == FbpFilter::hann) {
      const double t = static_cast<double>(mag) / (static_cast<double>(pad) / 2.0);
      r *= 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }
    response[k] = r;
  }

  Sinogram<T> out(g.num_angles, nd);
  std::vector<std::complex<double>> buf(pad);
  for (int a = 0; a < g.num_angles; ++a) {
    auto row = y.row(a);
    for (int d = 0; d < nd; ++d) buf[d] = std::complex<double>(row[d], 0.0);
    for (size_t k = nd; k < pad; ++k) buf[k] = 0.0;
    fft_inplace(buf, false);
    for (size_t k = 0; k < pad; ++k) buf[k] *= response[k];
    fft_inplace(buf, true);
    auto out_row = out.row(a);
    for (int d = 0; d < nd; ++d) out_row[d] = static_cast<T>(buf[d].real());
  }
  return out;
}

template <typename T>
Image<T> fbp(const Sinogram<T>& y, const ScanGeometry& g,
             FbpFilter filter = FbpFilter::ram_lak) {
  if (y.num_angles != g.num_angles || y.num_detectors != g.num_detectors)
    throw ShapeError("fbp: sinogram shape does not match geometry");

  Sinogram<T> filtered = ramp_filter(y, g, filter);
  Image<T> x = back_project(filtered, g);

  // Angular Riemann weight times the A^T-to-sampling-backprojection factor
  // detector_spacing / pixel_size^2. Equals pi/num_angles (in sampling units)
  // for full-arc geometries.
  const double dtheta = (g.angle_end - g.angle_start) / g.num_angles;
  const double scale =
      dtheta * g.detector_spacing / (g.pixel_size * g.pixel_size);
  for (auto& p : x.pixels) p = static_cast<T>(p * scale);
  return x;
}

}  // namespace ctkit
