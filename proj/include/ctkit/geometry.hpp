// Parallel-beam scan geometries for the six experimental settings.
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ctkit/errors.hpp"

namespace ctkit {

enum class GeometryKind { full, sparse, limited };

// Six-way grid: {full, sparse, limited} angles x {clinical, extreme} dose.
enum class ExperimentSetting {
  full_clinical,
  full_extreme,
  sparse_clinical,
  sparse_extreme,
  limited_clinical,
  limited_extreme,
};

inline GeometryKind geometry_kind(ExperimentSetting s) {
  switch (s) {
    case ExperimentSetting::full_clinical:
    case ExperimentSetting::full_extreme:
      return GeometryKind::full;
    case ExperimentSetting::sparse_clinical:
    case ExperimentSetting::sparse_extreme:
      return GeometryKind::sparse;
    case ExperimentSetting::limited_clinical:
    case ExperimentSetting::limited_extreme:
      return GeometryKind::limited;
  }
  throw ConfigError("unknown experiment setting");
}

inline bool extreme_dose(ExperimentSetting s) {
  return s == ExperimentSetting::full_extreme ||
         s == ExperimentSetting::sparse_extreme ||
         s == ExperimentSetting::limited_extreme;
}

inline const char* to_string(ExperimentSetting s) {
  switch (s) {
    case ExperimentSetting::full_clinical: return "full_clinical";
    case ExperimentSetting::full_extreme: return "full_extreme";
    case ExperimentSetting::sparse_clinical: return "sparse_clinical";
    case ExperimentSetting::sparse_extreme: return "sparse_extreme";
    case ExperimentSetting::limited_clinical: return "limited_clinical";
    case ExperimentSetting::limited_extreme: return "limited_extreme";
  }
  throw ConfigError("unknown experiment setting");
}

inline ExperimentSetting parse_setting(const std::string& name) {
  for (ExperimentSetting s : {ExperimentSetting::full_clinical,
                              ExperimentSetting::full_extreme,
                              ExperimentSetting::sparse_clinical,
                              ExperimentSetting::sparse_extreme,
                              ExperimentSetting::limited_clinical,
                              ExperimentSetting::limited_extreme}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown experiment setting: " + name);
}

inline std::vector<ExperimentSetting> all_settings() {
  return {ExperimentSetting::full_clinical,   ExperimentSetting::full_extreme,
          ExperimentSetting::sparse_clinical, ExperimentSetting::sparse_extreme,
          ExperimentSetting::limited_clinical, ExperimentSetting::limited_extreme};
}

// Defines the discrete forward operator A: angle set, detector layout and
// pixel grid. Angles are num_angles equispaced samples in
// [angle_start, angle_end). The image spans [-1, 1]^2 in physical units, so
// line integrals stay O(1) and the photon-count noise model behaves.
struct ScanGeometry {
  int num_angles = 0;
  double angle_start = 0.0;
  double angle_end = 0.0;
  int num_detectors = 0;
  double detector_spacing = 0.0;
  int image_size = 0;
  double pixel_size = 0.0;

  double angle(int i) const {
    return angle_start + (angle_end - angle_start) * i / num_angles;
  }

  std::vector<double> angles() const {
    std::vector<double> a(num_angles);
    for (int i = 0; i < num_angles; ++i) a[i] = angle(i);
    return a;
  }

  // Signed physical offset of a detector bin from the array center.
  double detector_position(int d) const {
    return (d - 0.5 * (num_detectors - 1)) * detector_spacing;
  }

  void validate() const {
    if (num_angles <= 0 || num_detectors <= 0 || image_size <= 0)
      throw ConfigError("geometry counts must be positive");
    if (detector_spacing <= 0 || pixel_size <= 0)
      throw ConfigError("geometry spacings must be positive");
    if (!(angle_start < angle_end) ||
        angle_end > angle_start + std::numbers::pi + 1e-12)
      throw ConfigError("angle range must satisfy start < end <= start + pi");
    const double diagonal = image_size * pixel_size * std::numbers::sqrt2;
    if (num_detectors * detector_spacing < diagonal - 1e-9)
      throw ConfigError("detector array does not cover the image diagonal");
  }

  bool operator==(const ScanGeometry&) const = default;
};

// Defaults: full = 180 angles over [0, pi), sparse = 45 angles over [0, pi),
// limited = 60 angles over [0, pi/3). Detector row covers the image diagonal
// at pixel pitch.
inline ScanGeometry make_geometry(GeometryKind kind, int image_size) {
  if (image_size < 16) throw ConfigError("image_size must be >= 16");
  ScanGeometry g;
  g.image_size = image_size;
  g.pixel_size = 2.0 / image_size;
  g.detector_spacing = g.pixel_size;
  g.num_detectors =
      static_cast<int>(std::ceil(image_size * std::numbers::sqrt2));
  switch (kind) {
    case GeometryKind::full:
      g.num_angles = 180;
      g.angle_start = 0.0;
      g.angle_end = std::numbers::pi;
      break;
    case GeometryKind::sparse:
      g.num_angles = 45;
      g.angle_start = 0.0;
      g.angle_end = std::numbers::pi;
      break;
    case GeometryKind::limited:
      g.num_angles = 60;
      g.angle_start = 0.0;
      g.angle_end = std::numbers::pi / 3.0;
      break;
    default:
      throw ConfigError("unknown geometry kind");
  }
  g.validate();
  return g;
}

inline ScanGeometry make_geometry(ExperimentSetting s, int image_size) {
  return make_geometry(geometry_kind(s), image_size);
}

}  // namespace ctkit
