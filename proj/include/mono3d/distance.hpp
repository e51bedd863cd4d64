#pragma once

#include "mono3d/camera.hpp"
#include "mono3d/errors.hpp"

namespace mono3d {

// The two regressed distance factors: physical height H (meters) and the
// reciprocal projected visual height h_rec (1/pixels). h_rec rather than h
// is stored because h_rec is the regression target; conversion to h happens
// only at display boundaries.
struct DistanceFactors {
  double height = 0.0;  // H, meters
  double h_rec = 0.0;   // 1/h, 1/pixels
};

// Z = f * H * h_rec. Throws InvalidFactor on any non-positive input.
inline double recover_distance(double focal, const DistanceFactors& factors) {
  if (focal <= 0.0 || factors.height <= 0.0 || factors.h_rec <= 0.0) {
    throw InvalidFactor("recover_distance requires f, H, h_rec > 0");
  }
  return focal * factors.height * factors.h_rec;
}

// Inverse of recover_distance: h_rec = Z / (f * H).
inline DistanceFactors decompose_distance(double focal, double height, double z) {
  if (focal <= 0.0 || height <= 0.0 || z <= 0.0) {
    throw InvalidFactor("decompose_distance requires f, H, Z > 0");
  }
  return {height, z / (focal * height)};
}

// Full inference path: recover Z from the factors, then backproject the
// projected center keypoint to a camera-frame point.
inline CameraPoint recover_center(const ProjectionMatrix& P, const Keypoint& p,
                                  const DistanceFactors& factors) {
  const double z = recover_distance(P.focal_length(), factors);
  return backproject(P, p, z);
}

}  // namespace mono3d
