#pragma once

#include <array>
#include <cmath>

#include "mono3d/errors.hpp"

namespace mono3d {

// Camera-frame point in meters: x right, y down, z forward.
struct CameraPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Image-plane point in pixels.
struct Keypoint {
  double u = 0.0;
  double v = 0.0;
};

struct PixelDepth {
  Keypoint kpt;
  double z;  // meters
};

// 3x4 pinhole projection matrix, canonically normalized at construction so
// that entry (2,2) equals 1 and the homogeneous depth component is metric
// depth. Immutable after construction.
class ProjectionMatrix {
 public:
  // Row-major 12 entries. Throws SingularProjection if the depth entry
  // (2,2) is zero and NonPositiveFocal if either focal entry is not
  // strictly positive after normalization.
  explicit ProjectionMatrix(const std::array<double, 12>& row_major);

  double at(int row, int col) const { return m_[row][col]; }

  // Vertical focal length f_y in pixels. This is the focal length relevant
  // to visual heights (vertical extents).
  double focal_length() const { return m_[1][1]; }

  double fx() const { return m_[0][0]; }
  double cx() const { return m_[0][2]; }
  double cy() const { return m_[1][2]; }

  std::array<double, 12> row_major() const;

 private:
  double m_[3][4];
};

// Projects a camera-frame point: returns the pixel keypoint and the
// homogeneous depth Z. Throws NonPositiveDepth if the depth component is
// not strictly positive.
PixelDepth project_to_pixel(const ProjectionMatrix& P, const CameraPoint& pt);

// Inverts project_to_pixel: solves P [x y z 1]^T = [u*Z, v*Z, Z]^T for the
// camera point. Handles a nonzero fourth column (stereo baseline term).
// Throws NonPositiveDepth if Z <= 0 and SingularProjection if the left 3x3
// block is not invertible.
CameraPoint backproject(const ProjectionMatrix& P, const Keypoint& kpt, double z);

}  // namespace mono3d
