#include "mono3d/camera.hpp"

#include <cmath>

namespace mono3d {

ProjectionMatrix::ProjectionMatrix(const std::array<double, 12>& row_major) {
  const double depth = row_major[10];  // entry (2,2)
  if (depth == 0.0 || !std::isfinite(depth)) {
    throw SingularProjection("projection matrix depth entry (2,2) is zero");
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      m_[r][c] = row_major[r * 4 + c] / depth;
    }
  }
  if (m_[0][0] <= 0.0 || m_[1][1] <= 0.0) {
    throw NonPositiveFocal("focal entries must be strictly positive");
  }
}

std::array<double, 12> ProjectionMatrix::row_major() const {
  std::array<double, 12> out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      out[r * 4 + c] = m_[r][c];
    }
  }
  return out;
}

PixelDepth project_to_pixel(const ProjectionMatrix& P, const CameraPoint& pt) {
  const double h[4] = {pt.x, pt.y, pt.z, 1.0};
  double v[3];
  for (int r = 0; r < 3; ++r) {
    v[r] = 0.0;
    for (int c = 0; c < 4; ++c) {
      v[r] += P.at(r, c) * h[c];
    }
  }
  if (v[2] <= 0.0) {
    throw NonPositiveDepth("point projects to non-positive depth");
  }
  return {{v[0] / v[2], v[1] / v[2]}, v[2]};
}

CameraPoint backproject(const ProjectionMatrix& P, const Keypoint& kpt, double z) {
  if (z <= 0.0) {
    throw NonPositiveDepth("backprojection requires Z > 0");
  }
  // Solve A x = b with A the left 3x3 block and the fourth column moved to
  // the right-hand side. 3x3 system, adjugate inverse.
  const double a00 = P.at(0, 0), a01 = P.at(0, 1), a02 = P.at(0, 2);
  const double a10 = P.at(1, 0), a11 = P.at(1, 1), a12 = P.at(1, 2);
  const double a20 = P.at(2, 0), a21 = P.at(2, 1), a22 = P.at(2, 2);
  const double b0 = kpt.u * z - P.at(0, 3);
  const double b1 = kpt.v * z - P.at(1, 3);
  const double b2 = z - P.at(2, 3);

  const double c00 = a11 * a22 - a12 * a21;
  const double c01 = a02 * a21 - a01 * a22;
  const double c02 = a01 * a12 - a02 * a11;
  const double c10 = a12 * a20 - a10 * a22;
  const double c11 = a00 * a22 - a02 * a20;
  const double c12 = a02 * a10 - a00 * a12;
  const double c20 = a10 * a21 - a11 * a20;
  const double c21 = a01 * a20 - a00 * a21;
  const double c22 = a00 * a11 - a01 * a10;

  const double det = a00 * c00 + a01 * c10 + a02 * c20;
  if (det == 0.0 || !std::isfinite(det)) {
    throw SingularProjection("left 3x3 block of projection matrix is singular");
  }
  return {(c00 * b0 + c01 * b1 + c02 * b2) / det,
          (c10 * b0 + c11 * b1 + c12 * b2) / det,
          (c20 * b0 + c21 * b1 + c22 * b2) / det};
}

}  // namespace mono3d
