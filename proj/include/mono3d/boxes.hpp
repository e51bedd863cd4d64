#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "mono3d/camera.hpp"
#include "mono3d/errors.hpp"

namespace mono3d {

// Physical box size in meters.
struct PhysicalSize {
  double w = 0.0;
  double h = 0.0;
  double l = 0.0;

  bool valid() const { return w > 0.0 && h > 0.0 && l > 0.0; }
};

// (sin, cos) yaw encoding. Not necessarily normalized; decode is scale
// invariant.
struct YawEncoding {
  double sin_t = 0.0;
  double cos_t = 1.0;
};

// 3D bounding box with *geometric* center (not KITTI's bottom-face center)
// and egocentric yaw ry about the vertical axis, range (-pi, pi].
struct Box3D {
  CameraPoint center;
  PhysicalSize size;
  double ry = 0.0;
};

// Axis-aligned 2D pixel box, x1 < x2, y1 < y2.
struct Box2D {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

// The eight cuboid corners. Local offsets (+-L/2, +-H/2, +-W/2) are rotated
// about the y axis by ry and translated by the center. Order: top face
// (y = -H/2) starting at (+L/2, ., +W/2) counterclockwise seen from above,
// then the bottom face in the same x/z order.
std::array<CameraPoint, 8> corners_3d(const Box3D& box);

// Endpoints of the vertical line through the box center (top first, y-down
// frame). Its image projection is the PCL whose pixel length is the visual
// height.
std::pair<CameraPoint, CameraPoint> pcl_endpoints(const Box3D& box);

// Pixel length of the projected central line: v(bottom) - v(top).
double visual_height(const ProjectionMatrix& P, const Box3D& box);

YawEncoding yaw_encode(double theta);

// atan2(sin_t, cos_t); throws DegenerateEncoding when both are zero.
double yaw_decode(const YawEncoding& a);

// Allocentric observation angle alpha -> egocentric yaw, KITTI convention
// ry = alpha + atan2(x, z), wrapped into (-pi, pi].
double alpha_to_ry(double alpha, double x, double z);
double ry_to_alpha(double ry, double x, double z);

}  // namespace mono3d
