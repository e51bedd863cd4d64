#include "mono3d/boxes.hpp"

#include <cmath>

namespace mono3d {

double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * M_PI);  // [-pi, pi]
  if (w <= -M_PI) {
    w += 2.0 * M_PI;
  }
  return w;
}

std::array<CameraPoint, 8> corners_3d(const Box3D& box) {
  const double c = std::cos(box.ry);
  const double s = std::sin(box.ry);
  const double hl = box.size.l / 2.0;
  const double hh = box.size.h / 2.0;
  const double hw = box.size.w / 2.0;
  // Top face counterclockwise seen from above, then bottom face.
  const double lx[4] = {+hl, -hl, -hl, +hl};
  const double lz[4] = {+hw, +hw, -hw, -hw};
  std::array<CameraPoint, 8> out;
  for (int i = 0; i < 8; ++i) {
    const double ox = lx[i % 4];
    const double oz = lz[i % 4];
    const double oy = (i < 4) ? -hh : +hh;
    // R_y = [[c,0,s],[0,1,0],[-s,0,c]]
    out[i] = {box.center.x + c * ox + s * oz,
              box.center.y + oy,
              box.center.z - s * ox + c * oz};
  }
  return out;
}

std::pair<CameraPoint, CameraPoint> pcl_endpoints(const Box3D& box) {
  const double hh = box.size.h / 2.0;
  CameraPoint top = {box.center.x, box.center.y - hh, box.center.z};
  CameraPoint bottom = {box.center.x, box.center.y + hh, box.center.z};
  return {top, bottom};
}

double visual_height(const ProjectionMatrix& P, const Box3D& box) {
  const auto [top, bottom] = pcl_endpoints(box);
  const auto pt = project_to_pixel(P, top);
  const auto pb = project_to_pixel(P, bottom);
  return pb.kpt.v - pt.kpt.v;
}

YawEncoding yaw_encode(double theta) {
  return {std::sin(theta), std::cos(theta)};
}

double yaw_decode(const YawEncoding& a) {
  if (a.sin_t == 0.0 && a.cos_t == 0.0) {
    throw DegenerateEncoding("yaw encoding (0, 0) has no angle");
  }
  return std::atan2(a.sin_t, a.cos_t);
}

double alpha_to_ry(double alpha, double x, double z) {
  if (z <= 0.0) {
    throw NonPositiveDepth("alpha/ry conversion requires z > 0");
  }
  return wrap_angle(alpha + std::atan2(x, z));
}

double ry_to_alpha(double ry, double x, double z) {
  if (z <= 0.0) {
    throw NonPositiveDepth("alpha/ry conversion requires z > 0");
  }
  return wrap_angle(ry - std::atan2(x, z));
}

}  // namespace mono3d
