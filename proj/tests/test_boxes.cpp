#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mono3d/boxes.hpp"

using namespace mono3d;

namespace {

ProjectionMatrix simple_p(double f) {
  return ProjectionMatrix({f, 0, 0, 0, 0, f, 0, 0, 0, 0, 1, 0});
}

// Independent rotation oracle: explicit R_y * offset + center.
CameraPoint rotate_oracle(const CameraPoint& center, double ry, double ox,
                          double oy, double oz) {
  const double c = std::cos(ry);
  const double s = std::sin(ry);
  return {center.x + c * ox + s * oz, center.y + oy, center.z - s * ox + c * oz};
}

double dist(const CameraPoint& a, const CameraPoint& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

}  // namespace

TEST_CASE("corners of an axis-aligned cube") {
  const Box3D box = {{0, 0, 10}, {2, 2, 2}, 0.0};
  const auto corners = corners_3d(box);
  for (const auto& c : corners) {
    CHECK(std::abs(std::abs(c.x) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(c.y) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(c.z - 10.0) - 1.0) < 1e-12);
  }
}

TEST_CASE("quarter turn swaps length and width extents") {
  const Box3D box = {{0, 0, 10}, {2, 4, 6}, M_PI / 2.0};
  const auto corners = corners_3d(box);
  double max_x = -1e9, max_z = -1e9;
  for (const auto& c : corners) {
    max_x = std::max(max_x, std::abs(c.x));
    max_z = std::max(max_z, std::abs(c.z - 10.0));
  }
  // L=6 along x becomes L along z; W=2 along z becomes W along x.
  CHECK(max_x == doctest::Approx(1.0));
  CHECK(max_z == doctest::Approx(3.0));
}

TEST_CASE("corners match the rotation-matrix oracle") {
  const Box3D box = {{1, 2, 3}, {2, 4, 6}, 0.3};
  const auto corners = corners_3d(box);
  const double lx[4] = {+3, -3, -3, +3};
  const double lz[4] = {+1, +1, -1, -1};
  for (int i = 0; i < 8; ++i) {
    const double oy = (i < 4) ? -2.0 : 2.0;
    const auto expect = rotate_oracle(box.center, box.ry, lx[i % 4], oy, lz[i % 4]);
    CHECK(dist(corners[i], expect) < 1e-12);
  }
}

TEST_CASE("rigid rotation preserves edge lengths") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> size(0.5, 4.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int i = 0; i < 500; ++i) {
    const Box3D box = {{0, 0, 20}, {size(rng), size(rng), size(rng)}, angle(rng)};
    const auto c = corners_3d(box);
    CHECK(dist(c[0], c[1]) == doctest::Approx(box.size.l).epsilon(1e-9));
    CHECK(dist(c[1], c[2]) == doctest::Approx(box.size.w).epsilon(1e-9));
    CHECK(dist(c[0], c[4]) == doctest::Approx(box.size.h).epsilon(1e-9));
  }
}

TEST_CASE("pcl endpoints") {
  const Box3D a = {{0, 0, 15}, {1, 1.5, 1}, 0.7};
  const auto [top, bottom] = pcl_endpoints(a);
  CHECK(top.y == doctest::Approx(-0.75));
  CHECK(bottom.y == doctest::Approx(0.75));
  CHECK(top.z == doctest::Approx(15.0));

  const Box3D b = {{2, 1, 30}, {1, 3, 1}, -2.1};
  const auto [t2, b2] = pcl_endpoints(b);
  CHECK(t2.x == doctest::Approx(2.0));
  CHECK(t2.y == doctest::Approx(-0.5));
  CHECK(b2.y == doctest::Approx(2.5));

  // Independent of yaw.
  const Box3D c = {{2, 1, 30}, {1, 3, 1}, 1.234};
  const auto [t3, b3] = pcl_endpoints(c);
  CHECK(dist(t2, t3) < 1e-15);
  CHECK(dist(b2, b3) < 1e-15);
}

TEST_CASE("visual height equals f*H/Z for zero-fourth-column P") {
  const auto P = simple_p(700.0);
  CHECK(visual_height(P, {{0, 0, 15}, {1, 1.5, 1}, 0}) == doctest::Approx(70.0));
  // Doubling Z halves h.
  CHECK(visual_height(P, {{0, 0, 30}, {1, 1.5, 1}, 0}) == doctest::Approx(35.0));
  // Off-axis center: PCL endpoints share Z so the offset cancels.
  CHECK(visual_height(P, {{5, -1, 20}, {1, 2, 1}, 0}) == doctest::Approx(70.0));
}

TEST_CASE("visual height property over random boxes") {
  ProjectionMatrix P({640, 0, 320, 0, 0, 655, 240, 0, 0, 0, 1, 0});
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> height(0.5, 4.0);
  std::uniform_real_distribution<double> depth(1.0, 100.0);
  std::uniform_real_distribution<double> lateral(-10.0, 10.0);
  for (int i = 0; i < 100000; ++i) {
    const Box3D box = {{lateral(rng), lateral(rng), depth(rng)},
                       {1.0, height(rng), 1.0},
                       0.0};
    const double h = visual_height(P, box);
    const double expect = P.focal_length() * box.size.h / box.center.z;
    CHECK(std::abs(h - expect) / expect < 1e-9);
  }
}

TEST_CASE("yaw encode/decode") {
  CHECK(yaw_decode(yaw_encode(0.0)) == doctest::Approx(0.0));
  const auto at_pi = yaw_encode(M_PI);
  CHECK(at_pi.sin_t == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_pi.cos_t == doctest::Approx(-1.0));
  CHECK(yaw_decode(at_pi) == doctest::Approx(M_PI));
  // Scale invariance of decode.
  CHECK(yaw_decode({0.6 * 3.7, 0.8 * 3.7}) == doctest::Approx(std::atan2(0.6, 0.8)));
  CHECK_THROWS_AS(yaw_decode({0.0, 0.0}), DegenerateEncoding);
}

TEST_CASE("yaw decode(encode) wraps into (-pi, pi]") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double theta = angle(rng);
    const double decoded = yaw_decode(yaw_encode(theta));
    CHECK(decoded > -M_PI - 1e-12);
    CHECK(decoded <= M_PI + 1e-12);
    CHECK(std::abs(decoded - wrap_angle(theta)) < 1e-12);
  }
}

TEST_CASE("alpha to ry conversion") {
  CHECK(alpha_to_ry(0.0, 0.0, 20.0) == doctest::Approx(0.0));
  CHECK(alpha_to_ry(0.5, 10.0, 10.0) == doctest::Approx(0.5 + M_PI / 4.0));
  CHECK(alpha_to_ry(3.0, 10.0, 10.0) ==
        doctest::Approx(3.0 + M_PI / 4.0 - 2.0 * M_PI));
  CHECK_THROWS_AS(alpha_to_ry(0.0, 1.0, 0.0), NonPositiveDepth);
  CHECK_THROWS_AS(ry_to_alpha(0.0, 1.0, -2.0), NonPositiveDepth);
}

TEST_CASE("alpha/ry round trip mod 2pi") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> lateral(-30.0, 30.0);
  std::uniform_real_distribution<double> depth(1.0, 80.0);
  for (int i = 0; i < 10000; ++i) {
    const double alpha = angle(rng);
    const double x = lateral(rng);
    const double z = depth(rng);
    const double back = ry_to_alpha(alpha_to_ry(alpha, x, z), x, z);
    CHECK(std::abs(wrap_angle(back - alpha)) < 1e-12);
  }
}
