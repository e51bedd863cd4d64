#include <doctest.h>

#include <cmath>
#include <random>

#include "mono3d/distance.hpp"

using namespace mono3d;

TEST_CASE("recover_distance examples") {
  CHECK(recover_distance(700.0, {1.5, 1.0 / 70.0}) == doctest::Approx(15.0));
  CHECK(recover_distance(1.0, {1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(recover_distance(721.5, {1.53, 0.02}) == doctest::Approx(22.0779));
  CHECK_THROWS_AS(recover_distance(0.0, {1.5, 0.01}), InvalidFactor);
  CHECK_THROWS_AS(recover_distance(700.0, {-1.5, 0.01}), InvalidFactor);
  CHECK_THROWS_AS(recover_distance(700.0, {1.5, 0.0}), InvalidFactor);
}

TEST_CASE("decompose_distance examples") {
  const auto f = decompose_distance(700.0, 1.5, 15.0);
  CHECK(f.h_rec == doctest::Approx(1.0 / 70.0));
  CHECK_THROWS_AS(decompose_distance(700.0, 1.5, 0.0), InvalidFactor);
}

TEST_CASE("recover(decompose) round trip") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> focal(100.0, 2000.0);
  std::uniform_real_distribution<double> height(0.5, 4.0);
  std::uniform_real_distribution<double> depth(1.0, 200.0);
  for (int i = 0; i < 100000; ++i) {
    const double f = focal(rng);
    const double h = height(rng);
    const double z = depth(rng);
    const double back = recover_distance(f, decompose_distance(f, h, z));
    CHECK(std::abs(back - z) / z < 1e-12);
  }
}

TEST_CASE("focal decoupling across cameras") {
  // Same object, two cameras: h_rec scales by f1/f2 but Z is identical.
  const double h = 1.6;
  const double z = 33.0;
  const auto f1 = decompose_distance(700.0, h, z);
  const auto f2 = decompose_distance(1400.0, h, z);
  CHECK(f1.h_rec / f2.h_rec == doctest::Approx(2.0));
  CHECK(recover_distance(700.0, f1) == doctest::Approx(recover_distance(1400.0, f2)));
}

TEST_CASE("recover_distance is strictly increasing in each factor") {
  const double base = recover_distance(700.0, {1.5, 0.01});
  CHECK(recover_distance(701.0, {1.5, 0.01}) > base);
  CHECK(recover_distance(700.0, {1.6, 0.01}) > base);
  CHECK(recover_distance(700.0, {1.5, 0.011}) > base);
}

TEST_CASE("recover_center composes the inference path") {
  ProjectionMatrix P({700, 0, 0, 0, 0, 700, 0, 0, 0, 0, 1, 0});
  const auto on_axis = recover_center(P, {0, 0}, {1.5, 1.0 / 70.0});
  CHECK(on_axis.x == doctest::Approx(0.0));
  CHECK(on_axis.y == doctest::Approx(0.0));
  CHECK(on_axis.z == doctest::Approx(15.0));

  const auto off_axis = recover_center(P, {70, 0}, {1.5, 1.0 / 70.0});
  CHECK(off_axis.x == doctest::Approx(1.5));
  CHECK(off_axis.z == doctest::Approx(15.0));
}

TEST_CASE("recover_center with KITTI-style P matches the projection") {
  // Principal point and baseline term; verified against project_to_pixel.
  ProjectionMatrix P({721.5, 0, 609.6, 44.857, 0, 721.5, 172.8, 0.216, 0, 0, 1, 0});
  const CameraPoint truth = {2.3, 0.8, 27.5};
  const auto [kpt, z] = project_to_pixel(P, truth);
  const auto factors = decompose_distance(P.focal_length(), 1.7, z);
  const auto back = recover_center(P, kpt, factors);
  CHECK(back.x == doctest::Approx(truth.x).epsilon(1e-9));
  CHECK(back.y == doctest::Approx(truth.y).epsilon(1e-9));
  CHECK(back.z == doctest::Approx(truth.z).epsilon(1e-9));
}
