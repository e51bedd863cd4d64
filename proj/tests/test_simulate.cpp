#include <doctest.h>

#include <cmath>
#include <vector>

#include "mono3d/simulate.hpp"

using namespace mono3d;

namespace {

SceneDistribution two_class_scene(std::uint64_t seed = 5) {
  SceneDistribution d;
  d.z_lo = 10.0;
  d.z_hi = 50.0;
  d.focal = 700.0;
  d.height_classes = {{1.5, 0.5}, {3.0, 0.5}};
  d.seed = seed;
  return d;
}

}  // namespace

TEST_CASE("sampling is deterministic and satisfies the construction identity") {
  const auto d = two_class_scene();
  const auto a = sample_scene(d, 1000);
  const auto b = sample_scene(d, 1000);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].z == b[i].z);
    CHECK(a[i].h_rec == b[i].h_rec);
    CHECK(a[i].height * a[i].h_rec * d.focal == doctest::Approx(a[i].z).epsilon(1e-15));
  }
  // Different seed, different stream.
  auto d2 = d;
  d2.seed = 6;
  const auto c = sample_scene(d2, 1000);
  CHECK(c[0].z != a[0].z);
}

TEST_CASE("sharded sampling is deterministic per shard count") {
  const auto d = two_class_scene();
  const auto a = sample_scene(d, 1000, 4);
  const auto b = sample_scene(d, 1000, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].z == b[i].z);
    CHECK(a[i].class_index == b[i].class_index);
  }
}

TEST_CASE("empirical mean distance matches the distribution") {
  const auto d = two_class_scene(17);
  const auto samples = sample_scene(d, 100000);
  double sum = 0.0;
  for (const auto& s : samples) sum += s.z;
  const double mean = sum / samples.size();
  // U[10,50]: mean 30, std ~11.55; 3 SE bound.
  const double se = (50.0 - 10.0) / std::sqrt(12.0) / std::sqrt(100000.0);
  CHECK(std::abs(mean - 30.0) < 3.0 * se);
}

TEST_CASE("scene validation") {
  auto d = two_class_scene();
  d.height_classes = {{1.5, 0.7}, {3.0, 0.7}};  // weights do not sum to 1
  CHECK_THROWS_AS(sample_scene(d, 10), InvalidFactor);
  d = two_class_scene();
  d.z_lo = -1.0;
  CHECK_THROWS_AS(sample_scene(d, 10), InvalidFactor);
}

TEST_CASE("expectation consistency across height classes") {
  const auto d = two_class_scene(23);
  const auto samples = sample_scene(d, 200000);
  const auto report = expectation_consistency_check(samples, d.focal);
  REQUIRE(report.per_class.size() == 2);
  for (const auto& c : report.per_class) {
    CHECK(c.residual < c.residual_bound);
  }
  // E[h_rec] halves when H doubles.
  const double ratio = report.per_class[0].mean_hrec / report.per_class[1].mean_hrec;
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.02));
  CHECK(report.cross_class_spread.has_value());
}

TEST_CASE("single-class input skips the cross-class check") {
  SceneDistribution d = two_class_scene();
  d.height_classes = {{1.5, 1.0}};
  const auto samples = sample_scene(d, 1000);
  const auto report = expectation_consistency_check(samples, d.focal);
  CHECK(report.per_class.size() == 1);
  CHECK_FALSE(report.cross_class_spread.has_value());
}

TEST_CASE("consistency check rejects degenerate input") {
  CHECK_THROWS_AS(expectation_consistency_check({}, 700.0), InsufficientSamples);
}

TEST_CASE("zero correlation gives matching RMSEs") {
  const auto d = two_class_scene(29);
  ErrorModel em{0.05, 0.05, 0.0};
  const auto r = self_consistency_experiment(d, em, 200000);
  CHECK(r.predicted_rel_std_correlated ==
        doctest::Approx(r.predicted_rel_std_independent));
  CHECK(r.rmse_correlated ==
        doctest::Approx(r.rmse_independent).epsilon(0.02));
}

TEST_CASE("negative correlation lowers the recovered-distance RMSE") {
  const auto d = two_class_scene(31);
  ErrorModel em{0.05, 0.05, -0.472};
  const auto r = self_consistency_experiment(d, em, 200000);
  CHECK(r.rmse_correlated < r.rmse_independent);
  CHECK(r.rmse_correlated ==
        doctest::Approx(r.predicted_rel_std_correlated * r.rms_z).epsilon(0.05));
}

TEST_CASE("rho=+1 variance follows first-order propagation") {
  const auto d = two_class_scene(37);
  ErrorModel em{0.01, 0.01, 1.0};
  const auto r = self_consistency_experiment(d, em, 200000);
  // (s1+s2)^2 vs s1^2+s2^2: rmse ratio sqrt(2).
  CHECK(r.rmse_correlated / r.rmse_independent ==
        doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("fit_uncertainty reaches the closed-form stationary point") {
  const std::vector<double> samples = {0, 1, 2, 3, 4};
  const auto fit = fit_uncertainty(samples, 1.0);
  CHECK(fit.value == doctest::Approx(2.0).epsilon(0.01));
  CHECK(fit.sigma == doctest::Approx(1.2).epsilon(0.01));

  // lambda = 0.25 quadruples sigma*.
  const auto fit4 = fit_uncertainty(samples, 0.25);
  CHECK(fit4.sigma == doctest::Approx(4.8).epsilon(0.01));
}

TEST_CASE("fit_uncertainty on constant data hits the sigma floor") {
  const std::vector<double> samples = {3.0, 3.0, 3.0, 3.0};
  const auto fit = fit_uncertainty(samples, 1.0);
  CHECK(fit.value == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(fit.sigma == doctest::Approx(1e-6));
}

TEST_CASE("fit_uncertainty input validation") {
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(fit_uncertainty(one, 1.0), InsufficientSamples);
  const std::vector<double> ok = {1.0, 2.0};
  CHECK_THROWS_AS(fit_uncertainty(ok, 0.0), InvalidFactor);
}

TEST_CASE("uncertainty vs distance binning") {
  const std::vector<double> edges = {0, 20, 40};
  {
    // Constant sigma: flat profile.
    std::vector<SigmaRecord> recs;
    for (double z = 5; z < 60; z += 5) recs.push_back({z, 0.1, 0.01});
    const auto bins = uncertainty_vs_distance_report(recs, edges);
    for (const auto& b : bins) {
      if (b.count > 0) {
        CHECK(*b.mean_sigma_height == doctest::Approx(0.1));
        CHECK(*b.mean_sigma_hrec == doctest::Approx(0.01));
      }
    }
  }
  {
    // Sigma proportional to Z: monotone bin means.
    std::vector<SigmaRecord> recs;
    for (double z = 5; z < 60; z += 1) recs.push_back({z, 0.0, 0.001 * z});
    const auto bins = uncertainty_vs_distance_report(recs, edges);
    REQUIRE(bins.size() == 3);
    CHECK(*bins[0].mean_sigma_hrec < *bins[1].mean_sigma_hrec);
    CHECK(*bins[1].mean_sigma_hrec < *bins[2].mean_sigma_hrec);
  }
  {
    // Empty bin reports count 0 and no mean.
    const std::vector<SigmaRecord> recs = {{50, 0.1, 0.01}};
    const auto bins = uncertainty_vs_distance_report(recs, edges);
    CHECK(bins[0].count == 0);
    CHECK_FALSE(bins[0].mean_sigma_height.has_value());
  }
}
