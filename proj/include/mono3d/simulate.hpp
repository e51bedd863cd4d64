#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mono3d/errors.hpp"

namespace mono3d {

// Scene generator configuration. Distance Z is drawn uniformly on
// [z_lo, z_hi) independently of the height class, so every class shares the
// same distance distribution.
struct SceneDistribution {
  double z_lo = 10.0;
  double z_hi = 50.0;
  struct HeightClass {
    double height;  // H, meters
    double weight;  // mixture weight, positive; weights sum to 1
  };
  std::vector<HeightClass> height_classes = {{1.5, 1.0}};
  double focal = 700.0;  // pixels
  std::uint64_t seed = 0;
};

// Relative (multiplicative) Gaussian noise on the two distance factors.
struct ErrorModel {
  double std_height = 0.0;  // relative std of the H perturbation
  double std_hrec = 0.0;    // relative std of the h_rec perturbation
  double rho = 0.0;         // correlation in [-1, 1]
};

struct SceneSample {
  std::size_t class_index;
  double height;  // H
  double z;
  double h_rec;   // Z / (f * H), so f * H * h_rec == Z exactly
};

// Draws n samples. Deterministic given (d.seed, shards): shard s uses an
// independent substream seeded from d.seed and s. Default single shard.
std::vector<SceneSample> sample_scene(const SceneDistribution& d, std::size_t n,
                                      int shards = 1);

struct ClassConsistency {
  std::size_t class_index;
  double height;
  std::size_t count;
  double mean_hrec;
  double residual;        // |H * mean(h_rec | class) - mean(Z) / f|
  double residual_bound;  // 3 * SE of the per-class H * h_rec estimate
};

struct ConsistencyReport {
  double mean_z_over_f;  // E[Z] / f
  std::vector<ClassConsistency> per_class;
  // max / min of H * E[h_rec | class] across classes; absent with one class.
  std::optional<double> cross_class_spread;
};

// Checks H * E[h_rec] = E[Z] / f per height class. Throws
// InsufficientSamples when a class has fewer than 2 samples.
ConsistencyReport expectation_consistency_check(
    std::span<const SceneSample> samples, double focal);

struct RobustnessResult {
  double rmse_correlated;
  double rmse_independent;
  // First-order predictions of the relative Z error std for each model.
  double predicted_rel_std_correlated;
  double predicted_rel_std_independent;
  double rms_z;  // sqrt(E[Z^2]) of the clean distances
};

// Perturbs H and h_rec with correlated vs independent relative Gaussian
// noise of equal marginals and compares the recovered-Z RMSE.
RobustnessResult self_consistency_experiment(const SceneDistribution& d,
                                             const ErrorModel& em, std::size_t n);

struct FitResult {
  double value;  // fitted location p
  double sigma;  // fitted uncertainty
  double loss;
  std::size_t steps_used;
};

// Gradient descent on sum_i |x_i - p| / sigma + n * lambda * ln(sigma) over
// (p, ln sigma). Converges toward p* = median, sigma* = mean|x_i - p*| / lambda.
// sigma is floored at 1e-6 so ln(sigma) stays finite on zero-residual data.
// Throws Divergence if the loss increases for 100 consecutive steps.
FitResult fit_uncertainty(std::span<const double> samples, double lambda,
                          std::size_t steps = 60000, double step_size = 0.2);

struct SigmaBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::optional<double> mean_sigma_height;
  std::optional<double> mean_sigma_hrec;
};

struct SigmaRecord {
  double z;
  double sigma_height;
  double sigma_hrec;
};

// Mean sigma per distance bin; edges as in distance_binned_error.
std::vector<SigmaBin> uncertainty_vs_distance_report(
    std::span<const SigmaRecord> records, std::span<const double> edges);

}  // namespace mono3d
