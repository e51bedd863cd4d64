#include "mono3d/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mono3d {

namespace {

// splitmix64; decorrelates shard substreams derived from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t shard) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (shard + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void validate(const SceneDistribution& d) {
  if (d.z_lo <= 0.0 || d.z_hi <= d.z_lo) {
    throw InvalidFactor("scene distance support must satisfy 0 < z_lo < z_hi");
  }
  if (d.focal <= 0.0) {
    throw InvalidFactor("scene focal length must be positive");
  }
  if (d.height_classes.empty()) {
    throw InvalidFactor("scene needs at least one height class");
  }
  double wsum = 0.0;
  for (const auto& hc : d.height_classes) {
    if (hc.height <= 0.0 || hc.weight <= 0.0) {
      throw InvalidFactor("height classes must have positive height and weight");
    }
    wsum += hc.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw InvalidFactor("height class weights must sum to 1");
  }
}

}  // namespace

std::vector<SceneSample> sample_scene(const SceneDistribution& d, std::size_t n,
                                      int shards) {
  validate(d);
  if (shards < 1) {
    shards = 1;
  }
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& hc : d.height_classes) {
    acc += hc.weight;
    cumulative.push_back(acc);
  }
  cumulative.back() = 1.0;

  std::vector<SceneSample> samples(n);
  for (int s = 0; s < shards; ++s) {
    const std::size_t begin = n * static_cast<std::size_t>(s) / shards;
    const std::size_t end = n * (static_cast<std::size_t>(s) + 1) / shards;
    std::mt19937_64 rng(mix_seed(d.seed, static_cast<std::uint64_t>(s)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> z_dist(d.z_lo, d.z_hi);
    for (std::size_t i = begin; i < end; ++i) {
      const double u = unit(rng);
      const std::size_t cls =
          std::lower_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin();
      const double height = d.height_classes[cls].height;
      const double z = z_dist(rng);
      samples[i] = {cls, height, z, z / (d.focal * height)};
    }
  }
  return samples;
}

ConsistencyReport expectation_consistency_check(
    std::span<const SceneSample> samples, double focal) {
  if (samples.size() < 2) {
    throw InsufficientSamples("consistency check needs at least 2 samples");
  }
  if (focal <= 0.0) {
    throw InvalidFactor("focal length must be positive");
  }

  double sum_z = 0.0;
  double sum_z2 = 0.0;
  for (const auto& s : samples) {
    sum_z += s.z;
    sum_z2 += s.z * s.z;
  }
  const double n = static_cast<double>(samples.size());
  const double mean_z = sum_z / n;
  const double var_z = std::max(0.0, sum_z2 / n - mean_z * mean_z);

  // Per-class accumulation, keyed by class index.
  std::size_t max_cls = 0;
  for (const auto& s : samples) {
    max_cls = std::max(max_cls, s.class_index);
  }
  struct Acc {
    std::size_t count = 0;
    double height = 0.0;
    double sum = 0.0;
    double sum2 = 0.0;
  };
  std::vector<Acc> accs(max_cls + 1);
  for (const auto& s : samples) {
    auto& a = accs[s.class_index];
    ++a.count;
    a.height = s.height;
    a.sum += s.h_rec;
    a.sum2 += s.h_rec * s.h_rec;
  }

  ConsistencyReport report;
  report.mean_z_over_f = mean_z / focal;
  double product_min = 0.0;
  double product_max = 0.0;
  bool first = true;
  for (std::size_t c = 0; c < accs.size(); ++c) {
    const auto& a = accs[c];
    if (a.count == 0) {
      continue;
    }
    if (a.count < 2) {
      throw InsufficientSamples("height class " + std::to_string(c) +
                                " has fewer than 2 samples");
    }
    const double nc = static_cast<double>(a.count);
    const double mean_hrec = a.sum / nc;
    const double var_hrec = std::max(0.0, a.sum2 / nc - mean_hrec * mean_hrec);
    const double product = a.height * mean_hrec;
    const double se = std::sqrt(a.height * a.height * var_hrec / nc +
                                var_z / (focal * focal * n));
    report.per_class.push_back({c, a.height, a.count, mean_hrec,
                                std::abs(product - report.mean_z_over_f),
                                3.0 * se});
    product_min = first ? product : std::min(product_min, product);
    product_max = first ? product : std::max(product_max, product);
    first = false;
  }
  if (report.per_class.size() >= 2) {
    report.cross_class_spread = product_max - product_min;
  }
  return report;
}

RobustnessResult self_consistency_experiment(const SceneDistribution& d,
                                             const ErrorModel& em, std::size_t n) {
  if (std::abs(em.rho) > 1.0 || em.std_height < 0.0 || em.std_hrec < 0.0) {
    throw InvalidFactor("error model needs |rho| <= 1 and non-negative stds");
  }
  const auto samples = sample_scene(d, n);
  std::mt19937_64 rng(mix_seed(d.seed, 0xC0FFEEULL));
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Cholesky of the 2x2 correlation matrix: e2 = rho*g1 + sqrt(1-rho^2)*g2.
  const double chol = std::sqrt(std::max(0.0, 1.0 - em.rho * em.rho));

  double sq_corr = 0.0;
  double sq_ind = 0.0;
  double sq_z = 0.0;
  for (const auto& s : samples) {
    const double g1 = gauss(rng);
    const double g2 = gauss(rng);
    const double g3 = gauss(rng);
    const double g4 = gauss(rng);

    const double e1 = g1;
    const double e2 = em.rho * g1 + chol * g2;
    const double h_c = s.height * (1.0 + em.std_height * e1);
    const double r_c = s.h_rec * (1.0 + em.std_hrec * e2);
    const double z_c = d.focal * h_c * r_c;

    const double h_i = s.height * (1.0 + em.std_height * g3);
    const double r_i = s.h_rec * (1.0 + em.std_hrec * g4);
    const double z_i = d.focal * h_i * r_i;

    sq_corr += (z_c - s.z) * (z_c - s.z);
    sq_ind += (z_i - s.z) * (z_i - s.z);
    sq_z += s.z * s.z;
  }
  const double nn = static_cast<double>(n);
  RobustnessResult result;
  result.rmse_correlated = std::sqrt(sq_corr / nn);
  result.rmse_independent = std::sqrt(sq_ind / nn);
  result.rms_z = std::sqrt(sq_z / nn);
  const double var_ind =
      em.std_height * em.std_height + em.std_hrec * em.std_hrec;
  result.predicted_rel_std_independent = std::sqrt(var_ind);
  result.predicted_rel_std_correlated =
      std::sqrt(std::max(0.0, var_ind + 2.0 * em.rho * em.std_height * em.std_hrec));
  return result;
}

FitResult fit_uncertainty(std::span<const double> samples, double lambda,
                          std::size_t steps, double step_size) {
  if (lambda <= 0.0) {
    throw InvalidFactor("fit_uncertainty requires lambda > 0");
  }
  if (samples.size() < 2) {
    throw InsufficientSamples("fit_uncertainty needs at least 2 samples");
  }
  constexpr double kSigmaFloor = 1e-6;
  const double log_floor = std::log(kSigmaFloor);
  const double n = static_cast<double>(samples.size());

  double p = 0.0;
  for (double x : samples) {
    p += x;
  }
  p /= n;
  double u = 0.0;  // ln sigma

  auto loss_at = [&](double p_, double u_) {
    const double sigma = std::exp(u_);
    double acc = 0.0;
    for (double x : samples) {
      acc += std::abs(x - p_);
    }
    return acc / sigma + n * lambda * u_;
  };

  double prev_loss = loss_at(p, u);
  int rising = 0;
  std::size_t t = 0;
  for (; t < steps; ++t) {
    const double sigma = std::exp(u);
    double sign_sum = 0.0;
    double abs_sum = 0.0;
    for (double x : samples) {
      const double r = p - x;
      sign_sum += (r > 0.0) ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
      abs_sum += std::abs(r);
    }
    // Mean gradients of the per-sample loss w.r.t. (p, ln sigma).
    const double gp = sign_sum / (n * sigma);
    const double gu = -abs_sum / (n * sigma) + lambda;
    const double lr = step_size / std::sqrt(1.0 + static_cast<double>(t));
    p -= lr * gp * sigma;  // scale by sigma: keeps the p step in data units
    u -= lr * gu;
    u = std::max(u, log_floor);

    const double loss = loss_at(p, u);
    if (loss > prev_loss + 1e-15) {
      if (++rising >= 100) {
        throw Divergence("fit_uncertainty: loss increased for 100 consecutive steps");
      }
    } else {
      rising = 0;
    }
    prev_loss = loss;
  }
  return {p, std::exp(u), prev_loss, t};
}

std::vector<SigmaBin> uncertainty_vs_distance_report(
    std::span<const SigmaRecord> records, std::span<const double> edges) {
  std::vector<SigmaBin> bins;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    bins.push_back({edges[i], i + 1 < edges.size() ? edges[i + 1] : inf, 0, {}, {}});
  }
  std::vector<double> sum_h(bins.size(), 0.0);
  std::vector<double> sum_r(bins.size(), 0.0);
  for (const auto& rec : records) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (rec.z >= bins[i].lo && rec.z < bins[i].hi) {
        sum_h[i] += rec.sigma_height;
        sum_r[i] += rec.sigma_hrec;
        ++bins[i].count;
      }
    }
  }
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i].count > 0) {
      const double c = static_cast<double>(bins[i].count);
      bins[i].mean_sigma_height = sum_h[i] / c;
      bins[i].mean_sigma_hrec = sum_r[i] / c;
    }
  }
  return bins;
}

}  // namespace mono3d
