// Compares the OpenMP batch kernels against their serial references.
// Usage: bench_kernels [n_pairs] [n_samples]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "mono3d/eval.hpp"
#include "mono3d/parallel.hpp"
#include "mono3d/simulate.hpp"

using namespace mono3d;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_pairs = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const std::size_t n_samples =
      argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 4000000;

  std::printf("threads: %d\n", max_threads());

  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> ext(0.5, 4.0);
  std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
  std::vector<BoxPair> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    pairs.emplace_back(
        Box3D{{pos(rng), 0, 10 + pos(rng)}, {ext(rng), 1, ext(rng)}, ang(rng)},
        Box3D{{pos(rng), 0, 10 + pos(rng)}, {ext(rng), 1, ext(rng)}, ang(rng)});
  }

  auto t0 = std::chrono::steady_clock::now();
  const auto serial_iou = serial::bev_iou_batch(pairs);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel_iou = bev_iou_batch(pairs);
  const double t_parallel = seconds_since(t0);

  if (serial_iou != parallel_iou) {
    std::printf("ERROR: parallel bev_iou_batch differs from serial reference\n");
    return 1;
  }
  std::printf("bev_iou_batch   n=%zu  serial %.3fs  parallel %.3fs  speedup %.2fx\n",
              n_pairs, t_serial, t_parallel, t_serial / t_parallel);

  SceneDistribution dist;
  dist.height_classes = {{1.5, 0.5}, {3.0, 0.5}};
  dist.seed = 99;

  t0 = std::chrono::steady_clock::now();
  const auto single = sample_scene(dist, n_samples, 1);
  const double t_one = seconds_since(t0);

  const int shards = std::max(1, max_threads());
  t0 = std::chrono::steady_clock::now();
  const auto sharded = sample_scene(dist, n_samples, shards);
  const double t_sharded = seconds_since(t0);
  std::printf("sample_scene    n=%zu  1 shard %.3fs  %d shards %.3fs\n",
              n_samples, t_one, shards, t_sharded);
  // Streams differ across shard counts; sizes must not.
  if (single.size() != sharded.size()) {
    std::printf("ERROR: shard split lost samples\n");
    return 1;
  }
  return 0;
}
