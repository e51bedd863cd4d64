#include <doctest.h>

#include <random>
#include <vector>

#include "mono3d/scoring.hpp"

using namespace mono3d;

namespace {

DetectionRecord make_det(double score, double sigma_hrec, double height = 1.5,
                         double focal = 700.0) {
  DetectionRecord d;
  d.cls = "Car";
  d.score = score;
  d.factors = {height, 0.01};
  d.sigma_hrec = sigma_hrec;
  d.sigma_height = 0.1;
  d.focal = focal;
  return d;
}

std::vector<std::size_t> argsort(const std::vector<DetectionRecord>& dets,
                                 ScoreMode mode) {
  std::vector<std::size_t> idx(dets.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ranking_key(dets[a], mode) > ranking_key(dets[b], mode);
  });
  return idx;
}

}  // namespace

TEST_CASE("composite_confidence examples") {
  CHECK(composite_confidence(0.9, 700.0, 1.5, 0.002) ==
        doctest::Approx(0.9 / 2.1));
  // Halving sigma doubles the confidence.
  CHECK(composite_confidence(0.9, 700.0, 1.5, 0.001) ==
        doctest::Approx(2.0 * composite_confidence(0.9, 700.0, 1.5, 0.002)));
  CHECK(composite_confidence(0.0, 700.0, 1.5, 0.002) == doctest::Approx(0.0));
  CHECK_THROWS_AS(composite_confidence(0.9, 0.0, 1.5, 0.002), InvalidFactor);
  CHECK_THROWS_AS(composite_confidence(0.9, 700.0, 1.5, 0.0), InvalidFactor);
}

TEST_CASE("composite mode prefers lower sigma at equal score") {
  std::vector<DetectionRecord> dets = {make_det(0.8, 0.004), make_det(0.8, 0.002)};
  const auto ranked = rank_detections(dets, ScoreMode::kComposite);
  CHECK(ranked[0].sigma_hrec == doctest::Approx(0.002));

  // Raw-score mode ignores sigma: stable order kept on the tie.
  const auto raw = rank_detections(dets, ScoreMode::kRawScore);
  CHECK(raw[0].sigma_hrec == doctest::Approx(0.004));
}

TEST_CASE("rank_detections is a stable permutation") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_real_distribution<double> sigma(0.001, 0.01);
  std::vector<DetectionRecord> dets;
  for (int i = 0; i < 50; ++i) {
    dets.push_back(make_det(score(rng), sigma(rng)));
  }
  const auto ranked = rank_detections(dets, ScoreMode::kComposite);
  CHECK(ranked.size() == dets.size());
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK(ranking_key(ranked[i - 1], ScoreMode::kComposite) >=
          ranking_key(ranked[i], ScoreMode::kComposite));
  }
}

TEST_CASE("composite argsort invariant under global sigma scaling") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_real_distribution<double> sigma(0.001, 0.01);
  std::uniform_real_distribution<double> height(1.2, 2.2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DetectionRecord> dets;
    for (int i = 0; i < 30; ++i) {
      dets.push_back(make_det(score(rng), sigma(rng), height(rng)));
    }
    std::vector<DetectionRecord> scaled = dets;
    for (auto& d : scaled) {
      d.sigma_hrec *= 7.3;
    }
    CHECK(argsort(dets, ScoreMode::kComposite) ==
          argsort(scaled, ScoreMode::kComposite));
  }
}

TEST_CASE("identical (f,H,sigma) reduces composite order to score order") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<DetectionRecord> dets;
  for (int i = 0; i < 40; ++i) {
    dets.push_back(make_det(score(rng), 0.003));
  }
  CHECK(argsort(dets, ScoreMode::kComposite) == argsort(dets, ScoreMode::kRawScore));
}
