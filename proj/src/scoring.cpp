#include "mono3d/scoring.hpp"

#include <algorithm>

namespace mono3d {

double composite_confidence(double score, double focal, double height,
                            double sigma_hrec) {
  if (focal <= 0.0 || height <= 0.0 || sigma_hrec <= 0.0) {
    throw InvalidFactor("composite_confidence requires f, H, sigma_h_rec > 0");
  }
  return score / (focal * height * sigma_hrec);
}

std::vector<DetectionRecord> rank_detections(std::vector<DetectionRecord> dets,
                                             ScoreMode mode) {
  std::stable_sort(dets.begin(), dets.end(),
                   [mode](const DetectionRecord& a, const DetectionRecord& b) {
                     return ranking_key(a, mode) > ranking_key(b, mode);
                   });
  return dets;
}

}  // namespace mono3d
