#pragma once

#include <string>
#include <vector>

#include "mono3d/boxes.hpp"
#include "mono3d/distance.hpp"
#include "mono3d/errors.hpp"

namespace mono3d {

// One detected object: everything the detector reports per instance, plus
// the focal length of its source image so cross-intrinsics sets can be
// ranked together.
struct DetectionRecord {
  std::string cls;
  double score = 0.0;  // in [0, 1]
  Box2D box2d;
  Keypoint center_kpt;
  PhysicalSize size;
  YawEncoding yaw;
  DistanceFactors factors;
  double sigma_height = 1.0;  // sigma_H
  double sigma_hrec = 1.0;    // sigma_h_rec
  double focal = 0.0;         // f of the source image, pixels
};

enum class ScoreMode { kRawScore, kComposite };

// score / (f * H * sigma_h_rec). f*H*sigma_h_rec proxies the distance
// uncertainty. Not clamped to [0,1]; this is a ranking key only.
double composite_confidence(double score, double focal, double height,
                            double sigma_hrec);

inline double ranking_key(const DetectionRecord& det, ScoreMode mode) {
  return mode == ScoreMode::kRawScore
             ? det.score
             : composite_confidence(det.score, det.focal, det.factors.height,
                                    det.sigma_hrec);
}

// Stable descending sort by the chosen key; exact ties keep input order.
std::vector<DetectionRecord> rank_detections(std::vector<DetectionRecord> dets,
                                             ScoreMode mode);

}  // namespace mono3d
