#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mono3d/boxes.hpp"
#include "mono3d/camera.hpp"
#include "mono3d/errors.hpp"
#include "mono3d/scoring.hpp"

namespace mono3d {

// One line of a KITTI label or detection file. `location` keeps the file's
// bottom-face-center convention; use box3d() for the geometric-center view.
struct ObjectLabel {
  std::string category;
  double truncation = 0.0;   // [0, 1]; -1 on DontCare lines
  int occlusion = 0;         // {0,1,2,3}; -1 on DontCare lines
  double alpha = 0.0;        // observation angle, radians
  Box2D box2d;
  PhysicalSize size;         // file order h w l
  CameraPoint location;      // bottom-face center as stored in the file
  double ry = 0.0;
  std::optional<double> score;  // present on detection lines (16th field)

  bool is_dont_care() const { return category == "DontCare"; }

  // Lifts to the internal geometric-center convention: y_center = y - h/2.
  Box3D box3d() const {
    return {{location.x, location.y - size.h / 2.0, location.z}, size, ry};
  }
};

enum class Difficulty { kEasy = 0, kModerate = 1, kHard = 2, kIgnored = 3 };

// 15 fields (ground truth) or 16 (detections, trailing score) per line:
// type truncated occluded alpha x1 y1 x2 y2 h w l x y z rotation_y [score]
// Throws FieldCountError / NumericParseError with 1-based line numbers.
std::vector<ObjectLabel> parse_label_file(std::string_view text);

// Extracts the left-color-camera P2 entry ("P2: 12 floats", row-major 3x4)
// and returns the canonical-normalized projection matrix.
// Throws MissingKey("P2") when the line is absent.
ProjectionMatrix parse_calib_file(std::string_view text);

// Devkit difficulty thresholds:
//   Easy:     bbox height >= 40 px, occlusion 0,  truncation <= 0.15
//   Moderate: bbox height >= 25 px, occlusion <=1, truncation <= 0.30
//   Hard:     bbox height >= 25 px, occlusion <=2, truncation <= 0.50
// Everything else (and DontCare) is Ignored.
Difficulty assign_difficulty(const ObjectLabel& label);

// One recovered detection ready for serialization.
struct RecoveredDetection {
  DetectionRecord record;
  Box3D box;  // geometric center; written back as bottom-face center
};

// Emits 16-field KITTI detection lines, fixed 6-decimal floats, LF line
// endings. Byte-deterministic for identical inputs.
std::string write_detections(const std::vector<RecoveredDetection>& dets);

std::string write_labels(const std::vector<ObjectLabel>& labels);

}  // namespace mono3d
