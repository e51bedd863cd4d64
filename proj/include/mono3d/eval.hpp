#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mono3d/boxes.hpp"
#include "mono3d/errors.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d {

// Rotated-rectangle IoU of the two boxes' ground-plane footprints
// (center (x,z), extents L x W, angle ry). Intersection via
// Sutherland-Hodgman convex clipping.
double bev_iou(const Box3D& a, const Box3D& b);

// Volume IoU: BEV intersection area times vertical interval overlap.
double iou_3d(const Box3D& a, const Box3D& b);

using BoxPair = std::pair<Box3D, Box3D>;

// Batch kernels, OpenMP-parallel over pairs. Output order matches input
// order and is independent of the thread count.
std::vector<double> bev_iou_batch(std::span<const BoxPair> pairs);
std::vector<double> iou_3d_batch(std::span<const BoxPair> pairs);

namespace serial {
// Single-threaded reference implementations of the batch kernels, kept for
// equivalence tests and the benchmark.
std::vector<double> bev_iou_batch(std::span<const BoxPair> pairs);
std::vector<double> iou_3d_batch(std::span<const BoxPair> pairs);
}  // namespace serial

struct PRCurve {
  // (recall, precision) at each successive ranked detection.
  std::vector<std::pair<double, double>> points;
  // Interpolated precision at recalls {1/40, ..., 40/40}.
  std::array<double, 40> sampled_precisions{};
};

struct EvalDetection {
  Box3D box;
  double key = 0.0;  // ranking key (raw or composite score)
};

struct EvalGroundTruth {
  Box3D box;
  Difficulty difficulty = Difficulty::kModerate;
};

struct EvalImage {
  std::vector<EvalGroundTruth> gts;
  std::vector<EvalDetection> dets;
};

// One true-positive match, by index into the EvalImage arrays.
struct MatchedPair {
  std::size_t image;
  std::size_t gt;
  std::size_t det;
  double iou;
};

struct ApResult {
  double ap = 0.0;
  PRCurve curve;
  std::vector<MatchedPair> matches;
};

using IouFn = std::function<double(const Box3D&, const Box3D&)>;

// AP|R40 with devkit-style greedy matching: detections in descending key
// order, each matched to the unmatched same-image GT with maximum IoU at or
// above `iou_thresh`. The GT pool is every GT at or easier than
// `difficulty`; matches to out-of-pool or Ignored GTs are discarded
// (neither TP nor FP). Throws EmptyGroundTruth when the pool is empty.
ApResult ap_r40(std::span<const EvalImage> images, const IouFn& iou_fn,
                double iou_thresh, Difficulty difficulty);

struct DistanceBin {
  double lo = 0.0;
  double hi = 0.0;  // exclusive; +inf for the open bin
  std::size_t count = 0;
  std::optional<double> mean_abs_error;  // empty bin -> nullopt
};

// Mean |Z_pred - Z_gt| per GT-distance bin. `edges` are ascending bin
// boundaries, e.g. {0, 20, 40} -> [0,20), [20,40), [40,inf); a total
// [0,inf) bin is appended last.
std::vector<DistanceBin> distance_binned_error(
    std::span<const std::pair<double, double>> gt_pred_z,
    std::span<const double> edges);

enum class YawSector { kSide, kFrontBack };

// Front/back when alpha is within pi/4 of 0 or pi; side otherwise.
YawSector classify_yaw_sector(double alpha);

struct SizeErrorEntry {
  PhysicalSize gt;
  PhysicalSize pred;
  double gt_alpha = 0.0;
};

struct SizeErrorCell {
  std::size_t count = 0;
  std::optional<double> mean;
};

// Mean per-dimension |delta| within yaw sectors. Rows: L, W, H. Columns:
// all, side, front & back.
struct SizeErrorTable {
  std::array<std::array<SizeErrorCell, 3>, 3> cells{};
};

SizeErrorTable yaw_sector_size_error(std::span<const SizeErrorEntry> entries);

// Sample Pearson correlation coefficient. Throws DegenerateSequence on
// length < 2, length mismatch, or a constant sequence.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct EvalReport {
  // Indexed by Difficulty (easy, moderate, hard).
  std::array<std::optional<double>, 3> ap_3d;
  std::array<std::optional<double>, 3> ap_bev;
  std::vector<DistanceBin> distance_bins;
  SizeErrorTable size_errors;
  std::optional<double> pcc;
};

}  // namespace mono3d
