#include "mono3d/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mono3d/parallel.hpp"

namespace mono3d {

namespace {

constexpr double kClipEps = 1e-9;

struct Vec2 {
  double x;
  double y;
};

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Ground-plane footprint as a CCW quad in the (x, z) plane.
std::array<Vec2, 4> bev_corners(const Box3D& box) {
  const double c = std::cos(box.ry);
  const double s = std::sin(box.ry);
  const Vec2 ux = {c, -s};  // box local +x (length axis)
  const Vec2 uz = {s, c};   // box local +z (width axis)
  const double hl = box.size.l / 2.0;
  const double hw = box.size.w / 2.0;
  const Vec2 ctr = {box.center.x, box.center.z};
  auto corner = [&](double a, double b) -> Vec2 {
    return {ctr.x + a * ux.x + b * uz.x, ctr.y + a * ux.y + b * uz.y};
  };
  return {corner(+hl, +hw), corner(-hl, +hw), corner(-hl, -hw), corner(+hl, -hw)};
}

double polygon_area(std::span<const Vec2> poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    acc += a.x * b.y - b.x * a.y;
  }
  return std::abs(acc) / 2.0;
}

// Sutherland-Hodgman: clips `subject` against each edge of the CCW quad
// `clip`. Vertices within kClipEps of an edge count as inside.
std::vector<Vec2> clip_polygon(std::vector<Vec2> subject,
                               const std::array<Vec2, 4>& clip) {
  std::vector<Vec2> out;
  for (int e = 0; e < 4 && !subject.empty(); ++e) {
    const Vec2& ca = clip[e];
    const Vec2& cb = clip[(e + 1) % 4];
    out.clear();
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Vec2& p = subject[i];
      const Vec2& q = subject[(i + 1) % subject.size()];
      const bool p_in = cross(ca, cb, p) >= -kClipEps;
      const bool q_in = cross(ca, cb, q) >= -kClipEps;
      if (p_in) {
        out.push_back(p);
      }
      if (p_in != q_in) {
        // Intersection of pq with the clip line.
        const double dp = cross(ca, cb, p);
        const double dq = cross(ca, cb, q);
        const double t = dp / (dp - dq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    subject = out;
  }
  return subject;
}

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const auto qa = bev_corners(a);
  const auto qb = bev_corners(b);
  const auto inter = clip_polygon(std::vector<Vec2>(qa.begin(), qa.end()), qb);
  if (inter.size() < 3) {
    return 0.0;
  }
  return polygon_area(inter);
}

}  // namespace

double bev_iou(const Box3D& a, const Box3D& b) {
  const double inter = bev_intersection_area(a, b);
  const double area_a = a.size.l * a.size.w;
  const double area_b = b.size.l * b.size.w;
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double ya0 = a.center.y - a.size.h / 2.0;
  const double ya1 = a.center.y + a.size.h / 2.0;
  const double yb0 = b.center.y - b.size.h / 2.0;
  const double yb1 = b.center.y + b.size.h / 2.0;
  const double overlap = std::max(0.0, std::min(ya1, yb1) - std::max(ya0, yb0));
  const double inter = bev_intersection_area(a, b) * overlap;
  const double vol_a = a.size.l * a.size.w * a.size.h;
  const double vol_b = b.size.l * b.size.w * b.size.h;
  const double uni = vol_a + vol_b - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<double> bev_iou_batch(std::span<const BoxPair> pairs) {
  std::vector<double> out(pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = bev_iou(pairs[i].first, pairs[i].second);
  }
  return out;
}

std::vector<double> iou_3d_batch(std::span<const BoxPair> pairs) {
  std::vector<double> out(pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = iou_3d(pairs[i].first, pairs[i].second);
  }
  return out;
}

namespace serial {

std::vector<double> bev_iou_batch(std::span<const BoxPair> pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out[i] = bev_iou(pairs[i].first, pairs[i].second);
  }
  return out;
}

std::vector<double> iou_3d_batch(std::span<const BoxPair> pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out[i] = iou_3d(pairs[i].first, pairs[i].second);
  }
  return out;
}

}  // namespace serial

ApResult ap_r40(std::span<const EvalImage> images, const IouFn& iou_fn,
                double iou_thresh, Difficulty difficulty) {
  // GT pool: at or easier than the requested difficulty. Ignored and
  // stricter GTs only absorb matches.
  std::size_t pool_size = 0;
  for (const auto& img : images) {
    for (const auto& gt : img.gts) {
      if (gt.difficulty != Difficulty::kIgnored && gt.difficulty <= difficulty) {
        ++pool_size;
      }
    }
  }
  if (pool_size == 0) {
    throw EmptyGroundTruth("no ground-truth objects at the requested difficulty");
  }

  // Per-image IoU matrices, computed in parallel. Slot per image keeps the
  // result independent of the thread count.
  std::vector<std::vector<double>> iou(images.size());
  const auto n_images = static_cast<std::ptrdiff_t>(images.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
#endif
  for (std::ptrdiff_t i = 0; i < n_images; ++i) {
    const auto& img = images[i];
    auto& mat = iou[i];
    mat.resize(img.dets.size() * img.gts.size());
    for (std::size_t d = 0; d < img.dets.size(); ++d) {
      for (std::size_t g = 0; g < img.gts.size(); ++g) {
        mat[d * img.gts.size() + g] = iou_fn(img.dets[d].box, img.gts[g].box);
      }
    }
  }

  struct RankedDet {
    double key;
    std::size_t image;
    std::size_t det;
  };
  std::vector<RankedDet> ranked;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t d = 0; d < images[i].dets.size(); ++d) {
      ranked.push_back({images[i].dets[d].key, i, d});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedDet& a, const RankedDet& b) {
    if (a.key != b.key) return a.key > b.key;
    if (a.image != b.image) return a.image < b.image;
    return a.det < b.det;
  });

  ApResult result;
  std::vector<std::vector<bool>> gt_matched(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    gt_matched[i].assign(images[i].gts.size(), false);
  }

  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const auto& rd : ranked) {
    const auto& img = images[rd.image];
    const auto& mat = iou[rd.image];
    double best_pool = -1.0;
    std::size_t best_pool_gt = 0;
    double best_ignore = -1.0;
    for (std::size_t g = 0; g < img.gts.size(); ++g) {
      const double v = mat[rd.det * img.gts.size() + g];
      const bool in_pool = img.gts[g].difficulty != Difficulty::kIgnored &&
                           img.gts[g].difficulty <= difficulty;
      if (in_pool && !gt_matched[rd.image][g]) {
        if (v > best_pool) {
          best_pool = v;
          best_pool_gt = g;
        }
      } else if (!in_pool) {
        best_ignore = std::max(best_ignore, v);
      }
    }
    if (best_pool >= iou_thresh) {
      gt_matched[rd.image][best_pool_gt] = true;
      result.matches.push_back({rd.image, best_pool_gt, rd.det, best_pool});
      ++tp;
    } else if (best_ignore >= iou_thresh) {
      continue;  // matched an ignored GT: neither TP nor FP
    } else {
      ++fp;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(pool_size);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    result.curve.points.emplace_back(recall, precision);
  }

  // AP|R40: mean interpolated precision at recalls {1/40, ..., 1}.
  double ap_sum = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double r = static_cast<double>(k) / 40.0;
    double p_interp = 0.0;
    for (const auto& [recall, precision] : result.curve.points) {
      if (recall >= r - 1e-12) {
        p_interp = std::max(p_interp, precision);
      }
    }
    result.curve.sampled_precisions[k - 1] = p_interp;
    ap_sum += p_interp;
  }
  result.ap = ap_sum / 40.0;
  return result;
}

std::vector<DistanceBin> distance_binned_error(
    std::span<const std::pair<double, double>> gt_pred_z,
    std::span<const double> edges) {
  std::vector<DistanceBin> bins;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    bins.push_back({edges[i], i + 1 < edges.size() ? edges[i + 1] : inf, 0, {}});
  }
  bins.push_back({0.0, inf, 0, {}});  // total
  std::vector<double> sums(bins.size(), 0.0);
  for (const auto& [gt_z, pred_z] : gt_pred_z) {
    const double err = std::abs(pred_z - gt_z);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (gt_z >= bins[i].lo && gt_z < bins[i].hi) {
        sums[i] += err;
        ++bins[i].count;
      }
    }
  }
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i].count > 0) {
      bins[i].mean_abs_error = sums[i] / static_cast<double>(bins[i].count);
    }
  }
  return bins;
}

YawSector classify_yaw_sector(double alpha) {
  const double a = std::abs(wrap_angle(alpha));
  if (a <= M_PI / 4.0 || a >= 3.0 * M_PI / 4.0) {
    return YawSector::kFrontBack;
  }
  return YawSector::kSide;
}

SizeErrorTable yaw_sector_size_error(std::span<const SizeErrorEntry> entries) {
  SizeErrorTable table;
  std::array<std::array<double, 3>, 3> sums{};
  for (const auto& e : entries) {
    const double err[3] = {std::abs(e.pred.l - e.gt.l), std::abs(e.pred.w - e.gt.w),
                           std::abs(e.pred.h - e.gt.h)};
    const int sector_col =
        classify_yaw_sector(e.gt_alpha) == YawSector::kSide ? 1 : 2;
    for (int dim = 0; dim < 3; ++dim) {
      for (int col : {0, sector_col}) {
        sums[dim][col] += err[dim];
        ++table.cells[dim][col].count;
      }
    }
  }
  for (int dim = 0; dim < 3; ++dim) {
    for (int col = 0; col < 3; ++col) {
      if (table.cells[dim][col].count > 0) {
        table.cells[dim][col].mean =
            sums[dim][col] / static_cast<double>(table.cells[dim][col].count);
      }
    }
  }
  return table;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DegenerateSequence("pearson needs two equal-length sequences, n >= 2");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateSequence("pearson undefined for a constant sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace mono3d
