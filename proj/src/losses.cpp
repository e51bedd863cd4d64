#include "mono3d/losses.hpp"

#include <cmath>

namespace mono3d {

double uncertainty_l1_loss(double pred, double gt, double sigma, double lambda) {
  if (sigma <= 0.0) {
    throw NonPositiveSigma("uncertainty loss requires sigma > 0");
  }
  return std::abs(pred - gt) / sigma + lambda * std::log(sigma);
}

UncertaintyGrad uncertainty_l1_grad(double pred, double gt, double sigma,
                                    double lambda) {
  if (sigma <= 0.0) {
    throw NonPositiveSigma("uncertainty gradient requires sigma > 0");
  }
  const double r = pred - gt;
  const double sign = (r > 0.0) ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
  return {sign / sigma, -std::abs(r) / (sigma * sigma) + lambda / sigma};
}

double l1_vector_loss(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) {
    throw LengthMismatch("l1_vector_loss: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += std::abs(pred[i] - gt[i]);
  }
  return sum / static_cast<double>(pred.size());
}

NormalizedKeypoint normalize_keypoint(const Box2D& proposal, const Keypoint& kpt) {
  const double w = proposal.width();
  const double h = proposal.height();
  if (w <= 0.0 || h <= 0.0) {
    throw DegenerateProposal("proposal has non-positive width or height");
  }
  return {(kpt.u - proposal.x1) / w, (kpt.v - proposal.y1) / h};
}

Keypoint denormalize_keypoint(const Box2D& proposal, const NormalizedKeypoint& t) {
  const double w = proposal.width();
  const double h = proposal.height();
  if (w <= 0.0 || h <= 0.0) {
    throw DegenerateProposal("proposal has non-positive width or height");
  }
  return {proposal.x1 + t.t1 * w, proposal.y1 + t.t2 * h};
}

double total_loss(const LossParts& parts, const LossWeights& w) {
  return w.lambda_cls * parts.cls + w.lambda_bbox * parts.bbox +
         w.lambda_size * parts.size + w.lambda_yaw * parts.yaw +
         w.lambda_kpt * parts.kpt + parts.height + parts.hrec;
}

double finite_difference_check(
    const std::function<double(std::span<const double>)>& f,
    const std::function<std::vector<double>(std::span<const double>)>& grad,
    std::span<const double> point, double step) {
  const std::vector<double> analytic = grad(point);
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double fp = f(x);
    x[i] = orig - step;
    const double fm = f(x);
    x[i] = orig;
    const double numeric = (fp - fm) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-12});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

}  // namespace mono3d
