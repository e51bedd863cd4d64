#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mono3d/boxes.hpp"
#include "mono3d/errors.hpp"

namespace mono3d {

// A regressed value paired with its learned positive uncertainty.
struct UncertainScalar {
  double value = 0.0;
  double sigma = 1.0;
};

// Loss term weights. The uncertainty terms L_H and L_h_rec enter the total
// unweighted; their lambdas act inside the uncertainty loss itself.
struct LossWeights {
  double lambda_cls = 1.0;
  double lambda_bbox = 1.0;
  double lambda_size = 3.0;
  double lambda_yaw = 5.0;
  double lambda_kpt = 5.0;
  double lambda_height = 0.25;  // lambda_H
  double lambda_hrec = 1.0;     // lambda_h_rec
};

// Proposal-relative keypoint coordinates. Deliberately not restricted to
// [0,1]: projected centers of truncated objects fall outside the proposal.
struct NormalizedKeypoint {
  double t1 = 0.0;
  double t2 = 0.0;
};

struct LossParts {
  double cls = 0.0;
  double bbox = 0.0;
  double size = 0.0;
  double yaw = 0.0;
  double kpt = 0.0;
  double height = 0.0;  // L_H, already includes its sigma/lambda terms
  double hrec = 0.0;    // L_h_rec, likewise
};

// |pred - gt| / sigma + lambda * ln(sigma). Natural log.
double uncertainty_l1_loss(double pred, double gt, double sigma, double lambda);

struct UncertaintyGrad {
  double d_pred;
  double d_sigma;
};

// Analytic gradient of uncertainty_l1_loss. At the L1 kink (pred == gt)
// d_pred uses the subgradient 0.
UncertaintyGrad uncertainty_l1_grad(double pred, double gt, double sigma,
                                    double lambda);

// Mean absolute error across components.
double l1_vector_loss(std::span<const double> pred, std::span<const double> gt);

NormalizedKeypoint normalize_keypoint(const Box2D& proposal, const Keypoint& kpt);
Keypoint denormalize_keypoint(const Box2D& proposal, const NormalizedKeypoint& t);

double total_loss(const LossParts& parts, const LossWeights& w);

// Compares an analytic gradient with central finite differences and returns
// the worst relative error across components.
//
// `f` evaluates the loss at a point; `grad` returns its analytic gradient.
double finite_difference_check(
    const std::function<double(std::span<const double>)>& f,
    const std::function<std::vector<double>(std::span<const double>)>& grad,
    std::span<const double> point, double step);

}  // namespace mono3d
