// Copyright 2026 The onepass-rlhf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "Eigen/Dense"
#include "onepass/baselines.h"

namespace onepass {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 60;

Eigen::VectorXd ProjectEuclidean(Eigen::VectorXd v, double radius) {
  const double n = v.norm();
  if (n > radius) v *= radius / n;
  return v;
}

}  // namespace

ImplicitOmdEstimator::ImplicitOmdEstimator(const ImplicitOmdConfig& config)
    : config_(config) {
  config_.base.Validate();
  if (config_.max_inner_iters < 1 || !(config_.inner_tol > 0.0)) {
    throw std::invalid_argument(
        "ImplicitOmdEstimator: need max_inner_iters >= 1 and inner_tol > 0");
  }
  theta_ = Eigen::VectorXd::Zero(config_.base.dim);
  theta_sum_ = theta_;
  local_norm_ =
      LocalNormMatrix::ScaledIdentity(config_.base.dim, config_.base.lambda);
}

StepInfo ImplicitOmdEstimator::Step(const PreferenceSample& sample) {
  const Eigen::VectorXd& z = sample.z;
  const int y = sample.y;
  if (z.size() != config_.base.dim) {
    throw std::invalid_argument("ImplicitOmdEstimator: dimension mismatch");
  }
  if (y != 0 && y != 1) {
    throw std::invalid_argument("ImplicitOmdEstimator: label must be 0/1");
  }
  const double eta = config_.base.eta;
  const double radius = config_.base.bound_b;
  const Eigen::MatrixXd& h = local_norm_.mat();
  const Eigen::VectorXd anchor = theta_;

  auto objective = [&](const Eigen::VectorXd& x) {
    const double w = z.dot(x);
    const Eigen::VectorXd diff = x - anchor;
    const double loss = y == 1 ? Softplus(-w) : Softplus(w);
    return loss + diff.dot(h * diff) / (2.0 * eta);
  };

  StepInfo info;
  info.converged = false;
  Eigen::VectorXd x = anchor;
  Eigen::MatrixXd hess_inv;
  for (int iter = 0;; ++iter) {
    const SigmoidValues s = SigmoidFamily(z.dot(x));
    const Eigen::VectorXd grad = (s.sigma - y) * z + h * (x - anchor) / eta;
    last_residual_ = (x - ProjectEuclidean(x - grad, radius)).norm();
    info.inner_iterations = iter;
    if (last_residual_ <= config_.inner_tol) {
      info.converged = true;
      break;
    }
    if (iter >= config_.max_inner_iters) break;

    // Subproblem Hessian H / eta + sigma' z z^T; its inverse is
    // eta (H + eta sigma' z z^T)^{-1}, one Sherman-Morrison away from H^{-1}.
    hess_inv = local_norm_.inv();
    ShermanMorrisonInPlace(hess_inv, z, eta * s.dsigma);
    hess_inv *= eta;
    Eigen::VectorXd target = x - hess_inv * grad;
    if (target.norm() > radius) {
      Eigen::MatrixXd hess = h / eta;
      hess.noalias() += s.dsigma * z * z.transpose();
      target =
          SolveBallConstrainedQuadratic(hess, hess * x - grad, radius).x;
      info.projected = true;
    }
    const Eigen::VectorXd dir = target - x;
    const double slope = grad.dot(dir);
    const double value = objective(x);
    // Below rounding level of the objective the Armijo test is noise; the
    // Newton step is already in its quadratic regime.
    if (std::abs(slope) <= 1e-13 * (1.0 + std::abs(value))) {
      x = target;
      continue;
    }
    if (!(slope < 0.0)) break;
    bool moved = false;
    double step = 1.0;
    for (int k = 0; k < kMaxBacktracks; ++k, step *= kShrink) {
      const Eigen::VectorXd trial = x + step * dir;
      if (objective(trial) <= value + kArmijo * step * slope) {
        x = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  theta_ = std::move(x);
  local_norm_.AddRankOne(z, SigmoidDerivative(z.dot(theta_)));
  theta_sum_ += theta_;
  ++t_;
  return info;
}

}  // namespace onepass
