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

#include "onepass/hvp_cg_estimator.h"

#include <algorithm>
#include <cmath>

#include "fmt/format.h"

namespace onepass {

std::string_view DampingFnName(DampingFn fn) {
  return fn == DampingFn::kLinear ? "linear" : "log";
}

DampingFn ParseDampingFn(std::string_view text) {
  if (text == "linear") return DampingFn::kLinear;
  if (text == "log") return DampingFn::kLog;
  throw std::invalid_argument(
      fmt::format("unknown damping function '{}' (linear|log)", text));
}

double DampingAt(int t, const HvpCgConfig& config) {
  const double u = static_cast<double>(t) / config.total_steps;
  const double f = config.damping == DampingFn::kLinear ? u : std::log2(1.0 + u);
  return config.lambda0 * std::min(1.0, f);
}

HvpCgEstimator::HvpCgEstimator(const OnePassConfig& config,
                               const HvpCgConfig& cg_config)
    : config_(config), cg_config_(cg_config) {
  config_.Validate();
  if (cg_config_.max_cg_iters < 1) {
    throw std::invalid_argument("HvpCgEstimator: K must be >= 1");
  }
  if (cg_config_.total_steps < 1) {
    throw std::invalid_argument("HvpCgEstimator: total steps must be >= 1");
  }
  if (!(cg_config_.lambda0 >= 0.0) || !(cg_config_.cg_tol >= 0.0)) {
    throw std::invalid_argument("HvpCgEstimator: lambda0, tol must be >= 0");
  }
  theta_ = Eigen::VectorXd::Zero(config_.dim);
  theta_sum_ = theta_;
}

StepInfo HvpCgEstimator::Step(const PreferenceSample& sample) {
  const Eigen::VectorXd& z = sample.z;
  if (z.size() != config_.dim) {
    throw std::invalid_argument("HvpCgEstimator: sample dimension mismatch");
  }
  const LossDerivatives cur = ComputeLossDerivatives(theta_, z, sample.y);
  const double damping = DampingAt(t_, cg_config_);
  const double curvature = config_.eta * cur.hess_weight;
  auto apply = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return damping * p + (curvature * z.dot(p)) * z;
  };
  const CgResult cg = CgSolve(apply, cur.grad, cg_config_.max_cg_iters,
                              cg_config_.cg_tol);
  last_cg_iterations_ = cg.iterations;

  StepInfo info;
  info.inner_iterations = cg.iterations;
  theta_ -= config_.eta * cg.solution;
  const double norm = theta_.norm();
  if (norm > config_.bound_b) {
    theta_ *= config_.bound_b / norm;
    info.projected = true;
  }
  theta_sum_ += theta_;
  ++t_;
  return info;
}

const Eigen::MatrixXd& HvpCgEstimator::NormInverse() const {
  const double damping = std::max(current_damping(), 1e-12);
  norm_inv_cache_ =
      Eigen::MatrixXd::Identity(config_.dim, config_.dim) / damping;
  return norm_inv_cache_;
}

double HvpCgEstimator::LocalNorm(const Eigen::VectorXd& v) const {
  return std::sqrt(current_damping()) * v.norm();
}

}  // namespace onepass
