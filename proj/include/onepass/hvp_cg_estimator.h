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

#ifndef ONEPASS_HVP_CG_ESTIMATOR_H_
#define ONEPASS_HVP_CG_ESTIMATOR_H_

#include <memory>
#include <string_view>

#include "Eigen/Core"
#include "onepass/estimator.h"
#include "onepass/onepass_estimator.h"

namespace onepass {

enum class DampingFn { kLinear, kLog };

std::string_view DampingFnName(DampingFn fn);
DampingFn ParseDampingFn(std::string_view text);

struct HvpCgConfig {
  int max_cg_iters = 3;
  double cg_tol = 1e-10;
  double lambda0 = 0.8;
  DampingFn damping = DampingFn::kLinear;
  int total_steps = 1;  // horizon T used by the damping schedule
};

// lambda0 * min(1, f(t / T)); f(u) = u (linear) or log2(1 + u) (log).
double DampingAt(int t, const HvpCgConfig& config);

// Matrix-free variant of the one-pass update. Solves
// (lambda_t I + eta sigma'(z^T theta) z z^T) v = g by a few CG iterations,
// where lambda_t stands in for the accumulated past curvature, then steps
// theta - eta v and rescales onto the Euclidean ball. Holds O(d) state.
class HvpCgEstimator : public RewardEstimator {
 public:
  HvpCgEstimator(const OnePassConfig& config, const HvpCgConfig& cg_config);

  StepInfo Step(const PreferenceSample& sample) override;

  const Eigen::VectorXd& theta() const override { return theta_; }
  Eigen::VectorXd AveragedTheta() const override {
    return theta_sum_ / static_cast<double>(t_);
  }
  double Radius() const override { return ConfidenceRadius(t_, config_); }
  // The damping proxy lambda_t I, materialized on request for the scenario
  // selection rules. The update itself never touches it.
  const Eigen::MatrixXd& NormInverse() const override;
  double LocalNorm(const Eigen::VectorXd& v) const override;
  int t() const override { return t_; }
  std::string_view name() const override { return "hvpcg"; }
  std::unique_ptr<RewardEstimator> Clone() const override {
    return std::make_unique<HvpCgEstimator>(*this);
  }

  double current_damping() const { return DampingAt(t_, cg_config_); }
  int last_cg_iterations() const { return last_cg_iterations_; }

 private:
  OnePassConfig config_;
  HvpCgConfig cg_config_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd theta_sum_;
  int t_ = 1;
  int last_cg_iterations_ = 0;
  mutable Eigen::MatrixXd norm_inv_cache_;
};

}  // namespace onepass

#endif  // ONEPASS_HVP_CG_ESTIMATOR_H_
