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

#ifndef ONEPASS_ESTIMATOR_H_
#define ONEPASS_ESTIMATOR_H_

#include <memory>
#include <string_view>

#include "Eigen/Core"
#include "onepass/core_math.h"

namespace onepass {

// One interaction record. z = phi(x, a) - phi(x, a'), y = 1 iff a preferred.
struct PreferenceSample {
  int context = 0;
  int action_a = 0;
  int action_b = 0;
  Eigen::VectorXd z;
  int y = 0;
};

struct StepInfo {
  bool projected = false;
  bool converged = true;
  int inner_iterations = 0;
};

// Common surface over the one-pass, matrix-free, MLE and implicit-OMD reward
// estimators so that the scenario loops can drive any of them.
class RewardEstimator {
 public:
  virtual ~RewardEstimator() = default;

  // Consumes one sample. Throws NumericFailure on a corrupted state.
  virtual StepInfo Step(const PreferenceSample& sample) = 0;

  virtual const Eigen::VectorXd& theta() const = 0;
  // Mean of every iterate produced so far, including the initial one.
  virtual Eigen::VectorXd AveragedTheta() const = 0;
  // Confidence radius paired with NormInverse() at the current iteration.
  virtual double Radius() const = 0;
  virtual const Eigen::MatrixXd& NormInverse() const = 0;
  // ||v|| in the estimator's confidence geometry (the matrix NormInverse
  // inverts).
  virtual double LocalNorm(const Eigen::VectorXd& v) const = 0;
  // Sum of lookahead Hessians plus regularizer, when the estimator keeps one.
  virtual const LocalNormMatrix* hessian_norm() const { return nullptr; }
  // Iteration counter; 1 before the first sample.
  virtual int t() const = 0;
  virtual std::string_view name() const = 0;
  virtual std::unique_ptr<RewardEstimator> Clone() const = 0;
};

// Frozen parameter with zero radius. Stands in for a perfect learner.
class FixedEstimator : public RewardEstimator {
 public:
  explicit FixedEstimator(Eigen::VectorXd theta)
      : theta_(std::move(theta)),
        norm_inv_(Eigen::MatrixXd::Identity(theta_.size(), theta_.size())) {}

  StepInfo Step(const PreferenceSample&) override {
    ++t_;
    return {};
  }
  const Eigen::VectorXd& theta() const override { return theta_; }
  Eigen::VectorXd AveragedTheta() const override { return theta_; }
  double Radius() const override { return 0.0; }
  const Eigen::MatrixXd& NormInverse() const override { return norm_inv_; }
  double LocalNorm(const Eigen::VectorXd& v) const override { return v.norm(); }
  int t() const override { return t_; }
  std::string_view name() const override { return "fixed"; }
  std::unique_ptr<RewardEstimator> Clone() const override {
    return std::make_unique<FixedEstimator>(*this);
  }

 private:
  Eigen::VectorXd theta_;
  Eigen::MatrixXd norm_inv_;
  int t_ = 1;
};

}  // namespace onepass

#endif  // ONEPASS_ESTIMATOR_H_
