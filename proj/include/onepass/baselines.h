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

#ifndef ONEPASS_BASELINES_H_
#define ONEPASS_BASELINES_H_

#include <iosfwd>
#include <memory>
#include <string_view>

#include "Eigen/Core"
#include "onepass/core_math.h"
#include "onepass/estimator.h"
#include "onepass/onepass_estimator.h"

namespace onepass {

struct LogisticFitResult {
  Eigen::VectorXd theta;
  bool converged = false;
  int iterations = 0;
  double projected_grad_norm = 0.0;
};

// Minimizes sum_i loss(z_i, y_i; theta) over ||theta||_2 <= radius by damped
// Newton from `start`. Each Newton point is projected in the Hessian metric
// (the exact minimizer of the quadratic model over the ball), then an Armijo
// backtracking line search (c = 1e-4, shrink 0.5) runs along the segment.
// Stops once ||theta - P(theta - grad)|| <= tol. Columns of `zs` are samples.
LogisticFitResult FitLogisticInBall(const Eigen::Ref<const Eigen::MatrixXd>& zs,
                                    const Eigen::Ref<const Eigen::VectorXd>& ys,
                                    const Eigen::VectorXd& start,
                                    double radius, double tol, int max_iters);

struct MleConfig {
  OnePassConfig base;
  // <= 0 selects the 1/t schedule.
  double fit_tol = 0.0;
  int max_newton_iters = 50;
  // V_t = v_reg * I + sum z z^T; <= 0 selects lambda * kappa (bound mode).
  double v_reg = 0.0;
};

// Maximum likelihood baseline: stores every sample and refits over the whole
// history after each one, so the cost of Step grows linearly with t.
class MleEstimator : public RewardEstimator {
 public:
  explicit MleEstimator(const MleConfig& config);

  StepInfo Step(const PreferenceSample& sample) override;

  const Eigen::VectorXd& theta() const override { return theta_; }
  Eigen::VectorXd AveragedTheta() const override {
    return theta_sum_ / static_cast<double>(t_);
  }
  // sqrt(kappa) times the one-pass radius: the V-norm is looser than the
  // Hessian norm by at most that factor.
  double Radius() const override;
  const Eigen::MatrixXd& NormInverse() const override { return v_.inv(); }
  double LocalNorm(const Eigen::VectorXd& v) const override {
    return v_.Norm(v);
  }
  int t() const override { return t_; }
  std::string_view name() const override { return "mle"; }
  std::unique_ptr<RewardEstimator> Clone() const override {
    return std::make_unique<MleEstimator>(*this);
  }

  int buffer_size() const { return count_; }
  const LocalNormMatrix& design() const { return v_; }
  double kappa() const { return kappa_; }
  const LogisticFitResult& last_fit() const { return last_fit_; }

  // Refits the current buffer from `start` at the given tolerance.
  LogisticFitResult Refit(const Eigen::VectorXd& start, double tol) const;
  // Buffer columns in arrival order.
  Eigen::MatrixXd BufferFeatures() const { return zs_.leftCols(count_); }
  Eigen::VectorXd BufferLabels() const { return ys_.head(count_); }

  // Same text layout as the one-pass snapshot followed by the buffer; the
  // V inverse is recomputed on load.
  void SaveSnapshot(std::ostream& out) const;
  static MleEstimator LoadSnapshot(std::istream& in);

 private:
  void Append(const Eigen::VectorXd& z, int y);

  MleConfig config_;
  double kappa_ = 0.0;
  Eigen::MatrixXd zs_;  // dim x capacity
  Eigen::VectorXd ys_;
  int count_ = 0;
  Eigen::VectorXd theta_;
  Eigen::VectorXd theta_sum_;
  LocalNormMatrix v_;
  LogisticFitResult last_fit_;
  int t_ = 1;
};

struct ImplicitOmdConfig {
  OnePassConfig base;
  double inner_tol = 1e-8;
  int max_inner_iters = 50;
};

// Implicit online mirror descent: each step solves
//   argmin_{theta in ball} loss_t(theta) + ||theta - theta_t||^2_H / (2 eta)
// by projected Newton, then adds the lookahead Hessian at the new point to H.
class ImplicitOmdEstimator : public RewardEstimator {
 public:
  explicit ImplicitOmdEstimator(const ImplicitOmdConfig& config);

  StepInfo Step(const PreferenceSample& sample) override;

  const Eigen::VectorXd& theta() const override { return theta_; }
  Eigen::VectorXd AveragedTheta() const override {
    return theta_sum_ / static_cast<double>(t_);
  }
  double Radius() const override { return ConfidenceRadius(t_, config_.base); }
  const Eigen::MatrixXd& NormInverse() const override {
    return local_norm_.inv();
  }
  double LocalNorm(const Eigen::VectorXd& v) const override {
    return local_norm_.Norm(v);
  }
  const LocalNormMatrix* hessian_norm() const override { return &local_norm_; }
  int t() const override { return t_; }
  std::string_view name() const override { return "implicit"; }
  std::unique_ptr<RewardEstimator> Clone() const override {
    return std::make_unique<ImplicitOmdEstimator>(*this);
  }

  // Projected-gradient norm of the last proximal subproblem at its solution.
  double last_subproblem_residual() const { return last_residual_; }

 private:
  ImplicitOmdConfig config_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd theta_sum_;
  LocalNormMatrix local_norm_;
  double last_residual_ = 0.0;
  int t_ = 1;
};

}  // namespace onepass

#endif  // ONEPASS_BASELINES_H_
