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

#ifndef ONEPASS_ONEPASS_ESTIMATOR_H_
#define ONEPASS_ONEPASS_ESTIMATOR_H_

#include <iosfwd>
#include <memory>
#include <string_view>

#include "Eigen/Core"
#include "onepass/core_math.h"
#include "onepass/estimator.h"

namespace onepass {

enum class RadiusMode { kTheory, kPractical };

std::string_view RadiusModeName(RadiusMode mode);
RadiusMode ParseRadiusMode(std::string_view text);

// Step size (1/2) log 2 + (B L + 1).
double DefaultEta(double bound_b, double bound_l);
// Regularizer 84 sqrt(2) eta (d L^2 + B L^3).
double DefaultLambda(int dim, double bound_b, double bound_l, double eta);

struct OnePassConfig {
  int dim = 0;
  double bound_b = 1.0;
  double bound_l = 1.0;
  double eta = 0.0;
  double lambda = 0.0;
  RadiusMode radius_mode = RadiusMode::kPractical;
  double c_beta = 1.0;
  double delta = 0.1;

  // eta and lambda filled from DefaultEta / DefaultLambda.
  static OnePassConfig WithDefaults(int dim, double bound_b, double bound_l);
  // Throws std::invalid_argument naming the first bad field.
  void Validate() const;
};

struct LossDerivatives {
  double loss;
  Eigen::VectorXd grad;
  // The Hessian is hess_weight * z z^T.
  double hess_weight;
};

// Logistic loss of one labelled difference vector and its derivatives.
LossDerivatives ComputeLossDerivatives(const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& z, int y);

struct BallQuadraticSolution {
  Eigen::VectorXd x;
  double nu = 0.0;     // multiplier of the ball constraint
  bool active = false;  // constraint binding
};

// argmin_x 0.5 x^T M x - rhs^T x subject to ||x||_2 <= radius, M symmetric
// positive semidefinite. The KKT point x(nu) = (M + nu I)^{-1} rhs is found
// by geometric bracketing and bisection on nu, one dense solve per candidate.
// Bracket growth past 200 doublings throws NumericFailure.
BallQuadraticSolution SolveBallConstrainedQuadratic(const Eigen::MatrixXd& m,
                                                    const Eigen::VectorXd& rhs,
                                                    double radius);

// argmin_{||theta||_2 <= radius} ||theta - theta_prime||_M^2.
BallQuadraticSolution ProjectLocalNormBall(const Eigen::VectorXd& theta_prime,
                                           const Eigen::MatrixXd& m,
                                           double radius);

// Confidence radius for iteration t (t >= 1).
//   practical: c_beta * sqrt(d log((t + 1) / delta))
//   theory:    sqrt(C) with the full finite-sample constant.
double ConfidenceRadius(int t, const OnePassConfig& config);

// One-pass online mirror descent reward estimator. Keeps the lookahead
// Hessian sum H_t = lambda I + sum_i sigma'(z_i^T theta_{i+1}) z_i z_i^T with
// its inverse, and never stores samples: every Step costs O(d^2) plus an
// O(d^3) projection when the iterate leaves the ball.
class OnePassEstimator : public RewardEstimator {
 public:
  explicit OnePassEstimator(const OnePassConfig& config);

  StepInfo Step(const PreferenceSample& sample) override;

  const Eigen::VectorXd& theta() const override { return theta_; }
  Eigen::VectorXd AveragedTheta() const override;
  double Radius() const override { return ConfidenceRadius(t_, config_); }
  const Eigen::MatrixXd& NormInverse() const override {
    return local_norm_.inv();
  }
  double LocalNorm(const Eigen::VectorXd& v) const override {
    return local_norm_.Norm(v);
  }
  const LocalNormMatrix* hessian_norm() const override { return &local_norm_; }
  int t() const override { return t_; }
  std::string_view name() const override { return "omd"; }
  std::unique_ptr<RewardEstimator> Clone() const override {
    return std::make_unique<OnePassEstimator>(*this);
  }

  const OnePassConfig& config() const { return config_; }
  const LocalNormMatrix& local_norm() const { return local_norm_; }
  const Eigen::VectorXd& theta_sum() const { return theta_sum_; }

  // Text snapshot: config, t, theta, theta_sum and H (row-major). The
  // inverse is not written; LoadSnapshot recomputes it.
  void SaveSnapshot(std::ostream& out) const;
  static OnePassEstimator LoadSnapshot(std::istream& in);

 private:
  OnePassConfig config_;
  Eigen::VectorXd theta_;
  LocalNormMatrix local_norm_;
  Eigen::MatrixXd step_inv_;  // scratch: inverse of H_t + eta H_t(theta_t)
  Eigen::VectorXd theta_sum_;
  int t_ = 1;
};

}  // namespace onepass

#endif  // ONEPASS_ONEPASS_ESTIMATOR_H_
