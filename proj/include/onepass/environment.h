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

#ifndef ONEPASS_ENVIRONMENT_H_
#define ONEPASS_ENVIRONMENT_H_

#include <cstdint>
#include <vector>

#include "Eigen/Core"
#include "onepass/core_math.h"

namespace onepass {

// phi(x, a) for a finite pool, stored one feature vector per column at
// index x * num_actions + a.
struct FeatureTable {
  int num_contexts = 0;
  int num_actions = 0;
  int dim = 0;
  double bound_l = 1.0;
  Eigen::MatrixXd phi;

  Eigen::Index Index(int context, int action) const {
    return static_cast<Eigen::Index>(context) * num_actions + action;
  }
  auto Feature(int context, int action) const {
    return phi.col(Index(context, action));
  }
  Eigen::VectorXd Difference(int context, int a, int a_prime) const {
    return phi.col(Index(context, a)) - phi.col(Index(context, a_prime));
  }
  // Checks shape and the norm bound; throws std::invalid_argument.
  void Validate() const;
};

struct GroundTruth {
  Eigen::VectorXd theta_star;
  double bound_b = 1.0;
  double bound_l = 1.0;
};

// Passive data source: with probability coverage_skew the fixed pair below
// is logged, otherwise a uniform context and ordered action pair a != a'.
struct BehaviorSpec {
  double coverage_skew = 0.0;
  int skew_context = 0;
  int skew_a = 0;
  int skew_b = 0;
};

struct EnvironmentGen {
  int dim = 5;
  int num_contexts = 8;
  int num_actions = 4;
  double bound_b = 1.0;
  double bound_l = 1.0;
  uint64_t seed = 0;
  double coverage_skew = 0.0;
  // Features of one context share a common component with this weight
  // (0 = independent directions, close to 1 = nearly identical actions).
  double action_correlation = 0.0;
};

struct ContextPair {
  int context = 0;
  int a = 0;
  int a_prime = 0;
  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

class Environment {
 public:
  Environment(FeatureTable features, GroundTruth truth, Eigen::VectorXd rho,
              BehaviorSpec behavior, uint64_t seed);

  const FeatureTable& features() const { return features_; }
  const GroundTruth& truth() const { return truth_; }
  const Eigen::VectorXd& rho() const { return rho_; }
  const BehaviorSpec& behavior() const { return behavior_; }
  uint64_t seed() const { return seed_; }
  int dim() const { return features_.dim; }
  int num_contexts() const { return features_.num_contexts; }
  int num_actions() const { return features_.num_actions; }

  double Reward(int context, int action) const {
    return features_.Feature(context, action).dot(truth_.theta_star);
  }
  // Per-context argmax of the true reward, lowest id on ties.
  int OptimalAction(int context) const { return optimal_action_[context]; }
  int SampleContext(Rng& rng) const;
  ContextPair SampleBehavior(Rng& rng) const;

 private:
  FeatureTable features_;
  GroundTruth truth_;
  Eigen::VectorXd rho_;
  Eigen::VectorXd rho_cdf_;
  BehaviorSpec behavior_;
  uint64_t seed_;
  std::vector<int> optimal_action_;
};

// theta* uniform in the B-ball, each phi(x, a) uniform on the L-sphere, rho
// uniform. The skewed passive pair is the one with the smallest feature
// difference, i.e. the least informative comparison in the pool.
Environment MakeEnvironment(const EnvironmentGen& gen);

}  // namespace onepass

#endif  // ONEPASS_ENVIRONMENT_H_
