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

#ifndef ONEPASS_SCENARIOS_H_
#define ONEPASS_SCENARIOS_H_

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "Eigen/Core"
#include "onepass/environment.h"
#include "onepass/estimator.h"
#include "onepass/run_record.h"

namespace onepass {

enum class PolicyMode { kEnumerate, kGreedyPerContext };

std::string_view PolicyModeName(PolicyMode mode);
PolicyMode ParsePolicyMode(std::string_view text);

// Deterministic policy: one action per context.
struct Policy {
  std::vector<int> action_of;
  friend bool operator==(const Policy&, const Policy&) = default;
};

inline constexpr double kMaxEnumeratedPolicies = 1e6;

// J(pi) = Phi(pi)^T theta - beta ||Phi(pi)||_{M^{-1}} with
// Phi(pi) = E_{x ~ rho} phi(x, pi(x)).
double PessimisticValue(const Policy& policy, const Eigen::VectorXd& theta,
                        const Eigen::MatrixXd& norm_inv, double beta,
                        const Environment& env);

// Enumerate: exact argmax of PessimisticValue over all deterministic
// policies (throws std::invalid_argument above 1e6 of them). Greedy: per
// context argmax of phi^T theta - beta ||phi||_{M^{-1}}, which ignores the
// coupling through Phi. Ties go to the lowest action id.
Policy PessimisticPolicy(const Eigen::VectorXd& theta,
                         const Eigen::MatrixXd& norm_inv, double beta,
                         const Environment& env, PolicyMode mode);

// argmax_a phi(x, a)^T theta per context, lowest id on ties.
Policy GreedyPolicy(const Eigen::VectorXd& theta, const Environment& env);
Policy OptimalPolicy(const Environment& env);

// E_{x ~ rho}[r(x, pi*(x)) - r(x, pi(x))].
double SubOpt(const Policy& policy, const Environment& env);

// argmax over (x, a < a') of ||phi(x, a) - phi(x, a')||_{M^{-1}}, ties to the
// lexicographically smallest tuple. Needs at least two actions.
ContextPair SelectMostUncertain(const FeatureTable& pool,
                                const Eigen::MatrixXd& norm_inv);

// a = argmax_b phi(x, b)^T theta; a' = argmax_b phi(x, b)^T theta +
// explore_coeff * beta * ||phi(x, b) - phi(x, a)||_{M^{-1}}, b ranging over
// every action including a.
std::pair<int, int> SelectDeployActions(const Eigen::VectorXd& theta,
                                        const Eigen::MatrixXd& norm_inv,
                                        double beta, int context,
                                        const Environment& env,
                                        double explore_coeff);

struct RunOptions {
  uint64_t seed = 0;
  int horizon = 0;
  PolicyMode policy_mode = PolicyMode::kEnumerate;
  double explore_coeff = 1.0;
  // Norm-domination audits H_{t+1} vs (lambda kappa I + sum z z^T) / kappa
  // after these iterations; skipped when audit_lambda <= 0 or the estimator
  // keeps no Hessian sum.
  std::vector<int> audit_points;
  double audit_lambda = 0.0;
  double audit_kappa = 0.0;
};

struct ScenarioResult {
  Policy policy;
  RunRecord record;
};

// Logged pairs from env.behavior(); returns the pessimistic policy built from
// the final state.
ScenarioResult RunPassive(const Environment& env, RewardEstimator& estimator,
                          const RunOptions& options);
// Queries the most uncertain pair each round; returns the greedy policy of
// the averaged parameter.
ScenarioResult RunActive(const Environment& env, RewardEstimator& estimator,
                         const RunOptions& options);
// Contexts from rho, two actions chosen by SelectDeployActions, dueling
// regret accumulated with the true rewards.
RunRecord RunDeploy(const Environment& env, RewardEstimator& estimator,
                    const RunOptions& options);

// Difference vectors of the recorded rows, in order.
std::vector<Eigen::VectorXd> RecordedDifferences(const RunRecord& record,
                                                 const Environment& env);

}  // namespace onepass

#endif  // ONEPASS_SCENARIOS_H_
