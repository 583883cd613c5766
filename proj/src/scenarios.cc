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

#include "onepass/scenarios.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "fmt/format.h"
#include "onepass/core_math.h"

namespace onepass {

std::string_view PolicyModeName(PolicyMode mode) {
  return mode == PolicyMode::kEnumerate ? "enumerate" : "greedy_percontext";
}

PolicyMode ParsePolicyMode(std::string_view text) {
  if (text == "enumerate") return PolicyMode::kEnumerate;
  if (text == "greedy_percontext" || text == "greedy") {
    return PolicyMode::kGreedyPerContext;
  }
  throw std::invalid_argument(fmt::format(
      "unknown policy mode '{}' (enumerate|greedy_percontext)", text));
}

namespace {

Eigen::VectorXd PolicyFeature(const std::vector<int>& action_of,
                              const Environment& env) {
  const FeatureTable& f = env.features();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(f.dim);
  for (int x = 0; x < f.num_contexts; ++x) {
    phi += env.rho()(x) * f.Feature(x, action_of[x]);
  }
  return phi;
}

void CheckPolicy(const Policy& policy, const Environment& env) {
  if (static_cast<int>(policy.action_of.size()) != env.num_contexts()) {
    throw std::invalid_argument("Policy: not defined on every context");
  }
  for (int a : policy.action_of) {
    if (a < 0 || a >= env.num_actions()) {
      throw std::invalid_argument("Policy: action id out of range");
    }
  }
}

}  // namespace

double PessimisticValue(const Policy& policy, const Eigen::VectorXd& theta,
                        const Eigen::MatrixXd& norm_inv, double beta,
                        const Environment& env) {
  CheckPolicy(policy, env);
  const Eigen::VectorXd phi = PolicyFeature(policy.action_of, env);
  return phi.dot(theta) - beta * MahalanobisInv(phi, norm_inv);
}

Policy PessimisticPolicy(const Eigen::VectorXd& theta,
                         const Eigen::MatrixXd& norm_inv, double beta,
                         const Environment& env, PolicyMode mode) {
  const FeatureTable& f = env.features();
  Policy best;
  best.action_of.assign(f.num_contexts, 0);

  if (mode == PolicyMode::kGreedyPerContext) {
    for (int x = 0; x < f.num_contexts; ++x) {
      double best_score = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < f.num_actions; ++a) {
        const auto phi = f.Feature(x, a);
        const double score =
            phi.dot(theta) - beta * MahalanobisInv(phi, norm_inv);
        if (score > best_score) {
          best_score = score;
          best.action_of[x] = a;
        }
      }
    }
    return best;
  }

  if (std::pow(static_cast<double>(f.num_actions), f.num_contexts) >
      kMaxEnumeratedPolicies) {
    throw std::invalid_argument(fmt::format(
        "PessimisticPolicy: {}^{} policies exceed the enumeration budget; "
        "use greedy_percontext",
        f.num_actions, f.num_contexts));
  }
  // Odometer in lexicographic order, last context fastest; strict
  // improvement keeps the lexicographically smallest maximizer.
  std::vector<int> current(f.num_contexts, 0);
  double best_value = -std::numeric_limits<double>::infinity();
  while (true) {
    const Eigen::VectorXd phi = PolicyFeature(current, env);
    const double value = phi.dot(theta) - beta * MahalanobisInv(phi, norm_inv);
    if (value > best_value) {
      best_value = value;
      best.action_of = current;
    }
    int pos = f.num_contexts - 1;
    while (pos >= 0 && ++current[pos] == f.num_actions) {
      current[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

Policy GreedyPolicy(const Eigen::VectorXd& theta, const Environment& env) {
  const FeatureTable& f = env.features();
  Policy policy;
  policy.action_of.assign(f.num_contexts, 0);
  for (int x = 0; x < f.num_contexts; ++x) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < f.num_actions; ++a) {
      const double r = f.Feature(x, a).dot(theta);
      if (r > best) {
        best = r;
        policy.action_of[x] = a;
      }
    }
  }
  return policy;
}

Policy OptimalPolicy(const Environment& env) {
  Policy policy;
  policy.action_of.resize(env.num_contexts());
  for (int x = 0; x < env.num_contexts(); ++x) {
    policy.action_of[x] = env.OptimalAction(x);
  }
  return policy;
}

double SubOpt(const Policy& policy, const Environment& env) {
  CheckPolicy(policy, env);
  double gap = 0.0;
  for (int x = 0; x < env.num_contexts(); ++x) {
    gap += env.rho()(x) * (env.Reward(x, env.OptimalAction(x)) -
                           env.Reward(x, policy.action_of[x]));
  }
  return gap;
}

ContextPair SelectMostUncertain(const FeatureTable& pool,
                                const Eigen::MatrixXd& norm_inv) {
  if (pool.num_contexts < 1 || pool.num_actions < 2) {
    throw std::invalid_argument(
        "SelectMostUncertain: need a context and two actions");
  }
  ContextPair best;
  double best_norm = -1.0;
  Eigen::VectorXd z(pool.dim);
  for (int x = 0; x < pool.num_contexts; ++x) {
    for (int a = 0; a < pool.num_actions; ++a) {
      for (int b = a + 1; b < pool.num_actions; ++b) {
        z = pool.Feature(x, a) - pool.Feature(x, b);
        const double n = MahalanobisInv(z, norm_inv);
        if (n > best_norm) {
          best_norm = n;
          best = {x, a, b};
        }
      }
    }
  }
  return best;
}

std::pair<int, int> SelectDeployActions(const Eigen::VectorXd& theta,
                                        const Eigen::MatrixXd& norm_inv,
                                        double beta, int context,
                                        const Environment& env,
                                        double explore_coeff) {
  if (beta < 0.0) {
    throw std::invalid_argument("SelectDeployActions: beta must be >= 0");
  }
  const FeatureTable& f = env.features();
  int first = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < f.num_actions; ++b) {
    const double r = f.Feature(context, b).dot(theta);
    if (r > best) {
      best = r;
      first = b;
    }
  }
  const double bonus_scale = explore_coeff * beta;
  int second = 0;
  best = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < f.num_actions; ++b) {
    double score = f.Feature(context, b).dot(theta);
    if (bonus_scale != 0.0) {
      score += bonus_scale *
               MahalanobisInv(f.Difference(context, b, first), norm_inv);
    }
    if (score > best) {
      best = score;
      second = b;
    }
  }
  return {first, second};
}

namespace {

bool IsPowerOfTwo(int t) { return t > 0 && (t & (t - 1)) == 0; }

void AppendFlag(std::string& flags, std::string_view flag) {
  if (!flags.empty()) flags += '|';
  flags += flag;
}

// Shared driver. `choose(t, rng)` picks the comparison, `annotate(t, row)`
// adds scenario metrics after the estimator update.
template <typename Choose, typename Annotate>
RunRecord DriveLoop(std::string_view scenario, const Environment& env,
                    RewardEstimator& estimator, const RunOptions& options,
                    Choose choose, Annotate annotate) {
  if (options.horizon < 0) {
    throw std::invalid_argument("scenario: horizon must be >= 0");
  }
  if (estimator.theta().size() != env.dim()) {
    throw std::invalid_argument("scenario: estimator/environment dimension");
  }
  RunRecord record;
  RunSummary& summary = record.summary;
  summary.scenario = std::string(scenario);
  summary.estimator = std::string(estimator.name());
  summary.seed = options.seed;
  summary.horizon = options.horizon;
  record.rows.reserve(options.horizon);

  const bool audit = options.audit_lambda > 0.0 && options.audit_kappa > 0.0 &&
                     estimator.hessian_norm() != nullptr &&
                     !options.audit_points.empty();
  Eigen::MatrixXd design;
  if (audit) {
    design = options.audit_lambda * options.audit_kappa *
             Eigen::MatrixXd::Identity(env.dim(), env.dim());
  }

  const Eigen::VectorXd& theta_star = env.truth().theta_star;
  Rng rng(options.seed);
  for (int t = 1; t <= options.horizon; ++t) {
    const ContextPair pair = choose(t, rng);
    const int y = BtSample(env.Reward(pair.context, pair.a),
                           env.Reward(pair.context, pair.a_prime), rng);
    PreferenceSample sample{pair.context, pair.a, pair.a_prime,
                            env.features().Difference(pair.context, pair.a,
                                                      pair.a_prime),
                            y};

    RunRow row;
    row.t = t;
    row.x = pair.context;
    row.a = pair.a;
    row.a_prime = pair.a_prime;
    row.y = y;
    StepInfo info;
    try {
      const auto start = std::chrono::steady_clock::now();
      info = estimator.Step(sample);
      const auto stop = std::chrono::steady_clock::now();
      row.wall_nanos =
          std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
              .count();
    } catch (const std::exception& e) {
      summary.aborted = true;
      summary.abort_reason = fmt::format("t={}: {}", t, e.what());
      break;
    }
    summary.total_step_nanos += row.wall_nanos;
    if (info.projected) {
      AppendFlag(row.flags, "proj");
      ++summary.projections;
    }
    if (!info.converged) {
      AppendFlag(row.flags, "nonconv");
      ++summary.nonconverged;
    }

    const Eigen::VectorXd err = estimator.theta() - theta_star;
    row.est_err_l2 = err.norm();
    row.est_err_local = estimator.LocalNorm(err);
    row.beta = estimator.Radius();
    annotate(t, row);

    if (audit) {
      design.noalias() += sample.z * sample.z.transpose();
      for (int point : options.audit_points) {
        if (point != t) continue;
        const Eigen::MatrixXd gap =
            estimator.hessian_norm()->mat() - design / options.audit_kappa;
        summary.audits.push_back({t, MinEigenvalue(gap)});
        break;
      }
    }
    record.rows.push_back(std::move(row));
    summary.steps_completed = t;
  }

  summary.final_est_err_l2 = (estimator.theta() - theta_star).norm();
  summary.final_est_err_local =
      estimator.LocalNorm(estimator.theta() - theta_star);
  summary.final_beta = estimator.Radius();
  return record;
}

}  // namespace

ScenarioResult RunPassive(const Environment& env, RewardEstimator& estimator,
                          const RunOptions& options) {
  auto choose = [&](int, Rng& rng) { return env.SampleBehavior(rng); };
  auto annotate = [&](int t, RunRow& row) {
    if (IsPowerOfTwo(t)) {
      row.subopt_checkpoint = SubOpt(
          PessimisticPolicy(estimator.theta(), estimator.NormInverse(),
                            estimator.Radius(), env, options.policy_mode),
          env);
    }
  };
  ScenarioResult result;
  result.record = DriveLoop("passive", env, estimator, options, choose, annotate);
  result.policy =
      PessimisticPolicy(estimator.theta(), estimator.NormInverse(),
                        estimator.Radius(), env, options.policy_mode);
  RunSummary& summary = result.record.summary;
  summary.final_subopt = SubOpt(result.policy, env);
  summary.final_subopt_last_iterate =
      SubOpt(GreedyPolicy(estimator.theta(), env), env);
  summary.policy = result.policy.action_of;
  return result;
}

ScenarioResult RunActive(const Environment& env, RewardEstimator& estimator,
                         const RunOptions& options) {
  auto choose = [&](int, Rng&) {
    return SelectMostUncertain(env.features(), estimator.NormInverse());
  };
  auto annotate = [&](int t, RunRow& row) {
    if (IsPowerOfTwo(t)) {
      row.subopt_checkpoint =
          SubOpt(GreedyPolicy(estimator.AveragedTheta(), env), env);
    }
  };
  ScenarioResult result;
  result.record = DriveLoop("active", env, estimator, options, choose, annotate);
  result.policy = GreedyPolicy(estimator.AveragedTheta(), env);
  RunSummary& summary = result.record.summary;
  summary.final_subopt = SubOpt(result.policy, env);
  summary.final_subopt_last_iterate =
      SubOpt(GreedyPolicy(estimator.theta(), env), env);
  summary.policy = result.policy.action_of;
  return result;
}

RunRecord RunDeploy(const Environment& env, RewardEstimator& estimator,
                    const RunOptions& options) {
  double regret = 0.0;
  auto choose = [&](int, Rng& rng) {
    ContextPair pair;
    pair.context = env.SampleContext(rng);
    const auto [a, a_prime] =
        SelectDeployActions(estimator.theta(), estimator.NormInverse(),
                            estimator.Radius(), pair.context, env,
                            options.explore_coeff);
    pair.a = a;
    pair.a_prime = a_prime;
    return pair;
  };
  auto annotate = [&](int, RunRow& row) {
    const int x = row.x;
    regret += env.Reward(x, env.OptimalAction(x)) -
              0.5 * (env.Reward(x, row.a) + env.Reward(x, row.a_prime));
    row.cum_regret = regret;
  };
  RunRecord record =
      DriveLoop("deploy", env, estimator, options, choose, annotate);
  record.summary.cum_regret = regret;
  record.summary.final_subopt_last_iterate =
      SubOpt(GreedyPolicy(estimator.theta(), env), env);
  return record;
}

std::vector<Eigen::VectorXd> RecordedDifferences(const RunRecord& record,
                                                 const Environment& env) {
  std::vector<Eigen::VectorXd> zs;
  zs.reserve(record.rows.size());
  for (const RunRow& row : record.rows) {
    zs.push_back(env.features().Difference(row.x, row.a, row.a_prime));
  }
  return zs;
}

}  // namespace onepass
