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

#include "onepass/environment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fmt/format.h"

namespace onepass {

void FeatureTable::Validate() const {
  if (num_contexts <= 0 || num_actions <= 0 || dim <= 0) {
    throw std::invalid_argument("FeatureTable: sizes must be positive");
  }
  if (phi.rows() != dim ||
      phi.cols() != static_cast<Eigen::Index>(num_contexts) * num_actions) {
    throw std::invalid_argument("FeatureTable: phi has the wrong shape");
  }
  const double slack = 1e-9 * std::max(1.0, bound_l);
  for (Eigen::Index c = 0; c < phi.cols(); ++c) {
    if (phi.col(c).norm() > bound_l + slack) {
      throw std::invalid_argument(
          fmt::format("FeatureTable: column {} exceeds the norm bound", c));
    }
  }
}

Environment::Environment(FeatureTable features, GroundTruth truth,
                         Eigen::VectorXd rho, BehaviorSpec behavior,
                         uint64_t seed)
    : features_(std::move(features)),
      truth_(std::move(truth)),
      rho_(std::move(rho)),
      behavior_(behavior),
      seed_(seed) {
  features_.Validate();
  const int nc = features_.num_contexts;
  const int na = features_.num_actions;
  if (truth_.theta_star.size() != features_.dim) {
    throw std::invalid_argument("Environment: theta* dimension mismatch");
  }
  if (truth_.theta_star.norm() > truth_.bound_b * (1.0 + 1e-12)) {
    throw std::invalid_argument("Environment: ||theta*|| exceeds B");
  }
  if (rho_.size() != nc || (rho_.array() < 0.0).any() ||
      std::abs(rho_.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("Environment: rho must be a distribution");
  }
  if (behavior_.coverage_skew < 0.0 || behavior_.coverage_skew > 1.0 ||
      behavior_.skew_context < 0 || behavior_.skew_context >= nc ||
      behavior_.skew_a < 0 || behavior_.skew_a >= na || behavior_.skew_b < 0 ||
      behavior_.skew_b >= na) {
    throw std::invalid_argument("Environment: invalid behavior spec");
  }
  rho_cdf_.resize(nc);
  double acc = 0.0;
  for (int x = 0; x < nc; ++x) {
    acc += rho_(x);
    rho_cdf_(x) = acc;
  }
  optimal_action_.resize(nc);
  for (int x = 0; x < nc; ++x) {
    int best = 0;
    double best_reward = Reward(x, 0);
    for (int a = 1; a < na; ++a) {
      const double r = Reward(x, a);
      if (r > best_reward) {
        best = a;
        best_reward = r;
      }
    }
    optimal_action_[x] = best;
  }
}

int Environment::SampleContext(Rng& rng) const {
  const double u = UniformUnit(rng) * rho_cdf_(rho_cdf_.size() - 1);
  const double* begin = rho_cdf_.data();
  const double* end = begin + rho_cdf_.size();
  const auto it = std::upper_bound(begin, end, u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - begin, end - begin - 1));
}

ContextPair Environment::SampleBehavior(Rng& rng) const {
  const bool skewed = UniformUnit(rng) < behavior_.coverage_skew;
  if (skewed) {
    return {behavior_.skew_context, behavior_.skew_a, behavior_.skew_b};
  }
  ContextPair pair;
  pair.context = SampleContext(rng);
  const int na = num_actions();
  if (na == 1) return pair;
  pair.a = static_cast<int>(UniformUnit(rng) * na);
  int b = static_cast<int>(UniformUnit(rng) * (na - 1));
  if (b >= pair.a) ++b;
  pair.a_prime = b;
  return pair;
}

Environment MakeEnvironment(const EnvironmentGen& gen) {
  if (gen.dim <= 0 || gen.num_contexts <= 0 || gen.num_actions <= 0) {
    throw std::invalid_argument("MakeEnvironment: sizes must be positive");
  }
  if (!(gen.bound_b > 0.0) || !(gen.bound_l > 0.0)) {
    throw std::invalid_argument("MakeEnvironment: B and L must be positive");
  }
  if (gen.action_correlation < 0.0 || gen.action_correlation >= 1.0) {
    throw std::invalid_argument(
        "MakeEnvironment: action_correlation must lie in [0, 1)");
  }
  Rng rng(gen.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
  };
  auto unit = [&](int n) {
    Eigen::VectorXd v;
    do {
      v = gaussian(n);
    } while (v.norm() < 1e-300);
    return Eigen::VectorXd(v / v.norm());
  };

  GroundTruth truth;
  truth.bound_b = gen.bound_b;
  truth.bound_l = gen.bound_l;
  const double radius =
      gen.bound_b * std::pow(UniformUnit(rng), 1.0 / gen.dim);
  truth.theta_star = radius * unit(gen.dim);

  FeatureTable table;
  table.num_contexts = gen.num_contexts;
  table.num_actions = gen.num_actions;
  table.dim = gen.dim;
  table.bound_l = gen.bound_l;
  table.phi.resize(gen.dim,
                   static_cast<Eigen::Index>(gen.num_contexts) * gen.num_actions);
  const double shared = std::sqrt(gen.action_correlation);
  const double own = std::sqrt(1.0 - gen.action_correlation);
  for (int x = 0; x < gen.num_contexts; ++x) {
    const Eigen::VectorXd base = unit(gen.dim);
    for (int a = 0; a < gen.num_actions; ++a) {
      Eigen::VectorXd v = shared * base + own * unit(gen.dim);
      if (v.norm() < 1e-12) v = base;
      table.phi.col(table.Index(x, a)) = gen.bound_l * v / v.norm();
    }
  }

  BehaviorSpec behavior;
  behavior.coverage_skew = gen.coverage_skew;
  if (gen.num_actions >= 2) {
    double best = std::numeric_limits<double>::infinity();
    for (int x = 0; x < gen.num_contexts; ++x) {
      for (int a = 0; a < gen.num_actions; ++a) {
        for (int b = a + 1; b < gen.num_actions; ++b) {
          const double n = table.Difference(x, a, b).norm();
          if (n < best) {
            best = n;
            behavior = {gen.coverage_skew, x, a, b};
          }
        }
      }
    }
  }

  Eigen::VectorXd rho =
      Eigen::VectorXd::Constant(gen.num_contexts, 1.0 / gen.num_contexts);
  return Environment(std::move(table), std::move(truth), std::move(rho),
                     behavior, gen.seed);
}

}  // namespace onepass
