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

#include <cmath>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "onepass/core_math.h"

namespace onepass {
namespace {

TEST(EnvironmentTest, ConstructionBounds) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    EnvironmentGen gen;
    gen.seed = seed;
    gen.bound_b = 0.7;
    gen.bound_l = 1.3;
    gen.action_correlation = 0.5 * (seed % 2);
    const Environment env = MakeEnvironment(gen);
    EXPECT_LE(env.truth().theta_star.norm(), 0.7 + 1e-12);
    const FeatureTable& f = env.features();
    ASSERT_EQ(f.phi.cols(), 32);
    for (Eigen::Index c = 0; c < f.phi.cols(); ++c) {
      EXPECT_NEAR(f.phi.col(c).norm(), 1.3, 1e-12);
    }
    EXPECT_NEAR(env.rho().sum(), 1.0, 1e-12);
  }
}

TEST(EnvironmentTest, SameSeedSameEnvironment) {
  EnvironmentGen gen;
  gen.seed = 42;
  const Environment a = MakeEnvironment(gen);
  const Environment b = MakeEnvironment(gen);
  EXPECT_EQ(a.features().phi, b.features().phi);
  EXPECT_EQ(a.truth().theta_star, b.truth().theta_star);
  gen.seed = 43;
  EXPECT_NE(MakeEnvironment(gen).truth().theta_star, a.truth().theta_star);
}

TEST(EnvironmentTest, OptimalActionMaximizesReward) {
  EnvironmentGen gen;
  gen.seed = 7;
  const Environment env = MakeEnvironment(gen);
  for (int x = 0; x < env.num_contexts(); ++x) {
    for (int a = 0; a < env.num_actions(); ++a) {
      EXPECT_GE(env.Reward(x, env.OptimalAction(x)), env.Reward(x, a));
    }
  }
}

// Wilson-Hilferty approximation of the chi-square upper quantile.
double ChiSquareQuantile(double df, double z) {
  const double k = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - k + z * std::sqrt(k), 3.0);
}

TEST(EnvironmentTest, UniformBehaviorPassesChiSquare) {
  EnvironmentGen gen;
  gen.seed = 9;
  const Environment env = MakeEnvironment(gen);
  const int nc = env.num_contexts();
  const int na = env.num_actions();
  std::vector<int> counts(nc * na * na, 0);
  Rng rng(10);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const ContextPair p = env.SampleBehavior(rng);
    ASSERT_NE(p.a, p.a_prime);
    ++counts[(p.context * na + p.a) * na + p.a_prime];
  }
  const int cells = nc * na * (na - 1);
  const double expected = static_cast<double>(n) / cells;
  double stat = 0.0;
  for (int x = 0; x < nc; ++x) {
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < na; ++b) {
        if (a == b) continue;
        const double diff = counts[(x * na + a) * na + b] - expected;
        stat += diff * diff / expected;
      }
    }
  }
  // Upper 0.001 point of the standard normal is 3.0902.
  EXPECT_LT(stat, ChiSquareQuantile(cells - 1, 3.0902));
}

TEST(EnvironmentTest, FullSkewAlwaysReturnsFixedPair) {
  EnvironmentGen gen;
  gen.seed = 11;
  gen.coverage_skew = 1.0;
  const Environment env = MakeEnvironment(gen);
  const BehaviorSpec& b = env.behavior();
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(env.SampleBehavior(rng),
              (ContextPair{b.skew_context, b.skew_a, b.skew_b}));
  }
  // The skew pair is the one with the smallest difference norm.
  const double skew_norm =
      env.features().Difference(b.skew_context, b.skew_a, b.skew_b).norm();
  for (int x = 0; x < env.num_contexts(); ++x) {
    for (int a = 0; a < env.num_actions(); ++a) {
      for (int c = a + 1; c < env.num_actions(); ++c) {
        EXPECT_GE(env.features().Difference(x, a, c).norm(), skew_norm);
      }
    }
  }
}

TEST(EnvironmentTest, ContextSamplingFollowsRho) {
  FeatureTable f;
  f.num_contexts = 3;
  f.num_actions = 1;
  f.dim = 1;
  f.bound_l = 1.0;
  f.phi = Eigen::MatrixXd::Ones(1, 3);
  const Environment env(f, {Eigen::VectorXd::Zero(1), 1.0, 1.0},
                        Eigen::Vector3d(0.2, 0.0, 0.8), {}, 0);
  Rng rng(13);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 20000; ++i) ++counts[env.SampleContext(rng)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / 20000.0, 0.2, 0.015);
}

TEST(EnvironmentTest, RejectsInvalidInputs) {
  EnvironmentGen gen;
  gen.num_actions = 0;
  EXPECT_THROW(MakeEnvironment(gen), std::invalid_argument);
  gen = {};
  gen.action_correlation = 1.0;
  EXPECT_THROW(MakeEnvironment(gen), std::invalid_argument);

  FeatureTable f;
  f.num_contexts = 1;
  f.num_actions = 2;
  f.dim = 1;
  f.bound_l = 1.0;
  f.phi = Eigen::MatrixXd::Constant(1, 2, 2.0);  // exceeds L
  EXPECT_THROW(Environment(f, {Eigen::VectorXd::Zero(1), 1.0, 1.0},
                           Eigen::VectorXd::Ones(1), {}, 0),
               std::invalid_argument);
  f.phi = Eigen::MatrixXd::Ones(1, 2);
  EXPECT_THROW(Environment(f, {Eigen::VectorXd::Constant(1, 2.0), 1.0, 1.0},
                           Eigen::VectorXd::Ones(1), {}, 0),
               std::invalid_argument);
  EXPECT_THROW(Environment(f, {Eigen::VectorXd::Zero(1), 1.0, 1.0},
                           Eigen::VectorXd::Constant(1, 0.5), {}, 0),
               std::invalid_argument);
}

}  // namespace
}  // namespace onepass
