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

#include "onepass/diagnostics.h"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "onepass/core_math.h"
#include "onepass/onepass_estimator.h"
#include "onepass/scenarios.h"

namespace onepass {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

RunRecord Synthetic(const std::vector<double>& err, const std::vector<double>& beta) {
  RunRecord r;
  for (size_t i = 0; i < err.size(); ++i) {
    RunRow row;
    row.t = static_cast<int>(i) + 1;
    row.est_err_local = err[i];
    row.beta = beta[i];
    r.rows.push_back(row);
  }
  return r;
}

TEST(CoverageTest, ExactEstimateIsCovered) {
  const CoverageResult c = CoverageCheck(Synthetic({0.0, 0.0}, {0.0, 1.0}));
  EXPECT_TRUE(c.ok);
  EXPECT_FALSE(c.first_violation.has_value());
}

TEST(CoverageTest, ZeroRadiusViolatesImmediately) {
  const CoverageResult c = CoverageCheck(Synthetic({0.1, 0.2, 0.0}, {0.0, 0.0, 0.0}));
  EXPECT_FALSE(c.ok);
  EXPECT_EQ(c.first_violation, 1);
}

TEST(CoverageTest, MonotoneInRadiusScale) {
  EnvironmentGen gen;
  gen.seed = 1;
  const Environment env = MakeEnvironment(gen);
  OnePassConfig cfg = OnePassConfig::WithDefaults(5, 1.0, 1.0);
  cfg.c_beta = 0.1;
  OnePassEstimator est(cfg);
  RunOptions o;
  o.seed = 2;
  o.horizon = 500;
  const RunRecord base = RunDeploy(env, est, o);
  bool seen_ok = false;
  for (double s = 0.25; s <= 4096.0; s *= 2.0) {
    RunRecord r = base;
    for (RunRow& row : r.rows) row.beta *= s;
    const bool ok = CoverageCheck(r).ok;
    if (seen_ok) EXPECT_TRUE(ok) << "scale " << s;
    seen_ok = seen_ok || ok;
  }
  EXPECT_TRUE(seen_ok);
}

TEST(EllipticPotentialTest, EmptyList) {
  const PotentialResult p = EllipticPotentialCheck({}, 1.0, 1.0);
  EXPECT_EQ(p.lhs, 0.0);
  EXPECT_TRUE(p.ok);
}

TEST(EllipticPotentialTest, SingleVector) {
  const std::vector<VectorXd> zs = {Eigen::Vector2d(0.6, 0.8)};
  const PotentialResult p = EllipticPotentialCheck(zs, 1.0, 1.0);
  EXPECT_NEAR(p.lhs, 1.0, 1e-15);
  EXPECT_NEAR(p.rhs, 4.0 * std::log(1.5), 1e-15);
  EXPECT_NEAR(p.rhs, 1.6219, 1e-4);
  EXPECT_TRUE(p.ok);
}

TEST(EllipticPotentialTest, RandomUnitVectorsRespectBound) {
  Rng rng(3);
  std::normal_distribution<double> normal;
  std::vector<VectorXd> zs;
  for (int i = 0; i < 10000; ++i) {
    VectorXd z(5);
    for (int k = 0; k < 5; ++k) z(k) = normal(rng);
    zs.push_back(z.normalized());
  }
  EXPECT_TRUE(EllipticPotentialCheck(zs, 1.0, 1.0).ok);
}

TEST(EllipticPotentialTest, IncrementalMatchesFreshInversions) {
  Rng rng(4);
  std::normal_distribution<double> normal;
  for (int d : {1, 4, 10}) {
    std::vector<VectorXd> zs;
    for (int i = 0; i < 500; ++i) {
      VectorXd z(d);
      for (int k = 0; k < d; ++k) z(k) = normal(rng);
      zs.push_back(z.normalized() * 2.0 * UniformUnit(rng));
    }
    MatrixXd v = 0.7 * MatrixXd::Identity(d, d);
    double lhs = 0.0;
    for (const VectorXd& z : zs) {
      lhs += z.dot(v.inverse() * z);
      v += z * z.transpose();
    }
    EXPECT_NEAR(EllipticPotentialCheck(zs, 0.7, 2.0).lhs, lhs, 1e-8 * std::max(1.0, lhs));
  }
}

TEST(EllipticPotentialTest, RejectsNonPositiveParameters) {
  EXPECT_THROW(EllipticPotentialCheck({}, 0.0, 1.0), std::invalid_argument);
}

TEST(NormDominationTest, DefinitionalStartIsZero) {
  const double kappa = KappaBound(1.0, 1.0);
  for (double lambda : {1.0, 2.0, 1672.5523230261538}) {
    const MatrixXd h = lambda * MatrixXd::Identity(3, 3);
    const MatrixXd v = kappa * lambda * MatrixXd::Identity(3, 3);
    EXPECT_EQ(NormDominationCheck(h, v, kappa), 0.0) << lambda;
  }
}

TEST(NormDominationTest, ScalarOneSample) {
  const double kappa = KappaBound(1.0, 1.0);
  const double z = 1.7;
  const double theta = 0.9;
  MatrixXd h(1, 1);
  h << 1.0 + SigmoidDerivative(z * theta) * z * z;
  MatrixXd v(1, 1);
  v << kappa + z * z;
  EXPECT_GE(NormDominationCheck(h, v, kappa), 0.0);
}

TEST(NormDominationTest, HugeKappaLeavesH) {
  const MatrixXd h = Eigen::Vector2d(3.0, 0.5).asDiagonal();
  EXPECT_NEAR(NormDominationCheck(h, MatrixXd::Identity(2, 2), 1e300), 0.5, 1e-12);
  EXPECT_THROW(NormDominationCheck(h, MatrixXd::Identity(3, 3), 1.0),
               std::invalid_argument);
}

RunRecord Timed(int n, const std::function<int64_t(int)>& nanos) {
  RunRecord r;
  for (int t = 1; t <= n; ++t) {
    RunRow row;
    row.t = t;
    row.wall_nanos = nanos(t);
    r.rows.push_back(row);
  }
  return r;
}

TEST(TimingProfileTest, ConstantTimings) {
  const TimingProfile p = ComputeTimingProfile(Timed(100, [](int) { return 50; }),
                                               {10, 20}, {90, 100});
  EXPECT_DOUBLE_EQ(p.ratio, 1.0);
}

TEST(TimingProfileTest, LinearTimings) {
  const TimingProfile p = ComputeTimingProfile(Timed(10000, [](int t) { return t; }),
                                               {1000, 2000}, {9000, 10000});
  EXPECT_DOUBLE_EQ(p.early_mean_ns, 1500.0);
  EXPECT_DOUBLE_EQ(p.late_mean_ns, 9500.0);
  EXPECT_NEAR(p.ratio, 6.33, 0.01);
}

TEST(TimingProfileTest, SingleElementWindows) {
  const TimingProfile p = ComputeTimingProfile(
      Timed(10, [](int t) { return 3 * t; }), {2, 2}, {7, 7});
  EXPECT_DOUBLE_EQ(p.early_mean_ns, 6.0);
  EXPECT_DOUBLE_EQ(p.late_mean_ns, 21.0);
}

TEST(TimingProfileTest, EmptyWindowThrows) {
  EXPECT_THROW(ComputeTimingProfile(Timed(10, [](int) { return 1; }), {20, 30},
                                    {1, 2}),
               std::invalid_argument);
}

}  // namespace
}  // namespace onepass
