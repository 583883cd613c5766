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

#include "onepass/onepass_estimator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "onepass/core_math.h"

namespace onepass {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd Gaussian(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

PreferenceSample Sample(VectorXd z, int y) {
  PreferenceSample s;
  s.z = std::move(z);
  s.y = y;
  return s;
}

// Random z in the 2L ball with labels drawn from theta_star.
std::vector<PreferenceSample> RandomStream(uint64_t seed, int d, int n,
                                          VectorXd* theta_star = nullptr) {
  Rng rng(seed);
  const VectorXd star = Gaussian(rng, d).normalized() * 0.9;
  if (theta_star != nullptr) *theta_star = star;
  std::vector<PreferenceSample> out;
  for (int i = 0; i < n; ++i) {
    VectorXd z = Gaussian(rng, d).normalized() * 2.0 * UniformUnit(rng);
    const int y = BtSample(z.dot(star), 0.0, rng);
    out.push_back(Sample(z, y));
  }
  return out;
}

OnePassConfig Config(int d, double eta, double lambda) {
  OnePassConfig c = OnePassConfig::WithDefaults(d, 1.0, 1.0);
  c.eta = eta;
  c.lambda = lambda;
  return c;
}

TEST(OnePassConfigTest, DefaultFormulas) {
  const double eta = 0.5 * std::log(2.0) + 2.0;
  EXPECT_NEAR(DefaultEta(1.0, 1.0), eta, 1e-12);
  EXPECT_NEAR(eta, 2.3466, 1e-4);
  const OnePassConfig c = OnePassConfig::WithDefaults(4, 1.0, 1.0);
  EXPECT_NEAR(c.lambda, 84.0 * std::sqrt(2.0) * eta * 5.0, 1e-9);
  EXPECT_NEAR(c.lambda, 1393.8, 0.1);
}

TEST(OnePassConfigTest, RejectsInvalidValues) {
  OnePassConfig c = OnePassConfig::WithDefaults(3, 1.0, 1.0);
  c.lambda = 0.0;
  EXPECT_THROW(OnePassEstimator{c}, std::invalid_argument);
  c = OnePassConfig::WithDefaults(3, 1.0, 1.0);
  c.eta = -1.0;
  EXPECT_THROW(OnePassEstimator{c}, std::invalid_argument);
  c = OnePassConfig::WithDefaults(3, 1.0, 1.0);
  c.delta = 1.5;
  EXPECT_THROW(OnePassEstimator{c}, std::invalid_argument);
}

TEST(OnePassEstimatorTest, InitialState) {
  const OnePassEstimator est(Config(3, 1.0, 2.0));
  EXPECT_EQ(est.theta(), VectorXd::Zero(3));
  EXPECT_EQ(est.local_norm().mat(), 2.0 * MatrixXd::Identity(3, 3));
  EXPECT_EQ(est.local_norm().inv(), 0.5 * MatrixXd::Identity(3, 3));
  EXPECT_EQ(est.t(), 1);
  EXPECT_EQ(est.theta_sum(), VectorXd::Zero(3));
}

TEST(LossDerivativesTest, Examples) {
  const VectorXd z = Eigen::Vector3d(0.3, -1.0, 2.0);
  const LossDerivatives one = ComputeLossDerivatives(VectorXd::Zero(3), z, 1);
  EXPECT_NEAR(one.loss, std::log(2.0), 1e-15);
  EXPECT_LE((one.grad + 0.5 * z).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(one.hess_weight, 0.25);
  const LossDerivatives zero = ComputeLossDerivatives(VectorXd::Zero(3), z, 0);
  EXPECT_NEAR(zero.loss, std::log(2.0), 1e-15);
  EXPECT_LE((zero.grad - 0.5 * z).norm(), 1e-15);

  const VectorXd e = VectorXd::Unit(3, 0);
  const LossDerivatives l3 =
      ComputeLossDerivatives(std::log(3.0) * e, e, 1);
  EXPECT_NEAR(l3.loss, std::log(4.0 / 3.0), 1e-14);
  EXPECT_LE((l3.grad + 0.25 * e).norm(), 1e-14);
  EXPECT_NEAR(l3.hess_weight, 0.1875, 1e-14);
  EXPECT_THROW(ComputeLossDerivatives(VectorXd::Zero(3), z, 2),
               std::invalid_argument);
}

TEST(LossDerivativesTest, MatchCentralDifferences) {
  Rng rng(1);
  constexpr double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 5;
    const VectorXd theta = Gaussian(rng, d).normalized() * UniformUnit(rng);
    const VectorXd z = Gaussian(rng, d).normalized() * 2.0 * UniformUnit(rng);
    const int y = trial % 2;
    const LossDerivatives at = ComputeLossDerivatives(theta, z, y);
    VectorXd g(d);
    MatrixXd hess(d, d);
    for (int i = 0; i < d; ++i) {
      const VectorXd e = h * VectorXd::Unit(d, i);
      const LossDerivatives up = ComputeLossDerivatives(theta + e, z, y);
      const LossDerivatives dn = ComputeLossDerivatives(theta - e, z, y);
      g(i) = (up.loss - dn.loss) / (2 * h);
      hess.col(i) = (up.grad - dn.grad) / (2 * h);
    }
    const MatrixXd exact = at.hess_weight * z * z.transpose();
    EXPECT_LE((g - at.grad).norm(), 1e-6 * std::max(1e-3, at.grad.norm()));
    EXPECT_LE((hess - exact).norm(), 1e-6 * std::max(1e-3, exact.norm()));
  }
}

TEST(OmdStepTest, ScalarHandExample) {
  OnePassConfig c = OnePassConfig::WithDefaults(1, 1.0, 1.0);
  c.eta = 2.0;
  c.lambda = 1.0;
  OnePassEstimator est(c);
  const StepInfo info = est.Step(Sample(VectorXd::Ones(1), 1));
  EXPECT_FALSE(info.projected);
  // H~ = 1 + 2 * 0.25 = 1.5, g = -0.5, theta' = 0 - 2 * (-0.5) / 1.5.
  EXPECT_NEAR(est.theta()(0), 2.0 / 3.0, 1e-15);
  const double s = 1.0 / (1.0 + std::exp(-2.0 / 3.0));
  EXPECT_NEAR(est.local_norm().mat()(0, 0), 1.0 + s * (1.0 - s), 1e-15);
  EXPECT_NEAR(est.local_norm().mat()(0, 0), 1.2241, 1e-4);
  EXPECT_NEAR(est.local_norm().inv()(0, 0), 1.0 / (1.0 + s * (1.0 - s)), 1e-15);
  EXPECT_EQ(est.t(), 2);
  EXPECT_NEAR(est.theta_sum()(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(est.AveragedTheta()(0), 1.0 / 3.0, 1e-15);
}

TEST(OmdStepTest, ZeroDifferenceIsNoOp) {
  OnePassEstimator est(Config(3, 2.0, 1.5));
  est.Step(Sample(Eigen::Vector3d(1.0, 0.0, 0.5), 1));
  const VectorXd theta = est.theta();
  const MatrixXd mat = est.local_norm().mat();
  est.Step(Sample(VectorXd::Zero(3), 0));
  EXPECT_EQ(est.theta(), theta);
  EXPECT_EQ(est.local_norm().mat(), mat);
}

TEST(OmdStepTest, PureGivenStateCopy) {
  OnePassEstimator a(Config(4, 2.0, 1.0));
  for (const PreferenceSample& s : RandomStream(2, 4, 20)) a.Step(s);
  OnePassEstimator b = a;
  const PreferenceSample s = Sample(Eigen::Vector4d(0.1, 0.2, -0.3, 0.4), 1);
  a.Step(s);
  b.Step(s);
  EXPECT_EQ(a.theta(), b.theta());
  EXPECT_EQ(a.local_norm().inv(), b.local_norm().inv());
}

TEST(OmdStepTest, RejectsWrongDimension) {
  OnePassEstimator est(Config(3, 2.0, 1.0));
  EXPECT_THROW(est.Step(Sample(VectorXd::Ones(2), 1)), std::invalid_argument);
}

TEST(OmdStepTest, StaysInBallAndSumsIterates) {
  OnePassEstimator est(Config(5, 5.0, 0.5));
  VectorXd sum = VectorXd::Zero(5);
  int projections = 0;
  for (const PreferenceSample& s : RandomStream(3, 5, 2000)) {
    projections += est.Step(s).projected ? 1 : 0;
    ASSERT_LE(est.theta().norm(), 1.0 + 1e-9);
    sum += est.theta();
  }
  EXPECT_GT(projections, 0);
  EXPECT_LE((est.theta_sum() - sum).norm(), 1e-9);
  EXPECT_EQ(est.t(), 2001);
}

TEST(OmdStepTest, InverseTracksMatrixOverLongRun) {
  OnePassEstimator est(Config(20, 2.3, 1.0));
  for (const PreferenceSample& s : RandomStream(4, 20, 10000)) est.Step(s);
  const MatrixXd direct = est.local_norm().mat().inverse();
  EXPECT_LE((est.local_norm().inv() - direct).norm() / direct.norm(), 1e-7);
}

TEST(OmdStepTest, HessianDominatesScaledDesign) {
  const OnePassConfig c = OnePassConfig::WithDefaults(5, 1.0, 1.0);
  const double kappa = KappaBound(1.0, 1.0);
  OnePassEstimator est(c);
  MatrixXd v = c.lambda * kappa * MatrixXd::Identity(5, 5);
  int t = 0;
  for (const PreferenceSample& s : RandomStream(5, 5, 1000)) {
    est.Step(s);
    v += s.z * s.z.transpose();
    if (++t % 100 == 0) {
      const MatrixXd& h = est.local_norm().mat();
      EXPECT_GE(MinEigenvalue(h - v / kappa), -1e-8);
      EXPECT_GE(MinEigenvalue(h - c.lambda * MatrixXd::Identity(5, 5)), -1e-8);
    }
  }
}

TEST(OmdStepTest, ErrorShrinksWithMoreData) {
  std::vector<double> early;
  std::vector<double> late;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    VectorXd star;
    const auto stream = RandomStream(100 + seed, 5, 8000, &star);
    OnePassEstimator est(OnePassConfig::WithDefaults(5, 1.0, 1.0));
    for (int t = 0; t < 8000; ++t) {
      est.Step(stream[t]);
      if (t + 1 == 1000) early.push_back((est.theta() - star).norm());
    }
    late.push_back((est.theta() - star).norm());
  }
  std::sort(early.begin(), early.end());
  std::sort(late.begin(), late.end());
  EXPECT_LT(late[5], early[5]);
}

TEST(ProjectionTest, InteriorPointUnchanged) {
  const VectorXd x = Eigen::Vector2d(0.3, 0.4);
  const BallQuadraticSolution s =
      ProjectLocalNormBall(x, MatrixXd::Identity(2, 2), 1.0);
  EXPECT_EQ(s.x, x);
  EXPECT_FALSE(s.active);
}

TEST(ProjectionTest, EuclideanCase) {
  const BallQuadraticSolution s = ProjectLocalNormBall(
      Eigen::Vector2d(2.0, 0.0), MatrixXd::Identity(2, 2), 1.0);
  EXPECT_NEAR(s.x(0), 1.0, 1e-9);
  EXPECT_NEAR(s.x(1), 0.0, 1e-12);
}

TEST(ProjectionTest, DiagonalWorkedExample) {
  // Oracle: bisection on ||(8 / (4 + nu), 2 / (1 + nu))|| = 1.
  double lo = 0.0;
  double hi = 64.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::hypot(8.0 / (4.0 + mid), 2.0 / (1.0 + mid)) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double nu = 0.5 * (lo + hi);
  ASSERT_NEAR(nu, 4.571, 1e-3);
  const MatrixXd m = Eigen::Vector2d(4.0, 1.0).asDiagonal();
  const BallQuadraticSolution s =
      ProjectLocalNormBall(Eigen::Vector2d(2.0, 2.0), m, 1.0);
  EXPECT_TRUE(s.active);
  EXPECT_NEAR(s.nu, nu, 1e-6);
  EXPECT_NEAR(s.x(0), 8.0 / (4.0 + nu), 1e-6);
  EXPECT_NEAR(s.x(1), 2.0 / (1.0 + nu), 1e-6);
  EXPECT_NEAR(s.x(0), 0.933, 1e-3);
  EXPECT_NEAR(s.x(1), 0.359, 1e-3);
}

TEST(ProjectionTest, KktResidualOnRandomInstances) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 6;
    MatrixXd g(d, d);
    for (int j = 0; j < d; ++j) g.col(j) = Gaussian(rng, d);
    const MatrixXd m = g * g.transpose() + 0.05 * MatrixXd::Identity(d, d);
    const VectorXd tp = Gaussian(rng, d).normalized() * (1.2 + 4.0 * UniformUnit(rng));
    const BallQuadraticSolution s = ProjectLocalNormBall(tp, m, 1.0);
    ASSERT_TRUE(s.active);
    EXPECT_GE(s.nu, 0.0);
    EXPECT_NEAR(s.x.norm(), 1.0, 1e-9);
    EXPECT_LE((m * (s.x - tp) + s.nu * s.x).norm(),
              1e-6 * (1.0 + tp.norm() * m.norm()));
  }
}

TEST(ProjectionTest, RejectsBadRadius) {
  EXPECT_THROW(ProjectLocalNormBall(Eigen::Vector2d(2.0, 0.0),
                                    MatrixXd::Identity(2, 2), 0.0),
               std::invalid_argument);
}

TEST(ConfidenceRadiusTest, PracticalMode) {
  OnePassConfig c = OnePassConfig::WithDefaults(4, 1.0, 1.0);
  c.c_beta = 0.0;
  EXPECT_EQ(ConfidenceRadius(1, c), 0.0);
  c.c_beta = 1.0;
  EXPECT_NEAR(ConfidenceRadius(1, c), std::sqrt(4.0 * std::log(20.0)), 1e-12);
  EXPECT_NEAR(ConfidenceRadius(1, c), 3.462, 1e-3);
}

TEST(ConfidenceRadiusTest, TheoryModeFormulaAndMonotone) {
  OnePassConfig c = OnePassConfig::WithDefaults(5, 1.0, 1.0);
  c.radius_mode = RadiusMode::kTheory;
  const int t = 37;
  const double eta = c.eta;
  const double cc = 7.0 * eta / 6.0;
  const double big_c =
      22.0 * eta * (3.0 * std::log(1.0 + 2.0 * t) + 2.0 + 1.0) *
          std::log(2.0 * std::sqrt(1.0 + 2.0 * t) / c.delta) +
      4.0 * eta +
      2.0 * eta * std::sqrt(6.0) * cc * 5.0 *
          std::log(1.0 + 2.0 * t / (5.0 * c.lambda)) +
      4.0 * c.lambda;
  EXPECT_NEAR(ConfidenceRadius(t, c), std::sqrt(big_c), 1e-9);
  EXPECT_GE(ConfidenceRadius(100, c), ConfidenceRadius(10, c));
  EXPECT_THROW(ConfidenceRadius(0, c), std::invalid_argument);
}

TEST(RadiusModeTest, ParseRoundTrip) {
  for (RadiusMode m : {RadiusMode::kTheory, RadiusMode::kPractical}) {
    EXPECT_EQ(ParseRadiusMode(RadiusModeName(m)), m);
  }
  EXPECT_THROW(ParseRadiusMode("loose"), std::invalid_argument);
}

TEST(SnapshotTest, RoundTripPreservesState) {
  OnePassEstimator est(Config(4, 2.0, 3.0));
  for (const PreferenceSample& s : RandomStream(7, 4, 50)) est.Step(s);
  std::stringstream buf;
  est.SaveSnapshot(buf);
  OnePassEstimator back = OnePassEstimator::LoadSnapshot(buf);
  EXPECT_EQ(back.theta(), est.theta());
  EXPECT_EQ(back.theta_sum(), est.theta_sum());
  EXPECT_EQ(back.local_norm().mat(), est.local_norm().mat());
  EXPECT_EQ(back.t(), est.t());
  EXPECT_LE((back.local_norm().inv() - est.local_norm().inv()).norm(), 1e-10);
  const PreferenceSample s = Sample(Eigen::Vector4d(0.5, -0.5, 0.2, 0.1), 1);
  est.Step(s);
  back.Step(s);
  EXPECT_LE((back.theta() - est.theta()).norm(), 1e-10);
}

TEST(SnapshotTest, RejectsGarbage) {
  std::stringstream buf("not-a-snapshot 1 2 3");
  EXPECT_THROW(OnePassEstimator::LoadSnapshot(buf), std::runtime_error);
}

}  // namespace
}  // namespace onepass
