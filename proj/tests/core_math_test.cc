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

#include "onepass/core_math.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"

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

TEST(SigmoidTest, KnownValues) {
  EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(SigmoidDerivative(0.0), 0.25);
  const double l3 = std::log(3.0);
  EXPECT_NEAR(Sigmoid(l3), 0.75, 1e-15);
  EXPECT_NEAR(SigmoidDerivative(l3), 0.1875, 1e-15);
  EXPECT_NEAR(Sigmoid(-l3), 0.25, 1e-15);
  EXPECT_NEAR(SigmoidDerivative(-l3), 0.1875, 1e-15);
}

TEST(SigmoidTest, ExtremeArgumentsStayFinite) {
  for (double w : {-700.0, -40.0, 40.0, 700.0}) {
    const SigmoidValues v = SigmoidFamily(w);
    EXPECT_TRUE(std::isfinite(v.sigma));
    EXPECT_TRUE(std::isfinite(v.dsigma));
    EXPECT_GE(v.dsigma, 0.0);
  }
  EXPECT_EQ(Sigmoid(700.0), 1.0);
  EXPECT_GT(Sigmoid(-700.0), 0.0);
}

TEST(SigmoidTest, RejectsNonFinite) {
  EXPECT_THROW(SigmoidFamily(std::nan("")), std::invalid_argument);
  EXPECT_THROW(SigmoidFamily(std::numeric_limits<double>::infinity()),
               std::invalid_argument);
}

TEST(SigmoidTest, SymmetryProperty) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 10000; ++i) {
    const double w = u(rng);
    EXPECT_NEAR(Sigmoid(w) + Sigmoid(-w), 1.0, 1e-12);
    EXPECT_NEAR(SigmoidDerivative(w), SigmoidDerivative(-w), 1e-12);
  }
}

TEST(SoftplusTest, MatchesLogOnePlusExp) {
  for (double w : {-5.0, -0.3, 0.0, 0.7, 4.0}) {
    EXPECT_NEAR(Softplus(w), std::log1p(std::exp(w)), 1e-14);
  }
  EXPECT_NEAR(Softplus(800.0), 800.0, 1e-12);
}

double Frequency(double ra, double rb, int n, uint64_t seed) {
  Rng rng(seed);
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += BtSample(ra, rb, rng);
  return static_cast<double>(ones) / n;
}

TEST(BtSampleTest, EqualRewardsAreFair) {
  const double f = Frequency(0.3, 0.3, 100000, 2);
  EXPECT_GE(f, 0.49);
  EXPECT_LE(f, 0.51);
}

TEST(BtSampleTest, LogThreeGap) {
  const double f = Frequency(std::log(3.0), 0.0, 100000, 3);
  EXPECT_GE(f, 0.74);
  EXPECT_LE(f, 0.76);
}

TEST(BtSampleTest, HugeGapAlwaysPrefersA) {
  EXPECT_EQ(Frequency(50.0, 0.0, 1000, 4), 1.0);
}

TEST(BtSampleTest, DeterministicGivenSeed) {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 500; ++i) {
    EXPECT_EQ(BtSample(0.1 * i, 0.2, a), BtSample(0.1 * i, 0.2, b));
  }
}

TEST(KappaTest, BoundMode) {
  EXPECT_NEAR(KappaBound(1.0, 1.0), 3.0 + std::exp(2.0), 1e-12);
  EXPECT_NEAR(Kappa(KappaMode::kBound, 1.0, 1.0), 10.3890560989, 1e-9);
}

TEST(KappaTest, EmpiricalMode) {
  const VectorXd z = VectorXd::Unit(2, 0);
  std::vector<ZThetaPair> zero = {{z, VectorXd::Zero(2)}};
  EXPECT_DOUBLE_EQ(KappaEmpirical(zero), 4.0);
  std::vector<ZThetaPair> l3 = {{z, std::log(3.0) * z}};
  EXPECT_NEAR(KappaEmpirical(l3), 16.0 / 3.0, 1e-12);
  EXPECT_THROW(KappaEmpirical({}), std::invalid_argument);
}

TEST(KappaTest, EmpiricalNeverExceedsBound) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const double b = 0.1 + 2.0 * UniformUnit(rng);
    const double l = 0.1 + 2.0 * UniformUnit(rng);
    std::vector<ZThetaPair> data;
    for (int i = 0; i < 5; ++i) {
      VectorXd z = Gaussian(rng, 3).normalized() * 2.0 * l * UniformUnit(rng);
      VectorXd th = Gaussian(rng, 3).normalized() * b * UniformUnit(rng);
      data.push_back({z, th});
    }
    EXPECT_LE(KappaEmpirical(data), KappaBound(b, l));
  }
}

TEST(ShermanMorrisonTest, Examples) {
  const MatrixXd i2 = MatrixXd::Identity(2, 2);
  const VectorXd e1 = VectorXd::Unit(2, 0);
  const MatrixXd a = ShermanMorrison(i2, e1, 1.0);
  EXPECT_NEAR((a - Eigen::Vector2d(0.5, 1.0).asDiagonal().toDenseMatrix()).norm(),
              0.0, 1e-15);
  const MatrixXd b = ShermanMorrison(i2, e1, 3.0);
  EXPECT_NEAR((b - Eigen::Vector2d(0.25, 1.0).asDiagonal().toDenseMatrix()).norm(),
              0.0, 1e-15);
  EXPECT_EQ(ShermanMorrison(i2, e1, 0.0), i2);
}

TEST(ShermanMorrisonTest, Errors) {
  const MatrixXd i2 = MatrixXd::Identity(2, 2);
  const VectorXd e1 = VectorXd::Unit(2, 0);
  EXPECT_THROW(ShermanMorrison(i2, e1, -1.0), std::invalid_argument);
  // Indefinite "inverse": 1 + w z^T A z = 1 - 2 < 0.
  EXPECT_THROW(ShermanMorrison(-2.0 * i2, e1, 1.0), NumericFailure);
}

TEST(ShermanMorrisonTest, AgreesWithDirectInverse) {
  Rng rng(7);
  for (int d : {1, 3, 10, 20}) {
    MatrixXd a = MatrixXd::Identity(d, d);
    MatrixXd inv = MatrixXd::Identity(d, d);
    for (int i = 0; i < 1000; ++i) {
      const VectorXd z = Gaussian(rng, d) / std::sqrt(static_cast<double>(d));
      const double w = UniformUnit(rng);
      a += w * z * z.transpose();
      ShermanMorrisonInPlace(inv, z, w);
      ASSERT_EQ(inv, inv.transpose());
    }
    const MatrixXd direct = a.inverse();
    EXPECT_LE((inv - direct).norm() / direct.norm(), 1e-8) << "d=" << d;
  }
}

TEST(MahalanobisTest, Examples) {
  const VectorXd e1 = VectorXd::Unit(2, 0);
  EXPECT_DOUBLE_EQ(MahalanobisInv(e1, MatrixXd::Identity(2, 2)), 1.0);
  EXPECT_DOUBLE_EQ(
      MahalanobisInv(e1, Eigen::Vector2d(4.0, 1.0).asDiagonal().toDenseMatrix()),
      2.0);
  EXPECT_DOUBLE_EQ(MahalanobisInv(VectorXd::Zero(2), MatrixXd::Identity(2, 2)),
                   0.0);
}

TEST(MahalanobisTest, ClampsTinyNegativeAndRejectsLarge) {
  const VectorXd e1 = VectorXd::Unit(1, 0);
  MatrixXd tiny(1, 1);
  tiny << -1e-14;
  EXPECT_EQ(MahalanobisInv(e1, tiny), 0.0);
  MatrixXd bad(1, 1);
  bad << -1e-6;
  EXPECT_THROW(MahalanobisInv(e1, bad), NumericFailure);
}

TEST(LocalNormMatrixTest, LockstepUpdates) {
  LocalNormMatrix m = LocalNormMatrix::ScaledIdentity(3, 2.0);
  EXPECT_EQ(m.mat(), 2.0 * MatrixXd::Identity(3, 3));
  EXPECT_EQ(m.inv(), 0.5 * MatrixXd::Identity(3, 3));
  Rng rng(8);
  for (int i = 0; i < 50; ++i) m.AddRankOne(Gaussian(rng, 3), UniformUnit(rng));
  EXPECT_LE((m.mat() * m.inv() - MatrixXd::Identity(3, 3)).norm(), 1e-8);
  const VectorXd v = Gaussian(rng, 3);
  EXPECT_NEAR(m.Norm(v), std::sqrt(v.dot(m.mat() * v)), 1e-12);
  EXPECT_NEAR(m.InverseNorm(v), std::sqrt(v.dot(m.mat().inverse() * v)), 1e-10);
}

TEST(LocalNormMatrixTest, FromMatrixComputesInverse) {
  MatrixXd a(2, 2);
  a << 4.0, 1.0, 1.0, 3.0;
  const LocalNormMatrix m = LocalNormMatrix::FromMatrix(a);
  EXPECT_LE((m.inv() - a.inverse()).norm(), 1e-14);
}

TEST(CgSolveTest, IdentityOneIteration) {
  const VectorXd b = Eigen::Vector3d(1.0, -2.0, 0.5);
  const CgResult r = CgSolve([](const VectorXd& p) { return p; }, b, 5, 0.0);
  EXPECT_LE((r.solution - b).norm(), 1e-15);
  EXPECT_EQ(r.residual_norm, 0.0);
  EXPECT_EQ(r.iterations, 1);
}

TEST(CgSolveTest, DiagonalTwoByTwo) {
  const Eigen::Vector2d diag(1.0, 2.0);
  const CgResult r =
      CgSolve([&](const VectorXd& p) { return VectorXd(diag.cwiseProduct(p)); },
              Eigen::Vector2d(1.0, 2.0), 2, 0.0);
  EXPECT_NEAR(r.solution(0), 1.0, 1e-12);
  EXPECT_NEAR(r.solution(1), 1.0, 1e-12);
}

TEST(CgSolveTest, ZeroRightHandSide) {
  const CgResult r = CgSolve([](const VectorXd& p) { return VectorXd(2.0 * p); },
                             VectorXd::Zero(4), 3, 0.0);
  EXPECT_EQ(r.solution, VectorXd::Zero(4));
  EXPECT_EQ(r.residual_norm, 0.0);
}

TEST(CgSolveTest, MatchesDirectSolveWithDIterations) {
  Rng rng(9);
  for (int d = 1; d <= 20; ++d) {
    MatrixXd g(d, d);
    for (int j = 0; j < d; ++j) g.col(j) = Gaussian(rng, d);
    const MatrixXd a = g * g.transpose() / d + 0.5 * MatrixXd::Identity(d, d);
    const VectorXd b = Gaussian(rng, d);
    const CgResult r =
        CgSolve([&](const VectorXd& p) { return VectorXd(a * p); }, b, d, 0.0);
    const VectorXd x = a.ldlt().solve(b);
    EXPECT_LE((r.solution - x).norm() / x.norm(), 1e-6) << "d=" << d;
  }
}

TEST(CgSolveTest, IndefiniteOperatorFails) {
  EXPECT_THROW(CgSolve([](const VectorXd& p) { return VectorXd(-p); },
                       VectorXd::Ones(2), 2, 0.0),
               NumericFailure);
}

TEST(MinEigenvalueTest, Diagonal) {
  EXPECT_DOUBLE_EQ(
      MinEigenvalue(Eigen::Vector3d(3.0, -1.0, 2.0).asDiagonal().toDenseMatrix()),
      -1.0);
}

TEST(SplitMix64Test, DistinctAndStable) {
  EXPECT_EQ(SplitMix64(0), SplitMix64(0));
  EXPECT_NE(SplitMix64(0), SplitMix64(1));
}

}  // namespace
}  // namespace onepass
