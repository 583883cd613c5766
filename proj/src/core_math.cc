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

#include <algorithm>
#include <cmath>
#include <limits>

#include "Eigen/Dense"

namespace onepass {

SigmoidValues SigmoidFamily(double w) {
  if (!std::isfinite(w)) {
    throw std::invalid_argument("SigmoidFamily: non-finite input");
  }
  const double e = std::exp(-std::abs(w));
  const double denom = 1.0 + e;
  const double sigma = w >= 0.0 ? 1.0 / denom : e / denom;
  return {sigma, e / (denom * denom)};
}

double Softplus(double w) {
  if (w > 0.0) return w + std::log1p(std::exp(-w));
  return std::log1p(std::exp(w));
}

int BtSample(double reward_a, double reward_b, Rng& rng) {
  const double p = Sigmoid(reward_a - reward_b);
  return UniformUnit(rng) < p ? 1 : 0;
}

double KappaBound(double bound_b, double bound_l) {
  if (!(bound_b > 0.0) || !(bound_l > 0.0)) {
    throw std::invalid_argument("KappaBound: B and L must be positive");
  }
  return 3.0 + std::exp(2.0 * bound_b * bound_l);
}

double KappaEmpirical(std::span<const ZThetaPair> data) {
  if (data.empty()) {
    throw std::invalid_argument("KappaEmpirical: empty data");
  }
  double kappa = 0.0;
  for (const auto& pair : data) {
    if (pair.z.size() != pair.theta.size()) {
      throw std::invalid_argument("KappaEmpirical: dimension mismatch");
    }
    kappa = std::max(kappa, 1.0 / SigmoidDerivative(pair.z.dot(pair.theta)));
  }
  return kappa;
}

double Kappa(KappaMode mode, double bound_b, double bound_l,
             std::span<const ZThetaPair> data) {
  return mode == KappaMode::kBound ? KappaBound(bound_b, bound_l)
                                   : KappaEmpirical(data);
}

void ShermanMorrisonInPlace(Eigen::MatrixXd& inv, const Eigen::VectorXd& z,
                            double w) {
  if (w < 0.0 || !std::isfinite(w)) {
    throw std::invalid_argument("ShermanMorrison: weight must be >= 0");
  }
  if (w == 0.0) return;
  const Eigen::VectorXd u = inv * z;
  const double denom = 1.0 + w * z.dot(u);
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw NumericFailure("ShermanMorrison: non-positive denominator");
  }
  inv.noalias() -= (w / denom) * u * u.transpose();
  inv = 0.5 * (inv + inv.transpose()).eval();
}

Eigen::MatrixXd ShermanMorrison(const Eigen::MatrixXd& inv,
                                const Eigen::VectorXd& z, double w) {
  Eigen::MatrixXd out = inv;
  ShermanMorrisonInPlace(out, z, w);
  return out;
}

double MahalanobisInv(const Eigen::VectorXd& v, const Eigen::MatrixXd& inv) {
  const double q = v.dot(inv * v);
  if (q < -1e-12 || std::isnan(q)) {
    throw NumericFailure("MahalanobisInv: negative quadratic form");
  }
  return q <= 0.0 ? 0.0 : std::sqrt(q);
}

LocalNormMatrix LocalNormMatrix::ScaledIdentity(int dim, double lambda) {
  if (dim <= 0 || !(lambda > 0.0)) {
    throw std::invalid_argument("LocalNormMatrix: need dim > 0, lambda > 0");
  }
  LocalNormMatrix m;
  m.mat_ = lambda * Eigen::MatrixXd::Identity(dim, dim);
  m.inv_ = (1.0 / lambda) * Eigen::MatrixXd::Identity(dim, dim);
  return m;
}

LocalNormMatrix LocalNormMatrix::FromMatrix(Eigen::MatrixXd mat) {
  if (mat.rows() != mat.cols() || mat.rows() == 0) {
    throw std::invalid_argument("LocalNormMatrix: matrix must be square");
  }
  LocalNormMatrix m;
  m.mat_ = 0.5 * (mat + mat.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(m.mat_);
  if (llt.info() != Eigen::Success) {
    throw NumericFailure("LocalNormMatrix: matrix is not positive definite");
  }
  m.inv_ = llt.solve(Eigen::MatrixXd::Identity(m.mat_.rows(), m.mat_.cols()));
  m.inv_ = 0.5 * (m.inv_ + m.inv_.transpose()).eval();
  return m;
}

void LocalNormMatrix::AddRankOne(const Eigen::VectorXd& z, double w) {
  if (w == 0.0) return;
  ShermanMorrisonInPlace(inv_, z, w);
  mat_.selfadjointView<Eigen::Lower>().rankUpdate(z, w);
  mat_.triangularView<Eigen::StrictlyUpper>() = mat_.transpose();
}

double LocalNormMatrix::Norm(const Eigen::VectorXd& v) const {
  return MahalanobisInv(v, mat_);
}

double LocalNormMatrix::InverseNorm(const Eigen::VectorXd& v) const {
  return MahalanobisInv(v, inv_);
}

CgResult CgSolve(const LinearOperator& apply, const Eigen::VectorXd& b,
                 int max_iters, double tol) {
  if (max_iters < 1) {
    throw std::invalid_argument("CgSolve: max_iters must be >= 1");
  }
  CgResult result;
  result.solution = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  if (!std::isfinite(rr)) throw NumericFailure("CgSolve: non-finite rhs");
  result.residual_norm = std::sqrt(rr);
  if (result.residual_norm <= tol || rr == 0.0) return result;

  for (int k = 0; k < max_iters; ++k) {
    const Eigen::VectorXd ap = apply(p);
    const double pap = p.dot(ap);
    if (!std::isfinite(pap) || !(pap > 0.0)) {
      throw NumericFailure("CgSolve: operator is not positive definite");
    }
    const double alpha = rr / pap;
    result.solution.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    const double rr_next = r.squaredNorm();
    if (!std::isfinite(rr_next)) {
      throw NumericFailure("CgSolve: non-finite residual");
    }
    result.iterations = k + 1;
    result.residual_norm = std::sqrt(rr_next);
    if (result.residual_norm <= tol || rr_next == 0.0) break;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return result;
}

double MinEigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericFailure("MinEigenvalue: eigen solver failed");
  }
  return solver.eigenvalues()(0);
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace onepass
