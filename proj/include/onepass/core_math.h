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

#ifndef ONEPASS_CORE_MATH_H_
#define ONEPASS_CORE_MATH_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "Eigen/Core"

namespace onepass {

// Raised when linear algebra detects a state that cannot come from valid
// input (indefinite operator, non-positive rank-one denominator, NaN).
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct SigmoidValues {
  double sigma;
  double dsigma;
};

// Logistic link and its derivative sigma(w) * (1 - sigma(w)). Branches on the
// sign of w so that exp never overflows. Throws std::invalid_argument on a
// non-finite input.
SigmoidValues SigmoidFamily(double w);

inline double Sigmoid(double w) { return SigmoidFamily(w).sigma; }
inline double SigmoidDerivative(double w) { return SigmoidFamily(w).dsigma; }

// log(1 + exp(w)) without overflow.
double Softplus(double w);

// Bradley-Terry label: 1 with probability sigma(reward_a - reward_b).
int BtSample(double reward_a, double reward_b, Rng& rng);

enum class KappaMode { kBound, kEmpirical };

struct ZThetaPair {
  Eigen::VectorXd z;
  Eigen::VectorXd theta;
};

// Non-linearity coefficient. Bound mode returns 3 + exp(2 B L); empirical
// mode returns the largest 1 / sigma'(z^T theta) over the supplied pairs.
double Kappa(KappaMode mode, double bound_b, double bound_l,
             std::span<const ZThetaPair> data = {});
double KappaBound(double bound_b, double bound_l);
double KappaEmpirical(std::span<const ZThetaPair> data);

// (A + w z z^T)^{-1} from A^{-1}, symmetrized. O(d^2).
Eigen::MatrixXd ShermanMorrison(const Eigen::MatrixXd& inv,
                                const Eigen::VectorXd& z, double w);
void ShermanMorrisonInPlace(Eigen::MatrixXd& inv, const Eigen::VectorXd& z,
                            double w);

// sqrt(v^T inv v). Tiny negative quadratic forms (>= -1e-12) clamp to zero.
double MahalanobisInv(const Eigen::VectorXd& v, const Eigen::MatrixXd& inv);

// Symmetric positive-definite matrix paired with its explicit inverse. Both
// halves move together through rank-one updates so quadratic forms in either
// are available in O(d^2).
class LocalNormMatrix {
 public:
  LocalNormMatrix() = default;
  // lambda * I and its inverse.
  static LocalNormMatrix ScaledIdentity(int dim, double lambda);
  // Takes ownership of a PD matrix and inverts it directly.
  static LocalNormMatrix FromMatrix(Eigen::MatrixXd mat);

  // mat += w z z^T, inverse updated by Sherman-Morrison.
  void AddRankOne(const Eigen::VectorXd& z, double w);

  const Eigen::MatrixXd& mat() const { return mat_; }
  const Eigen::MatrixXd& inv() const { return inv_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

  // ||v||_M and ||v||_{M^{-1}}.
  double Norm(const Eigen::VectorXd& v) const;
  double InverseNorm(const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd mat_;
  Eigen::MatrixXd inv_;
};

struct CgResult {
  Eigen::VectorXd solution;
  double residual_norm = 0.0;
  int iterations = 0;
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Conjugate gradient from v = 0 for a symmetric positive-definite operator.
// Stops after max_iters iterations or once ||r|| <= tol.
CgResult CgSolve(const LinearOperator& apply, const Eigen::VectorXd& b,
                 int max_iters, double tol);

// Smallest eigenvalue of a symmetric matrix (dense solver).
double MinEigenvalue(const Eigen::MatrixXd& sym);

// 64-bit finalizer used for seed fan-out.
uint64_t SplitMix64(uint64_t x);

}  // namespace onepass

#endif  // ONEPASS_CORE_MATH_H_
