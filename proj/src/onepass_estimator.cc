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

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "Eigen/Dense"
#include "fmt/format.h"
#include "fmt/ostream.h"
#include "text_io.h"

namespace onepass {

std::string_view RadiusModeName(RadiusMode mode) {
  return mode == RadiusMode::kTheory ? "theory" : "practical";
}

RadiusMode ParseRadiusMode(std::string_view text) {
  if (text == "theory") return RadiusMode::kTheory;
  if (text == "practical") return RadiusMode::kPractical;
  throw std::invalid_argument(
      fmt::format("unknown radius mode '{}' (theory|practical)", text));
}

double DefaultEta(double bound_b, double bound_l) {
  return 0.5 * std::log(2.0) + (bound_b * bound_l + 1.0);
}

double DefaultLambda(int dim, double bound_b, double bound_l, double eta) {
  const double l2 = bound_l * bound_l;
  return 84.0 * std::numbers::sqrt2 * eta *
         (dim * l2 + bound_b * l2 * bound_l);
}

OnePassConfig OnePassConfig::WithDefaults(int dim, double bound_b,
                                          double bound_l) {
  OnePassConfig config;
  config.dim = dim;
  config.bound_b = bound_b;
  config.bound_l = bound_l;
  config.eta = DefaultEta(bound_b, bound_l);
  config.lambda = DefaultLambda(dim, bound_b, bound_l, config.eta);
  return config;
}

void OnePassConfig::Validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) {
      throw std::invalid_argument(
          fmt::format("OnePassConfig: invalid {}", field));
    }
  };
  require(dim > 0, "dim");
  require(bound_b > 0.0 && std::isfinite(bound_b), "B");
  require(bound_l > 0.0 && std::isfinite(bound_l), "L");
  require(eta > 0.0 && std::isfinite(eta), "eta");
  require(lambda > 0.0 && std::isfinite(lambda), "lambda");
  require(c_beta >= 0.0 && std::isfinite(c_beta), "c_beta");
  require(delta > 0.0 && delta <= 1.0, "delta");
}

LossDerivatives ComputeLossDerivatives(const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& z, int y) {
  if (theta.size() != z.size()) {
    throw std::invalid_argument("ComputeLossDerivatives: dimension mismatch");
  }
  if (y != 0 && y != 1) {
    throw std::invalid_argument("ComputeLossDerivatives: label must be 0/1");
  }
  const double w = z.dot(theta);
  const SigmoidValues s = SigmoidFamily(w);
  // -log sigma(w) = softplus(-w), -log(1 - sigma(w)) = softplus(w).
  const double loss = y == 1 ? Softplus(-w) : Softplus(w);
  return {loss, (s.sigma - y) * z, s.dsigma};
}

namespace {

Eigen::VectorXd ShiftedSolve(const Eigen::MatrixXd& m,
                             const Eigen::VectorXd& rhs, double nu) {
  Eigen::MatrixXd shifted = m;
  shifted.diagonal().array() += nu;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw NumericFailure("ball projection: shifted matrix not PD");
  }
  return llt.solve(rhs);
}

}  // namespace

BallQuadraticSolution SolveBallConstrainedQuadratic(const Eigen::MatrixXd& m,
                                                    const Eigen::VectorXd& rhs,
                                                    double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("ball projection: radius must be positive");
  }
  BallQuadraticSolution out;
  {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd x = llt.solve(rhs);
      if (x.allFinite() && x.norm() <= radius) {
        out.x = std::move(x);
        return out;
      }
    }
  }

  out.active = true;
  double lo = 0.0;
  double hi = 1.0;
  Eigen::VectorXd x_hi = ShiftedSolve(m, rhs, hi);
  int doublings = 0;
  while (x_hi.norm() >= radius) {
    if (++doublings > 200) {
      throw NumericFailure("ball projection: multiplier bracket diverged");
    }
    lo = hi;
    hi *= 2.0;
    x_hi = ShiftedSolve(m, rhs, hi);
  }

  // ||x(nu)|| is decreasing in nu; keep the feasible end of the bracket.
  const double tol = 1e-14 * radius;
  for (int iter = 0; iter < 200 && radius - x_hi.norm() > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Eigen::VectorXd x_mid = ShiftedSolve(m, rhs, mid);
    if (x_mid.norm() > radius) {
      lo = mid;
    } else {
      hi = mid;
      x_hi = std::move(x_mid);
    }
  }
  out.x = std::move(x_hi);
  out.nu = hi;
  return out;
}

BallQuadraticSolution ProjectLocalNormBall(const Eigen::VectorXd& theta_prime,
                                           const Eigen::MatrixXd& m,
                                           double radius) {
  if (theta_prime.norm() <= radius) return {theta_prime, 0.0, false};
  return SolveBallConstrainedQuadratic(m, m * theta_prime, radius);
}

double ConfidenceRadius(int t, const OnePassConfig& config) {
  if (t < 1) throw std::invalid_argument("ConfidenceRadius: t must be >= 1");
  const double d = config.dim;
  const double delta = config.delta;
  if (config.radius_mode == RadiusMode::kPractical) {
    return config.c_beta * std::sqrt(d * std::log((t + 1.0) / delta));
  }
  const double eta = config.eta;
  const double lambda = config.lambda;
  const double bl = config.bound_b * config.bound_l;
  const double l2 = config.bound_l * config.bound_l;
  const double c = 7.0 * eta / 6.0;
  const double two_t1 = 1.0 + 2.0 * t;
  const double big_c =
      22.0 * eta * (3.0 * std::log(two_t1) + 2.0 + bl) *
          std::log(2.0 * std::sqrt(two_t1) / delta) +
      4.0 * eta +
      2.0 * eta * std::sqrt(6.0) * c * d *
          std::log(1.0 + 2.0 * t * l2 / (d * lambda)) +
      4.0 * lambda * config.bound_b * config.bound_b;
  return std::sqrt(big_c);
}

OnePassEstimator::OnePassEstimator(const OnePassConfig& config)
    : config_(config) {
  config_.Validate();
  theta_ = Eigen::VectorXd::Zero(config_.dim);
  local_norm_ = LocalNormMatrix::ScaledIdentity(config_.dim, config_.lambda);
  step_inv_ = local_norm_.inv();
  theta_sum_ = theta_;
}

StepInfo OnePassEstimator::Step(const PreferenceSample& sample) {
  const Eigen::VectorXd& z = sample.z;
  if (z.size() != config_.dim) {
    throw std::invalid_argument("OnePassEstimator: sample dimension mismatch");
  }
  const LossDerivatives cur = ComputeLossDerivatives(theta_, z, sample.y);
  const double step_weight = config_.eta * cur.hess_weight;

  step_inv_ = local_norm_.inv();
  ShermanMorrisonInPlace(step_inv_, z, step_weight);
  Eigen::VectorXd theta_prime = theta_ - config_.eta * (step_inv_ * cur.grad);

  StepInfo info;
  if (theta_prime.norm() > config_.bound_b) {
    Eigen::MatrixXd step_mat = local_norm_.mat();
    step_mat.noalias() += step_weight * z * z.transpose();
    theta_ = ProjectLocalNormBall(theta_prime, step_mat, config_.bound_b).x;
    info.projected = true;
  } else {
    theta_ = std::move(theta_prime);
  }

  local_norm_.AddRankOne(z, SigmoidDerivative(z.dot(theta_)));
  theta_sum_ += theta_;
  ++t_;
  return info;
}

Eigen::VectorXd OnePassEstimator::AveragedTheta() const {
  return theta_sum_ / static_cast<double>(t_);
}

namespace {

constexpr std::string_view kSnapshotTag = "onepass-snapshot-v1";

using internal::ReadVector;
using internal::WriteVector;

}  // namespace

void OnePassEstimator::SaveSnapshot(std::ostream& out) const {
  const OnePassConfig& c = config_;
  fmt::print(out, "{}\n{} {} {} {} {} {} {} {}\n{}\n", kSnapshotTag, c.dim,
             c.bound_b, c.bound_l, c.eta, c.lambda, RadiusModeName(c.radius_mode),
             c.c_beta, c.delta, t_);
  WriteVector(out, theta_);
  WriteVector(out, theta_sum_);
  const Eigen::MatrixXd& h = local_norm_.mat();
  for (Eigen::Index r = 0; r < h.rows(); ++r) WriteVector(out, h.row(r));
}

OnePassEstimator OnePassEstimator::LoadSnapshot(std::istream& in) {
  std::string tag;
  in >> tag;
  if (tag != kSnapshotTag) throw std::runtime_error("snapshot: bad header");
  OnePassConfig c;
  std::string mode;
  int t = 0;
  if (!(in >> c.dim >> c.bound_b >> c.bound_l >> c.eta >> c.lambda >> mode >>
        c.c_beta >> c.delta >> t)) {
    throw std::runtime_error("snapshot: truncated config");
  }
  c.radius_mode = ParseRadiusMode(mode);
  OnePassEstimator est(c);
  if (t < 1) throw std::runtime_error("snapshot: bad iteration counter");
  est.t_ = t;
  est.theta_ = ReadVector(in, c.dim);
  est.theta_sum_ = ReadVector(in, c.dim);
  Eigen::MatrixXd h(c.dim, c.dim);
  for (int r = 0; r < c.dim; ++r) h.row(r) = ReadVector(in, c.dim).transpose();
  est.local_norm_ = LocalNormMatrix::FromMatrix(std::move(h));
  est.step_inv_ = est.local_norm_.inv();
  return est;
}

}  // namespace onepass
