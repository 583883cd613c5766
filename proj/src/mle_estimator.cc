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

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "Eigen/Dense"
#include "fmt/format.h"
#include "fmt/ostream.h"
#include "onepass/baselines.h"
#include "text_io.h"

namespace onepass {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 60;

Eigen::VectorXd ProjectEuclidean(Eigen::VectorXd v, double radius) {
  const double n = v.norm();
  if (n > radius) v *= radius / n;
  return v;
}

double ProjectedGradNorm(const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& grad, double radius) {
  return (theta - ProjectEuclidean(theta - grad, radius)).norm();
}

struct Objective {
  const Eigen::Ref<const Eigen::MatrixXd>& zs;
  const Eigen::Ref<const Eigen::VectorXd>& ys;

  double Value(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd w = zs.transpose() * theta;
    double total = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      total += ys(i) > 0.5 ? Softplus(-w(i)) : Softplus(w(i));
    }
    return total;
  }
};

}  // namespace

LogisticFitResult FitLogisticInBall(const Eigen::Ref<const Eigen::MatrixXd>& zs,
                                    const Eigen::Ref<const Eigen::VectorXd>& ys,
                                    const Eigen::VectorXd& start,
                                    double radius, double tol, int max_iters) {
  const Eigen::Index dim = zs.rows();
  const Eigen::Index n = zs.cols();
  if (start.size() != dim || ys.size() != n) {
    throw std::invalid_argument("FitLogisticInBall: dimension mismatch");
  }
  const Objective objective{zs, ys};
  LogisticFitResult out;
  out.theta = ProjectEuclidean(start, radius);
  if (n == 0) {
    out.converged = true;
    return out;
  }

  Eigen::VectorXd sig(n);
  Eigen::VectorXd weight(n);
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd w = zs.transpose() * out.theta;
    double value = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const SigmoidValues s = SigmoidFamily(w(i));
      sig(i) = s.sigma;
      weight(i) = s.dsigma;
      value += ys(i) > 0.5 ? Softplus(-w(i)) : Softplus(w(i));
    }
    const Eigen::VectorXd grad = zs * (sig - ys);
    out.projected_grad_norm = ProjectedGradNorm(out.theta, grad, radius);
    out.iterations = iter;
    if (out.projected_grad_norm <= tol) {
      out.converged = true;
      return out;
    }
    if (iter >= max_iters) return out;

    Eigen::MatrixXd hess = zs * weight.asDiagonal() * zs.transpose();
    hess.diagonal().array() += 1e-12 * (1.0 + hess.trace());
    const Eigen::VectorXd newton =
        SolveBallConstrainedQuadratic(hess, hess * out.theta - grad, radius).x;

    // Newton direction first; projected gradient if it fails to descend.
    bool moved = false;
    for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
      Eigen::VectorXd dir;
      if (attempt == 0) {
        dir = newton - out.theta;
      } else {
        const double lipschitz = 0.25 * zs.colwise().squaredNorm().sum();
        dir = ProjectEuclidean(out.theta - grad / std::max(lipschitz, 1e-12),
                               radius) -
              out.theta;
      }
      const double slope = grad.dot(dir);
      if (!(slope < 0.0)) continue;
      double step = 1.0;
      for (int k = 0; k < kMaxBacktracks; ++k, step *= kShrink) {
        const Eigen::VectorXd trial = out.theta + step * dir;
        if (objective.Value(trial) <= value + kArmijo * step * slope) {
          out.theta = trial;
          moved = true;
          break;
        }
      }
    }
    if (!moved) return out;
  }
}

MleEstimator::MleEstimator(const MleConfig& config) : config_(config) {
  config_.base.Validate();
  if (config_.max_newton_iters < 1) {
    throw std::invalid_argument("MleEstimator: max_newton_iters must be >= 1");
  }
  const int d = config_.base.dim;
  kappa_ = KappaBound(config_.base.bound_b, config_.base.bound_l);
  const double v_reg =
      config_.v_reg > 0.0 ? config_.v_reg : config_.base.lambda * kappa_;
  v_ = LocalNormMatrix::ScaledIdentity(d, v_reg);
  zs_.resize(d, 64);
  ys_.resize(64);
  theta_ = Eigen::VectorXd::Zero(d);
  theta_sum_ = theta_;
  last_fit_.theta = theta_;
  last_fit_.converged = true;
}

void MleEstimator::Append(const Eigen::VectorXd& z, int y) {
  if (count_ == zs_.cols()) {
    const Eigen::Index cap = 2 * zs_.cols();
    zs_.conservativeResize(Eigen::NoChange, cap);
    ys_.conservativeResize(cap);
  }
  zs_.col(count_) = z;
  ys_(count_) = y;
  ++count_;
}

double MleEstimator::Radius() const {
  return std::sqrt(kappa_) * ConfidenceRadius(t_, config_.base);
}

LogisticFitResult MleEstimator::Refit(const Eigen::VectorXd& start,
                                      double tol) const {
  return FitLogisticInBall(zs_.leftCols(count_), ys_.head(count_), start,
                           config_.base.bound_b, tol, config_.max_newton_iters);
}

StepInfo MleEstimator::Step(const PreferenceSample& sample) {
  if (sample.z.size() != config_.base.dim) {
    throw std::invalid_argument("MleEstimator: sample dimension mismatch");
  }
  if (sample.y != 0 && sample.y != 1) {
    throw std::invalid_argument("MleEstimator: label must be 0/1");
  }
  Append(sample.z, sample.y);
  const double tol =
      config_.fit_tol > 0.0 ? config_.fit_tol : 1.0 / static_cast<double>(t_);
  last_fit_ = Refit(theta_, tol);
  theta_ = last_fit_.theta;
  v_.AddRankOne(sample.z, 1.0);
  theta_sum_ += theta_;
  ++t_;
  StepInfo info;
  info.converged = last_fit_.converged;
  info.inner_iterations = last_fit_.iterations;
  return info;
}

namespace {
constexpr std::string_view kMleSnapshotTag = "onepass-mle-snapshot-v1";
}  // namespace

void MleEstimator::SaveSnapshot(std::ostream& out) const {
  const OnePassConfig& c = config_.base;
  fmt::print(out, "{}\n{} {} {} {} {} {} {} {}\n{} {} {}\n{} {}\n",
             kMleSnapshotTag, c.dim, c.bound_b, c.bound_l, c.eta, c.lambda,
             RadiusModeName(c.radius_mode), c.c_beta, c.delta, config_.fit_tol,
             config_.max_newton_iters, config_.v_reg, t_, count_);
  internal::WriteVector(out, theta_);
  internal::WriteVector(out, theta_sum_);
  const Eigen::MatrixXd& v = v_.mat();
  for (Eigen::Index r = 0; r < v.rows(); ++r) internal::WriteVector(out, v.row(r));
  for (int i = 0; i < count_; ++i) {
    fmt::print(out, "{} ", static_cast<int>(ys_(i)));
    internal::WriteVector(out, zs_.col(i));
  }
}

MleEstimator MleEstimator::LoadSnapshot(std::istream& in) {
  std::string tag;
  in >> tag;
  if (tag != kMleSnapshotTag) throw std::runtime_error("snapshot: bad header");
  MleConfig config;
  OnePassConfig& c = config.base;
  std::string mode;
  int t = 0;
  int count = 0;
  if (!(in >> c.dim >> c.bound_b >> c.bound_l >> c.eta >> c.lambda >> mode >>
        c.c_beta >> c.delta >> config.fit_tol >> config.max_newton_iters >>
        config.v_reg >> t >> count)) {
    throw std::runtime_error("snapshot: truncated header");
  }
  c.radius_mode = ParseRadiusMode(mode);
  if (t < 1 || count < 0) throw std::runtime_error("snapshot: bad counters");
  MleEstimator est(config);
  est.t_ = t;
  est.theta_ = internal::ReadVector(in, c.dim);
  est.theta_sum_ = internal::ReadVector(in, c.dim);
  Eigen::MatrixXd v(c.dim, c.dim);
  for (int r = 0; r < c.dim; ++r) {
    v.row(r) = internal::ReadVector(in, c.dim).transpose();
  }
  est.v_ = LocalNormMatrix::FromMatrix(std::move(v));
  for (int i = 0; i < count; ++i) {
    int y = 0;
    if (!(in >> y)) throw std::runtime_error("snapshot: truncated buffer");
    est.Append(internal::ReadVector(in, c.dim), y);
  }
  est.last_fit_.theta = est.theta_;
  return est;
}

}  // namespace onepass
