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
#include <stdexcept>

#include "onepass/core_math.h"

namespace onepass {

CoverageResult CoverageCheck(const RunRecord& record) {
  CoverageResult result;
  for (const RunRow& row : record.rows) {
    if (row.est_err_local > row.beta) {
      result.ok = false;
      result.first_violation = row.t;
      break;
    }
  }
  return result;
}

PotentialResult EllipticPotentialCheck(std::span<const Eigen::VectorXd> zs,
                                       double lambda, double bound_l) {
  if (!(lambda > 0.0) || !(bound_l > 0.0)) {
    throw std::invalid_argument(
        "EllipticPotentialCheck: lambda and L must be positive");
  }
  PotentialResult result;
  if (zs.empty()) return result;
  const int d = static_cast<int>(zs.front().size());
  LocalNormMatrix v = LocalNormMatrix::ScaledIdentity(d, lambda);
  for (const Eigen::VectorXd& z : zs) {
    const double n = v.InverseNorm(z);
    result.lhs += n * n;
    v.AddRankOne(z, 1.0);
  }
  const double t = static_cast<double>(zs.size());
  result.rhs =
      2.0 * d * std::log(1.0 + t * bound_l * bound_l / (lambda * d));
  result.ok = result.lhs <= result.rhs + 1e-9;
  return result;
}

double NormDominationCheck(const Eigen::MatrixXd& h, const Eigen::MatrixXd& v,
                           double kappa) {
  if (h.rows() != v.rows() || h.cols() != v.cols()) {
    throw std::invalid_argument("NormDominationCheck: shape mismatch");
  }
  const Eigen::MatrixXd gap = h - v / kappa;
  return MinEigenvalue(0.5 * (gap + gap.transpose()));
}

TimingProfile ComputeTimingProfile(const RunRecord& record,
                                   TimingWindow early, TimingWindow late) {
  auto mean = [&](TimingWindow w) {
    double total = 0.0;
    int count = 0;
    for (const RunRow& row : record.rows) {
      if (row.t >= w.lo && row.t <= w.hi) {
        total += static_cast<double>(row.wall_nanos);
        ++count;
      }
    }
    if (count == 0) {
      throw std::invalid_argument("ComputeTimingProfile: empty window");
    }
    return total / count;
  };
  TimingProfile profile;
  profile.early_mean_ns = mean(early);
  profile.late_mean_ns = mean(late);
  profile.ratio = profile.late_mean_ns / profile.early_mean_ns;
  return profile;
}

}  // namespace onepass
