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

#ifndef ONEPASS_DIAGNOSTICS_H_
#define ONEPASS_DIAGNOSTICS_H_

#include <optional>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "onepass/run_record.h"

namespace onepass {

struct CoverageResult {
  bool ok = true;
  std::optional<int> first_violation;
};

// ok iff est_err_local <= beta on every recorded row.
CoverageResult CoverageCheck(const RunRecord& record);

struct PotentialResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

// sum_s ||z_s||^2_{V_s^{-1}} with V_s = lambda I + sum_{i<s} z_i z_i^T,
// against 2 d log(1 + t L^2 / (lambda d)). `bound_l` must bound every ||z_s||.
PotentialResult EllipticPotentialCheck(std::span<const Eigen::VectorXd> zs,
                                       double lambda, double bound_l);

// Smallest eigenvalue of H - V / kappa.
double NormDominationCheck(const Eigen::MatrixXd& h, const Eigen::MatrixXd& v,
                           double kappa);

struct TimingWindow {
  int lo = 0;  // inclusive iteration bounds
  int hi = 0;
};

struct TimingProfile {
  double early_mean_ns = 0.0;
  double late_mean_ns = 0.0;
  double ratio = 0.0;  // late / early
};

// Means of wall_nanos over rows whose t lies in each window. Throws
// std::invalid_argument when a window selects no rows.
TimingProfile ComputeTimingProfile(const RunRecord& record,
                                   TimingWindow early, TimingWindow late);

struct DiagnosticsReport {
  CoverageResult coverage;
  PotentialResult potential;
  double domination_min_eig = 0.0;  // min over audit points; NaN if none
  std::optional<TimingProfile> timing;
};

}  // namespace onepass

#endif  // ONEPASS_DIAGNOSTICS_H_
