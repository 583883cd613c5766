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

#ifndef ONEPASS_RUN_RECORD_H_
#define ONEPASS_RUN_RECORD_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace onepass {

// One scenario iteration. Estimation metrics describe the state after the
// estimator consumed sample t (theta_{t+1}, H_{t+1}, beta_{t+1}).
struct RunRow {
  int t = 0;
  int64_t wall_nanos = 0;  // estimator update only
  double est_err_l2 = 0.0;
  double est_err_local = 0.0;
  double beta = 0.0;
  std::optional<double> cum_regret;
  std::optional<double> subopt_checkpoint;
  int x = 0;
  int a = 0;
  int a_prime = 0;
  int y = 0;
  std::string flags;
};

struct AuditPoint {
  int t = 0;
  // Smallest eigenvalue of H - V / kappa at iteration t.
  double domination_min_eig = std::numeric_limits<double>::quiet_NaN();
};

struct RunSummary {
  std::string scenario;
  std::string estimator;
  uint64_t seed = 0;
  int horizon = 0;
  int steps_completed = 0;
  double final_subopt = std::numeric_limits<double>::quiet_NaN();
  double final_subopt_last_iterate = std::numeric_limits<double>::quiet_NaN();
  double cum_regret = std::numeric_limits<double>::quiet_NaN();
  double final_est_err_l2 = std::numeric_limits<double>::quiet_NaN();
  double final_est_err_local = std::numeric_limits<double>::quiet_NaN();
  double final_beta = std::numeric_limits<double>::quiet_NaN();
  int64_t total_step_nanos = 0;
  int projections = 0;
  int nonconverged = 0;
  bool aborted = false;
  std::string abort_reason;
  std::vector<int> policy;
  std::vector<AuditPoint> audits;
};

struct RunRecord {
  std::vector<RunRow> rows;
  RunSummary summary;
};

inline constexpr std::string_view kRunCsvHeader =
    "t,wall_nanos,est_err_l2,est_err_local,beta,cum_regret,subopt_checkpoint,"
    "x,a,a_prime,y,flags";

// UTF-8, header row, '\n' line endings, shortest round-trip doubles, empty
// cells for absent values.
void WriteRunCsv(std::ostream& out, const RunRecord& record);
std::string RunCsvString(const RunRecord& record);

}  // namespace onepass

#endif  // ONEPASS_RUN_RECORD_H_
