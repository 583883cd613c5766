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

#ifndef ONEPASS_EXPERIMENT_H_
#define ONEPASS_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onepass/baselines.h"
#include "onepass/diagnostics.h"
#include "onepass/environment.h"
#include "onepass/hvp_cg_estimator.h"
#include "onepass/onepass_estimator.h"
#include "onepass/scenarios.h"

namespace onepass {

// Configuration problem tied to one key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Scenario { kPassive, kActive, kDeploy, kBench };
enum class EstimatorKind { kOmd, kMle, kImplicit, kHvpCg };

std::string_view ScenarioName(Scenario s);
std::string_view EstimatorName(EstimatorKind e);

struct ExperimentConfig {
  std::optional<Scenario> scenario;
  EstimatorKind estimator = EstimatorKind::kOmd;
  int dim = 5;
  int contexts = 8;
  int actions = 4;
  double bound_b = 1.0;
  double bound_l = 1.0;
  double coverage_skew = 0.0;
  double action_correlation = 0.0;
  int horizon = 2000;
  int seed_count = 20;
  uint64_t base_seed = 0;
  std::vector<uint64_t> seed_list;  // overrides base_seed/seed_count
  // Unset values resolve to the default step size / regularizer formulas.
  std::optional<double> eta;
  std::optional<double> lambda;
  double c_beta = 1.0;
  RadiusMode radius_mode = RadiusMode::kPractical;
  double delta = 0.1;
  double explore_coeff = 1.0;
  int cg_iters = 3;
  double cg_tol = 1e-10;
  double lambda0 = 0.8;
  DampingFn damping = DampingFn::kLinear;
  double mle_fit_tol = 0.0;  // <= 0: 1/t
  int max_newton_iters = 50;
  double inner_tol = 1e-8;
  int max_inner_iters = 50;
  PolicyMode policy_mode = PolicyMode::kEnumerate;
  std::string output_dir = "onepass_out";
  int workers = 1;

  // Fills eta/lambda and checks ranges; throws ConfigError.
  void Resolve();
  int NumSeeds() const;
  uint64_t RunSeed(int index) const;
  OnePassConfig EstimatorBase() const;
  EnvironmentGen EnvironmentFor(int index) const;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

// Sets one key from its textual value; throws ConfigError naming the key.
void ApplyConfigValue(ExperimentConfig& config, std::string_view key,
                      std::string_view value);

// "key = value" lines, '#' comments, blank lines ignored. Applies each line
// without resolving.
void ApplyConfigText(ExperimentConfig& config, std::string_view text);

// ApplyConfigText on a default configuration, then Resolve().
ExperimentConfig ParseConfigText(std::string_view text);

// Resolved configuration as parseable "key = value" lines.
std::string FormatConfig(const ExperimentConfig& config);

std::unique_ptr<RewardEstimator> MakeEstimator(const ExperimentConfig& config);

struct SeedOutcome {
  int index = 0;
  uint64_t seed = 0;
  RunRecord record;
  DiagnosticsReport diagnostics;
  bool failed = false;
  std::string error;
};

// Builds the environment and estimator for seed `index`, runs the scenario
// and computes the diagnostics. Estimator failures end up in the record.
SeedOutcome RunSeed(const ExperimentConfig& config, int index);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

// Linear-interpolation quartiles; NaN entries are dropped.
Quartiles ComputeQuartiles(std::vector<double> values);

struct ExperimentResult {
  std::vector<SeedOutcome> seeds;  // ordered by seed index
  std::string aggregate_json;
};

// Runs every seed (up to `workers` concurrently) and writes, per seed,
// <scenario>_<estimator>_seed<NNN>.csv and .summary.json, plus
// aggregate.json and config.txt into output_dir. Throws std::runtime_error
// on I/O failure.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               std::ostream& log);

// Same runs without touching the filesystem.
std::vector<SeedOutcome> RunSeeds(const ExperimentConfig& config);

struct BenchRow {
  std::string estimator;
  TimingProfile timing;
  double total_seconds = 0.0;
};

// Deploy scenario for each estimator on the first seed; per-iteration update
// time over the early [T/10, T/5] and late [9T/10, T] windows.
std::vector<BenchRow> RunBench(const ExperimentConfig& config);
void PrintBenchTable(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace onepass

#endif  // ONEPASS_EXPERIMENT_H_
