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

#include "onepass/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "fmt/format.h"
#include "fmt/ostream.h"
#include "json.hpp"

namespace onepass {

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::invalid_argument(fmt::format("config key '{}': {}", key, message)),
      key_(std::move(key)) {}

std::string_view ScenarioName(Scenario s) {
  switch (s) {
    case Scenario::kPassive: return "passive";
    case Scenario::kActive: return "active";
    case Scenario::kDeploy: return "deploy";
    case Scenario::kBench: return "bench";
  }
  return "?";
}

std::string_view EstimatorName(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::kOmd: return "omd";
    case EstimatorKind::kMle: return "mle";
    case EstimatorKind::kImplicit: return "implicit";
    case EstimatorKind::kHvpCg: return "hvpcg";
  }
  return "?";
}

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw ConfigError(std::string(key),
                      fmt::format("cannot parse '{}' as a number", value));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) {
      throw ConfigError(std::string(key), "value must be finite");
    }
  }
  return out;
}

int ParseInt(std::string_view key, std::string_view value) {
  return ParseNumber<int>(key, value);
}

double ParseDouble(std::string_view key, std::string_view value) {
  return ParseNumber<double>(key, value);
}

template <typename Fn>
auto Rethrow(std::string_view key, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(key), e.what());
  }
}

void Require(bool ok, const char* key, const char* message) {
  if (!ok) throw ConfigError(key, message);
}

}  // namespace

void ApplyConfigValue(ExperimentConfig& c, std::string_view key,
                      std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  const std::string k(key);
  if (key == "scenario") {
    if (value == "passive") c.scenario = Scenario::kPassive;
    else if (value == "active") c.scenario = Scenario::kActive;
    else if (value == "deploy") c.scenario = Scenario::kDeploy;
    else if (value == "bench") c.scenario = Scenario::kBench;
    else throw ConfigError(k, fmt::format("unknown scenario '{}'", value));
  } else if (key == "estimator") {
    if (value == "omd") c.estimator = EstimatorKind::kOmd;
    else if (value == "mle") c.estimator = EstimatorKind::kMle;
    else if (value == "implicit") c.estimator = EstimatorKind::kImplicit;
    else if (value == "hvpcg") c.estimator = EstimatorKind::kHvpCg;
    else throw ConfigError(k, fmt::format("unknown estimator '{}'", value));
  } else if (key == "d") {
    c.dim = ParseInt(key, value);
  } else if (key == "contexts") {
    c.contexts = ParseInt(key, value);
  } else if (key == "actions") {
    c.actions = ParseInt(key, value);
  } else if (key == "B") {
    c.bound_b = ParseDouble(key, value);
  } else if (key == "L") {
    c.bound_l = ParseDouble(key, value);
  } else if (key == "coverage_skew") {
    c.coverage_skew = ParseDouble(key, value);
  } else if (key == "action_correlation") {
    c.action_correlation = ParseDouble(key, value);
  } else if (key == "T") {
    c.horizon = ParseInt(key, value);
  } else if (key == "seeds") {
    c.seed_count = ParseInt(key, value);
  } else if (key == "base_seed") {
    c.base_seed = ParseNumber<uint64_t>(key, value);
  } else if (key == "seed_list") {
    c.seed_list.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      c.seed_list.push_back(
          ParseNumber<uint64_t>(key, Trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else if (key == "eta") {
    c.eta = ParseDouble(key, value);
  } else if (key == "lambda") {
    c.lambda = ParseDouble(key, value);
  } else if (key == "c_beta") {
    c.c_beta = ParseDouble(key, value);
  } else if (key == "radius_mode") {
    c.radius_mode = Rethrow(key, [&] { return ParseRadiusMode(value); });
  } else if (key == "delta") {
    c.delta = ParseDouble(key, value);
  } else if (key == "explore_coeff") {
    c.explore_coeff = ParseDouble(key, value);
  } else if (key == "K") {
    c.cg_iters = ParseInt(key, value);
  } else if (key == "cg_tol") {
    c.cg_tol = ParseDouble(key, value);
  } else if (key == "lambda0") {
    c.lambda0 = ParseDouble(key, value);
  } else if (key == "damping_fn") {
    c.damping = Rethrow(key, [&] { return ParseDampingFn(value); });
  } else if (key == "mle_fit_tol") {
    c.mle_fit_tol = ParseDouble(key, value);
  } else if (key == "max_newton_iters") {
    c.max_newton_iters = ParseInt(key, value);
  } else if (key == "inner_tol") {
    c.inner_tol = ParseDouble(key, value);
  } else if (key == "max_inner_iters") {
    c.max_inner_iters = ParseInt(key, value);
  } else if (key == "policy_mode") {
    c.policy_mode = Rethrow(key, [&] { return ParsePolicyMode(value); });
  } else if (key == "out") {
    c.output_dir = std::string(value);
  } else if (key == "workers") {
    c.workers = ParseInt(key, value);
  } else {
    throw ConfigError(k, "unknown key");
  }
}

void ExperimentConfig::Resolve() {
  Require(scenario.has_value(), "scenario", "required");
  Require(dim > 0, "d", "must be positive");
  Require(contexts > 0, "contexts", "must be positive");
  Require(actions > 0, "actions", "must be positive");
  Require(bound_b > 0.0, "B", "must be positive");
  Require(bound_l > 0.0, "L", "must be positive");
  Require(coverage_skew >= 0.0 && coverage_skew <= 1.0, "coverage_skew",
          "must lie in [0, 1]");
  Require(action_correlation >= 0.0 && action_correlation < 1.0,
          "action_correlation", "must lie in [0, 1)");
  Require(horizon >= 0, "T", "must be >= 0");
  Require(seed_count >= 1, "seeds", "must be >= 1");
  Require(c_beta >= 0.0, "c_beta", "must be >= 0");
  Require(delta > 0.0 && delta <= 1.0, "delta", "must lie in (0, 1]");
  Require(explore_coeff >= 0.0, "explore_coeff", "must be >= 0");
  Require(cg_iters >= 1, "K", "must be >= 1");
  Require(cg_tol >= 0.0, "cg_tol", "must be >= 0");
  Require(lambda0 >= 0.0, "lambda0", "must be >= 0");
  Require(max_newton_iters >= 1, "max_newton_iters", "must be >= 1");
  Require(inner_tol > 0.0, "inner_tol", "must be positive");
  Require(max_inner_iters >= 1, "max_inner_iters", "must be >= 1");
  Require(workers >= 1, "workers", "must be >= 1");
  Require(!output_dir.empty(), "out", "must not be empty");
  if (eta) Require(*eta > 0.0, "eta", "must be positive");
  if (lambda) Require(*lambda > 0.0, "lambda", "must be positive");
  if (*scenario == Scenario::kActive || *scenario == Scenario::kPassive) {
    Require(actions >= 2, "actions", "passive/active need two actions");
  }
  if (!eta) eta = DefaultEta(bound_b, bound_l);
  if (!lambda) lambda = DefaultLambda(dim, bound_b, bound_l, *eta);
}

int ExperimentConfig::NumSeeds() const {
  return seed_list.empty() ? seed_count : static_cast<int>(seed_list.size());
}

uint64_t ExperimentConfig::RunSeed(int index) const {
  if (!seed_list.empty()) return seed_list.at(index);
  return SplitMix64(base_seed + static_cast<uint64_t>(index));
}

OnePassConfig ExperimentConfig::EstimatorBase() const {
  OnePassConfig base;
  base.dim = dim;
  base.bound_b = bound_b;
  base.bound_l = bound_l;
  base.eta = eta.value_or(DefaultEta(bound_b, bound_l));
  base.lambda = lambda.value_or(DefaultLambda(dim, bound_b, bound_l, base.eta));
  base.radius_mode = radius_mode;
  base.c_beta = c_beta;
  base.delta = delta;
  return base;
}

EnvironmentGen ExperimentConfig::EnvironmentFor(int index) const {
  EnvironmentGen gen;
  gen.dim = dim;
  gen.num_contexts = contexts;
  gen.num_actions = actions;
  gen.bound_b = bound_b;
  gen.bound_l = bound_l;
  gen.seed = SplitMix64(RunSeed(index));
  gen.coverage_skew = coverage_skew;
  gen.action_correlation = action_correlation;
  return gen;
}

void ApplyConfigText(ExperimentConfig& config, std::string_view text) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line),
                        fmt::format("line {}: expected key = value", line_no));
    }
    ApplyConfigValue(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

ExperimentConfig ParseConfigText(std::string_view text) {
  ExperimentConfig config;
  ApplyConfigText(config, text);
  config.Resolve();
  return config;
}

std::string FormatConfig(const ExperimentConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  if (c.scenario) put("scenario", ScenarioName(*c.scenario));
  put("estimator", EstimatorName(c.estimator));
  put("d", c.dim);
  put("contexts", c.contexts);
  put("actions", c.actions);
  put("B", c.bound_b);
  put("L", c.bound_l);
  put("coverage_skew", c.coverage_skew);
  put("action_correlation", c.action_correlation);
  put("T", c.horizon);
  put("seeds", c.seed_count);
  put("base_seed", c.base_seed);
  if (!c.seed_list.empty()) {
    put("seed_list", fmt::format("{}", fmt::join(c.seed_list, ",")));
  }
  if (c.eta) put("eta", *c.eta);
  if (c.lambda) put("lambda", *c.lambda);
  put("c_beta", c.c_beta);
  put("radius_mode", RadiusModeName(c.radius_mode));
  put("delta", c.delta);
  put("explore_coeff", c.explore_coeff);
  put("K", c.cg_iters);
  put("cg_tol", c.cg_tol);
  put("lambda0", c.lambda0);
  put("damping_fn", DampingFnName(c.damping));
  put("mle_fit_tol", c.mle_fit_tol);
  put("max_newton_iters", c.max_newton_iters);
  put("inner_tol", c.inner_tol);
  put("max_inner_iters", c.max_inner_iters);
  put("policy_mode", PolicyModeName(c.policy_mode));
  put("out", c.output_dir);
  put("workers", c.workers);
  return out;
}

std::unique_ptr<RewardEstimator> MakeEstimator(const ExperimentConfig& config) {
  const OnePassConfig base = config.EstimatorBase();
  switch (config.estimator) {
    case EstimatorKind::kOmd:
      return std::make_unique<OnePassEstimator>(base);
    case EstimatorKind::kMle: {
      MleConfig mle;
      mle.base = base;
      mle.fit_tol = config.mle_fit_tol;
      mle.max_newton_iters = config.max_newton_iters;
      return std::make_unique<MleEstimator>(mle);
    }
    case EstimatorKind::kImplicit: {
      ImplicitOmdConfig implicit;
      implicit.base = base;
      implicit.inner_tol = config.inner_tol;
      implicit.max_inner_iters = config.max_inner_iters;
      return std::make_unique<ImplicitOmdEstimator>(implicit);
    }
    case EstimatorKind::kHvpCg: {
      HvpCgConfig cg;
      cg.max_cg_iters = config.cg_iters;
      cg.cg_tol = config.cg_tol;
      cg.lambda0 = config.lambda0;
      cg.damping = config.damping;
      cg.total_steps = std::max(1, config.horizon);
      return std::make_unique<HvpCgEstimator>(base, cg);
    }
  }
  throw std::logic_error("MakeEstimator: unhandled estimator");
}

namespace {

DiagnosticsReport Diagnose(const ExperimentConfig& config,
                           const Environment& env, const RunRecord& record) {
  DiagnosticsReport report;
  report.coverage = CoverageCheck(record);
  const std::vector<Eigen::VectorXd> zs = RecordedDifferences(record, env);
  report.potential = EllipticPotentialCheck(zs, config.EstimatorBase().lambda,
                                            2.0 * config.bound_l);
  report.domination_min_eig = std::numeric_limits<double>::quiet_NaN();
  for (const AuditPoint& audit : record.summary.audits) {
    if (std::isnan(report.domination_min_eig) ||
        audit.domination_min_eig < report.domination_min_eig) {
      report.domination_min_eig = audit.domination_min_eig;
    }
  }
  const int n = static_cast<int>(record.rows.size());
  if (n >= 10) {
    report.timing = ComputeTimingProfile(
        record, {std::max(1, n / 10), std::max(1, n / 5)},
        {std::max(1, (9 * n) / 10), n});
  }
  return report;
}

}  // namespace

SeedOutcome RunSeed(const ExperimentConfig& config, int index) {
  SeedOutcome outcome;
  outcome.index = index;
  outcome.seed = config.RunSeed(index);
  try {
    const Environment env = MakeEnvironment(config.EnvironmentFor(index));
    std::unique_ptr<RewardEstimator> estimator = MakeEstimator(config);
    RunOptions options;
    options.seed = SplitMix64(outcome.seed ^ 0x5bd1e9955bd1e995ULL);
    options.horizon = config.horizon;
    options.policy_mode = config.policy_mode;
    options.explore_coeff = config.explore_coeff;
    options.audit_points = {100, 1000, config.horizon};
    options.audit_lambda = config.EstimatorBase().lambda;
    options.audit_kappa = KappaBound(config.bound_b, config.bound_l);
    switch (config.scenario.value_or(Scenario::kDeploy)) {
      case Scenario::kPassive:
        outcome.record = RunPassive(env, *estimator, options).record;
        break;
      case Scenario::kActive:
        outcome.record = RunActive(env, *estimator, options).record;
        break;
      case Scenario::kDeploy:
      case Scenario::kBench:
        outcome.record = RunDeploy(env, *estimator, options);
        break;
    }
    outcome.record.summary.seed = outcome.seed;
    outcome.diagnostics = Diagnose(config, env, outcome.record);
    if (outcome.record.summary.aborted) {
      outcome.failed = true;
      outcome.error = outcome.record.summary.abort_reason;
    }
  } catch (const std::exception& e) {
    outcome.failed = true;
    outcome.error = e.what();
  }
  return outcome;
}

Quartiles ComputeQuartiles(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  Quartiles q;
  if (values.empty()) {
    q.q1 = q.median = q.q3 = std::numeric_limits<double>::quiet_NaN();
    return q;
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  return q;
}

std::vector<SeedOutcome> RunSeeds(const ExperimentConfig& config) {
  const int n = config.NumSeeds();
  std::vector<SeedOutcome> outcomes(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) outcomes[i] = RunSeed(config, i);
  };
  const int workers = std::clamp(config.workers, 1, n);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return outcomes;
}

namespace {

using nlohmann::json;

json JsonNumber(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json SummaryJson(const ExperimentConfig& config, const SeedOutcome& o) {
  const RunSummary& s = o.record.summary;
  json j;
  j["config"] = FormatConfig(config);
  j["seed_index"] = o.index;
  j["seed"] = o.seed;
  j["scenario"] = s.scenario;
  j["estimator"] = s.estimator;
  j["T"] = s.horizon;
  j["steps_completed"] = s.steps_completed;
  j["final_subopt"] = JsonNumber(s.final_subopt);
  j["final_subopt_last_iterate"] = JsonNumber(s.final_subopt_last_iterate);
  j["cum_regret"] = JsonNumber(s.cum_regret);
  j["final_est_err_l2"] = JsonNumber(s.final_est_err_l2);
  j["final_est_err_local"] = JsonNumber(s.final_est_err_local);
  j["final_beta"] = JsonNumber(s.final_beta);
  j["total_step_nanos"] = s.total_step_nanos;
  j["projections"] = s.projections;
  j["nonconverged"] = s.nonconverged;
  j["aborted"] = s.aborted;
  j["error"] = o.error;
  j["policy"] = s.policy;
  json audits = json::array();
  for (const AuditPoint& a : s.audits) {
    audits.push_back({{"t", a.t}, {"domination_min_eig", a.domination_min_eig}});
  }
  j["audits"] = audits;
  const DiagnosticsReport& d = o.diagnostics;
  json diag;
  diag["coverage_ok"] = d.coverage.ok;
  diag["first_violation"] =
      d.coverage.first_violation ? json(*d.coverage.first_violation) : json();
  diag["potential_lhs"] = d.potential.lhs;
  diag["potential_rhs"] = d.potential.rhs;
  diag["potential_ok"] = d.potential.ok;
  diag["domination_min_eig"] = JsonNumber(d.domination_min_eig);
  if (d.timing) {
    diag["timing"] = {{"early_window_mean_ns", d.timing->early_mean_ns},
                      {"late_window_mean_ns", d.timing->late_mean_ns},
                      {"ratio", d.timing->ratio}};
  }
  j["diagnostics"] = diag;
  return j;
}

json QuartileJson(const std::vector<double>& values) {
  const Quartiles q = ComputeQuartiles(values);
  return {{"q1", JsonNumber(q.q1)},
          {"median", JsonNumber(q.median)},
          {"q3", JsonNumber(q.q3)}};
}

std::string AggregateJson(const ExperimentConfig& config,
                          const std::vector<SeedOutcome>& outcomes) {
  std::vector<double> subopt, regret, err, step_ns;
  int coverage_ok = 0;
  int potential_ok = 0;
  int failed = 0;
  for (const SeedOutcome& o : outcomes) {
    const RunSummary& s = o.record.summary;
    subopt.push_back(s.final_subopt);
    regret.push_back(s.cum_regret);
    err.push_back(s.final_est_err_l2);
    step_ns.push_back(s.steps_completed > 0
                          ? static_cast<double>(s.total_step_nanos) /
                                s.steps_completed
                          : std::numeric_limits<double>::quiet_NaN());
    coverage_ok += o.diagnostics.coverage.ok ? 1 : 0;
    potential_ok += o.diagnostics.potential.ok ? 1 : 0;
    failed += o.failed ? 1 : 0;
  }
  json j;
  j["config"] = FormatConfig(config);
  j["seeds"] = outcomes.size();
  j["failed_seeds"] = failed;
  j["final_subopt"] = QuartileJson(subopt);
  j["cum_regret"] = QuartileJson(regret);
  j["final_est_err_l2"] = QuartileJson(err);
  j["mean_step_nanos"] = QuartileJson(step_ns);
  j["coverage_ok_seeds"] = coverage_ok;
  j["potential_ok_seeds"] = potential_ok;
  return j.dump(2) + "\n";
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  }
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error(
        fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
  WriteFile(dir / "config.txt", FormatConfig(config));

  ExperimentResult result;
  result.seeds = RunSeeds(config);
  const std::string scenario(ScenarioName(config.scenario.value()));
  const std::string estimator(EstimatorName(config.estimator));
  for (const SeedOutcome& o : result.seeds) {
    const std::string stem =
        fmt::format("{}_{}_seed{:03d}", scenario, estimator, o.index);
    WriteFile(dir / (stem + ".csv"), RunCsvString(o.record));
    WriteFile(dir / (stem + ".summary.json"),
              SummaryJson(config, o).dump(2) + "\n");
    if (o.failed) {
      fmt::print(log, "seed {} failed: {}\n", o.index, o.error);
    }
  }
  result.aggregate_json = AggregateJson(config, result.seeds);
  WriteFile(dir / "aggregate.json", result.aggregate_json);
  fmt::print(log, "{} seeds written to {}\n", result.seeds.size(),
             dir.string());
  return result;
}

std::vector<BenchRow> RunBench(const ExperimentConfig& config) {
  std::vector<BenchRow> rows;
  const Environment env = MakeEnvironment(config.EnvironmentFor(0));
  const int n = config.horizon;
  if (n < 10) throw ConfigError("T", "bench needs T >= 10");
  for (EstimatorKind kind : {EstimatorKind::kOmd, EstimatorKind::kHvpCg,
                             EstimatorKind::kImplicit, EstimatorKind::kMle}) {
    ExperimentConfig c = config;
    c.estimator = kind;
    std::unique_ptr<RewardEstimator> estimator = MakeEstimator(c);
    RunOptions options;
    options.seed = SplitMix64(config.RunSeed(0) ^ 0x5bd1e9955bd1e995ULL);
    options.horizon = n;
    options.explore_coeff = config.explore_coeff;
    const RunRecord record = RunDeploy(env, *estimator, options);
    BenchRow row;
    row.estimator = std::string(EstimatorName(kind));
    row.timing = ComputeTimingProfile(record, {n / 10, n / 5},
                                      {(9 * n) / 10, n});
    row.total_seconds =
        static_cast<double>(record.summary.total_step_nanos) * 1e-9;
    rows.push_back(row);
  }
  return rows;
}

void PrintBenchTable(std::ostream& out, const std::vector<BenchRow>& rows) {
  fmt::print(out, "{:<10} {:>16} {:>16} {:>8} {:>12}\n", "estimator",
             "early_mean_ns", "late_mean_ns", "ratio", "total_s");
  for (const BenchRow& r : rows) {
    fmt::print(out, "{:<10} {:>16.1f} {:>16.1f} {:>8.3f} {:>12.4f}\n",
               r.estimator, r.timing.early_mean_ns, r.timing.late_mean_ns,
               r.timing.ratio, r.total_seconds);
  }
}

}  // namespace onepass
