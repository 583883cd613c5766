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

// Command-line front end: run, verify, bench.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "fmt/ostream.h"
#include "onepass/experiment.h"
#include "onepass/verify.h"

namespace {

// Flag name and the configuration key it sets.
const std::vector<std::pair<std::string, std::string>> kFlagKeys = {
    {"--scenario", "scenario"},
    {"--estimator", "estimator"},
    {"--T", "T"},
    {"--d", "d"},
    {"--contexts", "contexts"},
    {"--actions", "actions"},
    {"--B", "B"},
    {"--L", "L"},
    {"--seeds", "seeds"},
    {"--base-seed", "base_seed"},
    {"--seed-list", "seed_list"},
    {"--out", "out"},
    {"--coverage-skew", "coverage_skew"},
    {"--action-correlation", "action_correlation"},
    {"--eta", "eta"},
    {"--lambda", "lambda"},
    {"--c-beta", "c_beta"},
    {"--radius-mode", "radius_mode"},
    {"--delta", "delta"},
    {"--explore-coeff", "explore_coeff"},
    {"--K", "K"},
    {"--cg-tol", "cg_tol"},
    {"--lambda0", "lambda0"},
    {"--damping-fn", "damping_fn"},
    {"--mle-fit-tol", "mle_fit_tol"},
    {"--max-newton-iters", "max_newton_iters"},
    {"--inner-tol", "inner_tol"},
    {"--max-inner-iters", "max_inner_iters"},
    {"--policy-mode", "policy_mode"},
    {"--workers", "workers"},
};

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void Register(CLI::App* app) {
    app->add_option("--config", config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    for (const auto& [flag, key] : kFlagKeys) {
      app->add_option(flag, values[key], "sets config key '" + key + "'");
    }
  }

  // File values first, then every flag given on the command line.
  onepass::ExperimentConfig Build(CLI::App* app,
                                  std::optional<onepass::Scenario> forced) const {
    onepass::ExperimentConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream text;
      text << in.rdbuf();
      onepass::ApplyConfigText(config, text.str());
    }
    for (const auto& [flag, key] : kFlagKeys) {
      if (app->count(flag) > 0) {
        onepass::ApplyConfigValue(config, key, values.at(key));
      }
    }
    if (forced) config.scenario = forced;
    config.Resolve();
    return config;
  }
};

int DoRun(const onepass::ExperimentConfig& config) {
  if (config.scenario == onepass::Scenario::kBench) {
    onepass::PrintBenchTable(std::cout, onepass::RunBench(config));
    return 0;
  }
  fmt::print("{}", onepass::FormatConfig(config));
  const onepass::ExperimentResult result =
      onepass::RunExperiment(config, std::cerr);
  int failed = 0;
  for (const auto& seed : result.seeds) failed += seed.failed ? 1 : 0;
  fmt::print("{}", result.aggregate_json);
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual dueling bandit simulator"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run an experiment over seeds");
  run_flags.Register(run);

  ConfigFlags bench_flags;
  CLI::App* bench =
      app.add_subcommand("bench", "per-iteration timing of every estimator");
  bench_flags.Register(bench);

  onepass::VerifyOptions verify_options;
  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_flag("--inject-fault", verify_options.inject_sherman_morrison_fault,
                   "corrupt the rank-one inverse update");
  verify->add_flag("--quick", verify_options.quick,
                   "skip the multi-seed statistical checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return onepass::Verify(std::cout, verify_options);
    if (*run) return DoRun(run_flags.Build(run, std::nullopt));
    if (*bench) {
      return DoRun(bench_flags.Build(bench, onepass::Scenario::kBench));
    }
  } catch (const onepass::ConfigError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
