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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>

#include "onepass/baselines.h"
#include "onepass/core_math.h"
#include "onepass/experiment.h"
#include "onepass/hvp_cg_estimator.h"
#include "onepass/onepass_estimator.h"
#include "onepass/verify.h"

namespace py = pybind11;
using namespace onepass;

namespace {

PreferenceSample MakeSample(const Eigen::VectorXd& z, int y) {
  PreferenceSample s;
  s.z = z;
  s.y = y;
  return s;
}

// Shared surface of every estimator.
template <typename T>
void BindCommon(py::class_<T>& cls) {
  cls.def(
         "step",
         [](T& est, const Eigen::VectorXd& z, int y) {
           const StepInfo info = est.Step(MakeSample(z, y));
           return py::dict(py::arg("projected") = info.projected,
                           py::arg("converged") = info.converged,
                           py::arg("inner_iterations") = info.inner_iterations);
         },
         py::arg("z"), py::arg("y"),
         "One update from feature difference z and label y (1 if a beat a').")
      .def_property_readonly("theta", [](const T& est) { return est.theta(); })
      .def_property_readonly("averaged_theta",
                             [](const T& est) { return est.AveragedTheta(); })
      .def_property_readonly("t", [](const T& est) { return est.t(); })
      .def_property_readonly("name", [](const T& est) { return std::string(est.name()); })
      .def("radius", [](const T& est) { return est.Radius(); })
      .def(
          "local_norm",
          [](const T& est, const Eigen::VectorXd& v) { return est.LocalNorm(v); },
          py::arg("v"));
}

OnePassConfig BaseConfig(int dim, double bound_b, double bound_l,
                         std::optional<double> eta, std::optional<double> lambda) {
  OnePassConfig c = OnePassConfig::WithDefaults(dim, bound_b, bound_l);
  if (eta) {
    c.eta = *eta;
    if (!lambda) c.lambda = DefaultLambda(dim, bound_b, bound_l, *eta);
  }
  if (lambda) c.lambda = *lambda;
  return c;
}

py::dict SummaryDict(const SeedOutcome& o) {
  const RunSummary& s = o.record.summary;
  py::dict d;
  d["seed_index"] = o.index;
  d["seed"] = o.seed;
  d["failed"] = o.failed;
  d["error"] = o.error;
  d["steps_completed"] = s.steps_completed;
  d["final_subopt"] = s.final_subopt;
  d["cum_regret"] = s.cum_regret;
  d["final_est_err_l2"] = s.final_est_err_l2;
  d["coverage_ok"] = o.diagnostics.coverage.ok;
  d["potential_ok"] = o.diagnostics.potential.ok;
  d["domination_min_eig"] = o.diagnostics.domination_min_eig;
  d["csv"] = RunCsvString(o.record);
  return d;
}

}  // namespace

PYBIND11_MODULE(_onepass, m) {
  m.doc() = "One-pass reward estimation for contextual dueling bandits";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("sigmoid", &Sigmoid, py::arg("w"));
  m.def("kappa_bound", &KappaBound, py::arg("B"), py::arg("L"));
  m.def("default_eta", &DefaultEta, py::arg("B"), py::arg("L"));
  m.def("default_lambda", &DefaultLambda, py::arg("d"), py::arg("B"), py::arg("L"),
        py::arg("eta"));
  m.def("sherman_morrison", &ShermanMorrison, py::arg("inv"), py::arg("z"),
        py::arg("w"));
  m.def(
      "project_local_norm_ball",
      [](const Eigen::VectorXd& theta, const Eigen::MatrixXd& m, double radius) {
        const BallQuadraticSolution s = ProjectLocalNormBall(theta, m, radius);
        return py::make_tuple(s.x, s.nu);
      },
      py::arg("theta"), py::arg("M"), py::arg("radius"));

  py::class_<OnePassEstimator> omd(m, "OnePassEstimator");
  omd.def(py::init([](int d, double b, double l, std::optional<double> eta,
                      std::optional<double> lambda) {
            return OnePassEstimator(BaseConfig(d, b, l, eta, lambda));
          }),
          py::arg("d"), py::arg("B") = 1.0, py::arg("L") = 1.0,
          py::arg("eta") = py::none(), py::arg("lambda_") = py::none())
      .def_property_readonly("H", [](const OnePassEstimator& e) {
        return e.local_norm().mat();
      })
      .def_property_readonly("H_inv", [](const OnePassEstimator& e) {
        return e.local_norm().inv();
      })
      .def("snapshot", [](const OnePassEstimator& e) {
        std::ostringstream out;
        e.SaveSnapshot(out);
        return out.str();
      })
      .def_static("from_snapshot", [](const std::string& text) {
        std::istringstream in(text);
        return OnePassEstimator::LoadSnapshot(in);
      });
  BindCommon(omd);

  py::class_<HvpCgEstimator> cg(m, "HvpCgEstimator");
  cg.def(py::init([](int d, int total_steps, int k, double lambda0,
                     const std::string& damping, double b, double l) {
           HvpCgConfig c;
           c.total_steps = total_steps;
           c.max_cg_iters = k;
           c.lambda0 = lambda0;
           c.damping = ParseDampingFn(damping);
           return HvpCgEstimator(OnePassConfig::WithDefaults(d, b, l), c);
         }),
         py::arg("d"), py::arg("total_steps"), py::arg("K") = 3,
         py::arg("lambda0") = 0.8, py::arg("damping") = "linear",
         py::arg("B") = 1.0, py::arg("L") = 1.0);
  BindCommon(cg);

  py::class_<MleEstimator> mle(m, "MleEstimator");
  mle.def(py::init([](int d, double b, double l, double fit_tol) {
            MleConfig c;
            c.base = OnePassConfig::WithDefaults(d, b, l);
            c.fit_tol = fit_tol;
            return MleEstimator(c);
          }),
          py::arg("d"), py::arg("B") = 1.0, py::arg("L") = 1.0,
          py::arg("fit_tol") = 0.0)
      .def_property_readonly("buffer_size", &MleEstimator::buffer_size);
  BindCommon(mle);

  py::class_<ImplicitOmdEstimator> implicit(m, "ImplicitOmdEstimator");
  implicit
      .def(py::init([](int d, double b, double l, std::optional<double> eta,
                       std::optional<double> lambda, double inner_tol) {
             ImplicitOmdConfig c;
             c.base = BaseConfig(d, b, l, eta, lambda);
             c.inner_tol = inner_tol;
             return ImplicitOmdEstimator(c);
           }),
           py::arg("d"), py::arg("B") = 1.0, py::arg("L") = 1.0,
           py::arg("eta") = py::none(), py::arg("lambda_") = py::none(),
           py::arg("inner_tol") = 1e-8)
      .def_property_readonly("last_subproblem_residual",
                             &ImplicitOmdEstimator::last_subproblem_residual);
  BindCommon(implicit);

  m.def(
      "resolve_config",
      [](const std::string& text) { return FormatConfig(ParseConfigText(text)); },
      py::arg("text"), "Parse and resolve config text; returns the echo form.");

  m.def(
      "run_seeds",
      [](const std::string& text) {
        const ExperimentConfig config = ParseConfigText(text);
        std::vector<SeedOutcome> outcomes;
        {
          py::gil_scoped_release release;
          outcomes = RunSeeds(config);
        }
        py::list out;
        for (const SeedOutcome& o : outcomes) out.append(SummaryDict(o));
        return out;
      },
      py::arg("text"), "Run every seed in memory; one dict per seed.");

  m.def(
      "run_experiment",
      [](const std::string& text) {
        const ExperimentConfig config = ParseConfigText(text);
        std::ostringstream log;
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = RunExperiment(config, log);
        }
        return result.aggregate_json;
      },
      py::arg("text"), "Run and write outputs; returns aggregate JSON text.");

  m.def(
      "verify",
      [](bool quick, bool inject_fault) {
        VerifyOptions opts;
        opts.quick = quick;
        opts.inject_sherman_morrison_fault = inject_fault;
        py::list out;
        for (const CheckResult& r : RunVerification(opts)) {
          out.append(py::make_tuple(r.name, r.passed, r.detail));
        }
        return out;
      },
      py::arg("quick") = true, py::arg("inject_fault") = false);
}
