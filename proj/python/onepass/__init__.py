# Copyright 2026 The onepass-rlhf Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""One-pass reward estimation for contextual dueling bandits."""

from onepass._onepass import (
    ConfigError,
    HvpCgEstimator,
    ImplicitOmdEstimator,
    MleEstimator,
    OnePassEstimator,
    default_eta,
    default_lambda,
    kappa_bound,
    project_local_norm_ball,
    resolve_config,
    run_experiment,
    run_seeds,
    sherman_morrison,
    sigmoid,
    verify,
)

__all__ = [
    "ConfigError",
    "HvpCgEstimator",
    "ImplicitOmdEstimator",
    "MleEstimator",
    "OnePassEstimator",
    "default_eta",
    "default_lambda",
    "kappa_bound",
    "project_local_norm_ball",
    "resolve_config",
    "run_experiment",
    "run_seeds",
    "sherman_morrison",
    "sigmoid",
    "verify",
]


def config_text(**kwargs):
    """Build config text from keyword arguments, e.g. scenario="deploy", T=500."""
    return "".join(f"{k} = {v}\n" for k, v in kwargs.items())
