# Copyright 2026 The ldpc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Locally private frequency and mean estimation."""

from ldpc._ldpc import (
    ConfigError,
    MeanParams,
    RapporParams,
    WireError,
    cap_fraction,
    choose_generalized_params,
    choose_params,
    estimate_mean,
    find_prime,
    frequency_oracle,
    histogram,
    is_prime,
    optimize_split,
    pack_report,
    params_for_field,
    pi_rappor_encode,
    privhs_norm,
    privunit_params,
    run_experiment,
    theoretical_variance,
)

__all__ = [
    "ConfigError",
    "MeanParams",
    "RapporParams",
    "WireError",
    "cap_fraction",
    "choose_generalized_params",
    "choose_params",
    "estimate_mean",
    "find_prime",
    "frequency_oracle",
    "histogram",
    "is_prime",
    "optimize_split",
    "pack_report",
    "params_for_field",
    "pi_rappor_encode",
    "privhs_norm",
    "privunit_params",
    "run_experiment",
    "theoretical_variance",
]
