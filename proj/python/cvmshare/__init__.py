# Copyright 2026 The cvmshare Authors.
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

"""Truthful data-sharing mechanisms built on Cramer-von Mises style losses."""

import csv
import io
import json

from ._cvmshare import (
    Error,
    ValidationError,
    cond_pred_cdf,
    cvm_two_sample,
    ecdf_at,
    federated_allocation_size,
    federated_alpha,
    ks_statistic,
    marketplace_payments,
    mean_diff,
    optimal_quantity,
    purchase_payments,
    run_mechanism,
)
from . import _cvmshare

__all__ = [
    "Error",
    "ValidationError",
    "cond_pred_cdf",
    "cvm_two_sample",
    "ecdf_at",
    "federated_allocation_size",
    "federated_alpha",
    "ks_statistic",
    "marketplace_payments",
    "mean_diff",
    "optimal_quantity",
    "purchase_payments",
    "run_experiment",
    "run_mechanism",
    "verify",
]


def _rows(text):
    return list(csv.DictReader(io.StringIO(text))) if text else []


def run_experiment(kind, config, **overrides):
    """Runs simulate, embed-run, marketplace or federated from config text.

    Keyword overrides replace config keys, e.g. trials=200.
    """
    results, summary, normalized = _cvmshare.run_experiment_json(
        kind, config, {k.replace("__", "."): str(v) for k, v in overrides.items()}
    )
    return {
        "results": json.loads(results),
        "summary": _rows(summary),
        "normalized": _rows(normalized),
    }


def verify(criteria, seed=None, enforce_time=True):
    """Runs the given acceptance criteria and returns one dict per criterion."""
    kwargs = {"enforce_time": enforce_time}
    if seed is not None:
        kwargs["seed"] = seed
    return [json.loads(r) for r in _cvmshare.verify_json(list(criteria), **kwargs)]
