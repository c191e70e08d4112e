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

import math

import pytest

import cvmshare


def test_statistics():
    assert cvmshare.cvm_two_sample([0.0], [1.0]) == 0.25
    assert cvmshare.cvm_two_sample([0.0, 2.0], [1.0]) == pytest.approx(1 / 9)
    assert cvmshare.ks_statistic([0.0, 2.0], [1.0]) == 0.5
    assert cvmshare.mean_diff([1.0, 2.0, 3.0], [4.0]) == 2.0
    assert cvmshare.ecdf_at([0.1, 0.5, 0.9], 0.5) == pytest.approx(2 / 3)


def test_predictive():
    assert cvmshare.cond_pred_cdf("beta_bernoulli", [2, 2], [1, 0], 0) == pytest.approx(4 / 7)
    z = (1 - 2 / 3) / math.sqrt(4 / 3)
    want = 0.5 * math.erfc(-z / math.sqrt(2))
    assert cvmshare.cond_pred_cdf("normal_normal", [], [1.0], 1.0) == pytest.approx(want, abs=1e-12)


def test_mechanism_reports():
    subs = [[0.1, 0.4, 0.8], [0.2, 0.6], [0.3, 0.5, 0.9]]
    a = cvmshare.run_mechanism("alg3", subs, seed=5)
    b = cvmshare.run_mechanism("alg3", subs, seed=5)
    assert len(a) == 3
    assert [r["tau"] for r in a] == [r["tau"] for r in b]
    assert all(0 <= r["tau"] <= 1 for r in a)
    bb = cvmshare.run_mechanism("alg1", [[1, 0], [1, 1, 0]], seed=1,
                                model="beta_bernoulli", params=[2, 2])
    assert len(bb) == 2
    vec = cvmshare.run_mechanism("alg3", [[0, 1, 2, 3], [1, 1, 0, 5, 4, 0]], seed=2, dim=2)
    assert len(vec[0]["per_feature"]) == 2


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        cvmshare.run_mechanism("alg1", [[0.1], [0.2, 0.3]], seed=1)
    with pytest.raises(cvmshare.ValidationError):
        cvmshare.run_experiment("simulate", "trials = 10\n")


def test_applications():
    assert cvmshare.purchase_payments(100, [0, 1, 0.25, 0, 0, 0, 0, 0, 0, 0])[2] == pytest.approx(7.5)
    assert cvmshare.optimal_quantity("sqrt:10", 1.0, 1000) == 25
    payments, charge = cvmshare.marketplace_payments(100, 0.5, [0.2, 0, 0, 0])
    assert payments[0] == pytest.approx(22.5)
    assert charge <= 100
    assert cvmshare.federated_alpha("sqrt:1", 100, 400, 0.005) == pytest.approx(50)
    assert cvmshare.federated_allocation_size("sqrt:1", 50, 0.005, 400) == 225


def test_experiment_roundtrip():
    cfg = "seed = 3\ngenerator = uniform\nmethods = alg3, ks\nstrategies = duplicate\n"
    out = cvmshare.run_experiment("simulate", cfg, trials=40)
    again = cvmshare.run_experiment("simulate", cfg, trials=40)
    assert out["results"] == again["results"]
    assert {row["method"] for row in out["summary"]} == {"alg3", "ks"}


def test_verify_fast_criteria():
    results = cvmshare.verify([9, 13], enforce_time=False)
    assert [r["id"] for r in results] == [9, 13]
    assert all(r["passed"] for r in results)
