"""Acceptance suite: one test per primary criterion, each printing a
[PASS]/[FAIL] line (visible under ``pytest -s``) and enforcing its stated
tolerance and runtime budget. Run with:

    pytest tests/test_acceptance.py -v -s
"""

import time

import numpy as np
import pytest

from monogrid.bench import ExperimentPlan, mean_v_by_strategy, run_plan
from monogrid.checks import (
    check_amc_p1,
    check_comparable_pairs,
    check_worked_trace,
    check_gi_count,
    check_mc_p1,
    check_rate_floors,
    check_sg_worst,
    check_si_identity,
    check_table_constants,
)
from monogrid.oracles import IllustrationOracle
from monogrid.service import create_app
from monogrid.strategies import StepRecord, StrategySpec, run_strategy, serialize_trace
from monogrid.svc import recompute_bias, select_gamma_cv, svc_fit


def _report(name, passed, detail, elapsed, budget):
    status = "PASS" if passed and elapsed < budget else "FAIL"
    print(f"[{status}] {name} ({elapsed:.1f}s / budget {budget:.0f}s): {detail}")
    assert passed, detail
    assert elapsed < budget, f"{name} exceeded its runtime budget: {elapsed:.1f}s"


def test_acceptance_si_exact_identity():
    res = check_si_identity(oracles_per_cell=50)
    _report("si-exact-identity", res.passed, res.detail, res.elapsed_s, 10.0)


def test_acceptance_sg_worst_case():
    res = check_sg_worst(staircases_per_cell=14)  # ~200 staircases across the matrix
    _report("sg-worst-case", res.passed, res.detail, res.elapsed_s, 10.0)


def test_acceptance_gi_count_identity():
    res = check_gi_count(oracles_per_cell=22)  # ~200 staircases across the matrix
    _report("gi-count-identity", res.passed, res.detail, res.elapsed_s, 60.0)


def test_acceptance_worked_trace_reproduction():
    res = check_worked_trace()
    _report("worked-trace-reproduction", res.passed, res.detail, res.elapsed_s, 5.0)


def test_acceptance_mc_p1_expectation():
    res = check_mc_p1(replicates=100_000)
    _report("mc-p1-expectation", res.passed, res.detail, res.elapsed_s, 60.0)


def test_acceptance_amc_p1_asymptote():
    res = check_amc_p1(n_tries=5000, replicates=262_144)
    _report("amc-p1-asymptote", res.passed, res.detail, res.elapsed_s, 300.0)


def test_acceptance_rate_floors():
    res = check_rate_floors(n_max=20)
    _report("rate-floors", res.passed, res.detail, res.elapsed_s, 5.0)


def test_acceptance_comparable_pairs():
    res = check_comparable_pairs(seeds=200)
    _report("comparable-pairs", res.passed, res.detail, res.elapsed_s, 30.0)


def test_acceptance_table_constants():
    res = check_table_constants()
    _report("table-constants", res.passed, res.detail, res.elapsed_s, 1.0)


@pytest.fixture(scope="module")
def desk_plan_rows():
    plan = ExperimentPlan.load("plans/fig3_p2_desk.json")
    t0 = time.perf_counter()
    rows, errors = run_plan(plan)
    return rows, errors, time.perf_counter() - t0


def test_acceptance_desk_scale_ordering(desk_plan_rows):
    rows, errors, elapsed = desk_plan_rows
    assert not errors, errors
    at64 = mean_v_by_strategy(rows, 64)
    at16 = mean_v_by_strategy(rows, 16)
    ordering = at64["ag"] < at64["amc"] < at64["mc"]
    small_n = at16["ai"] <= at16["ag"]
    grid_beats_static = all(
        mean_v_by_strategy(rows, n)["ag"] < mean_v_by_strategy(rows, n)["sg"]
        for n in (16, 64)
    )
    detail = (
        f"n=64 means: ag={at64['ag']:.4f} < amc={at64['amc']:.4f} < mc={at64['mc']:.4f}; "
        f"n=16: ai={at16['ai']:.4f} <= ag={at16['ag']:.4f}; ag<sg at shared n: {grid_beats_static}"
    )
    _report(
        "desk-scale-ordering",
        ordering and small_n and grid_beats_static,
        detail,
        elapsed,
        600.0,
    )


def test_acceptance_svc_contract():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    fitted = 0
    worst_bias_dev = 0.0
    while fitted < 50:
        p = int(rng.integers(1, 4))
        n = int(rng.integers(8, 61))
        pts = rng.random((n, p))
        labels = np.where(pts.sum(axis=1) >= p / 2.0, 1, -1)
        if len(set(labels.tolist())) < 2:
            continue
        if fitted % 7 == 0 and min((labels == -1).sum(), (labels == 1).sum()) >= 5:
            gamma = select_gamma_cv(pts, labels, seed=fitted)
        else:
            gamma = float(2.0 ** float(rng.integers(-3, 6))) / p
        model = svc_fit(pts, labels, gamma)
        assert (model.predict(model.points) == model.labels).all(), "training accuracy below 100%"
        assert (model.alphas >= 0).all(), "negative dual coefficient"
        assert abs(np.dot(model.alphas, model.labels)) <= 1e-8, "dual equality violated"
        worst_bias_dev = max(worst_bias_dev, abs(recompute_bias(model) - model.bias))
        fitted += 1
    elapsed = time.perf_counter() - t0
    _report(
        "svc-contract",
        worst_bias_dev <= 1e-10,
        f"50 separable fits at 100% training accuracy; max bias recomputation dev {worst_bias_dev:.2e}",
        elapsed,
        60.0,
    )


def test_acceptance_service_equivalence(tmp_path):
    from fastapi.testclient import TestClient

    t0 = time.perf_counter()
    oracle = IllustrationOracle()
    client = TestClient(create_app(tmp_path / "sessions"))
    spec = {"kind": "ag", "dimension": 2, "budget": 16, "seed": 0}
    sid = client.post("/sessions", json={"strategy": spec}).json()["id"]
    while True:
        body = client.post(f"/sessions/{sid}/suggest").json()
        if body.get("complete"):
            break
        label = oracle(np.asarray(body["unit"]))
        out = client.post(f"/sessions/{sid}/outcome", json={"label": label}).json()
        if out["n_evaluated"] >= 16:
            break
    doc = client.get(f"/sessions/{sid}").json()
    api_trace = serialize_trace(StepRecord.from_dict(d) for d in doc["snapshot"]["history"])
    lib_trace = serialize_trace(run_strategy(StrategySpec("ag", 2, 16, 0), oracle))
    elapsed = time.perf_counter() - t0
    _report(
        "service-equivalence",
        api_trace == lib_trace,
        f"byte-identical {len(api_trace)}-byte traces from the HTTP client and the library",
        elapsed,
        10.0,
    )
