"""Formula-vs-simulation verification suites.

Each check replays a closed-form claim against the actual machinery
(designs, strategies, exact volumes) at desk scale. The CLI's ``theory``
subcommand runs them by name; the acceptance tests assert them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ._accel import amc_worst1d_eval_counts, mc_worst1d_volumes
from .core import count_comparable_pairs, evaluate_design
from .designs import gen_lhd, gen_mc, gen_sg, gen_si
from .oracles import BoundaryCornerOracle, IllustrationOracle, Oracle, StaircaseOracle, ThresholdOracle
from .strategies import StrategySpec, run_strategy, state_from_trace
from .theory import (
    adaptive_lower_bound,
    amc_asymptote_p1,
    gg_count_bound,
    gg_rate_constant,
    gi_count_exact,
    mc_rate_constant,
    mc_worst_expected_volume_p1,
    sg_worst_volume,
    si_volume,
)
from .volume import uncertain_volume


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed_s: float


class AdversarialIntervalOracle(Oracle):
    """One-dimensional adversary realizing the 2^-n floor: answers each
    query so the larger side of the uncertain interval survives. Consistent
    with some threshold function, revealed lazily."""

    dimension = 1
    oracle_id = "adversarial-interval"

    def __init__(self):
        self.lo = 0.0
        self.hi = 1.0

    def __call__(self, x) -> int:
        v = float(np.atleast_1d(x)[0])
        if v <= self.lo:
            return -1
        if v >= self.hi:
            return 1
        if v - self.lo <= self.hi - v:
            self.lo = v
            return -1
        self.hi = v
        return 1


def _staircases(p: int, count: int, base_seed: int, resolution: int = 6):
    return [StaircaseOracle(p, resolution, base_seed + i) for i in range(count)]


def check_si_identity(oracles_per_cell: int = 50) -> CheckResult:
    t0 = time.perf_counter()
    worst = 0.0
    for p in (1, 2, 3):
        for m in range(1, 6):
            n = m**p
            expected = si_volume(p, n)
            points = gen_si(p, n)
            for oracle in _staircases(p, oracles_per_cell, base_seed=1000 * p + m):
                state = evaluate_design(points, oracle)
                got = uncertain_volume(state).v_uncertain
                worst = max(worst, abs(got - expected))
                if worst > 1e-12:
                    return CheckResult(
                        "si-identity",
                        False,
                        f"p={p} m={m} {oracle.oracle_id}: v={got!r} != {expected!r}",
                        time.perf_counter() - t0,
                    )
    return CheckResult(
        "si-identity", True, f"max |v - formula| = {worst:.2e}", time.perf_counter() - t0
    )


def check_sg_worst(staircases_per_cell: int = 15) -> CheckResult:
    t0 = time.perf_counter()
    for p in (1, 2, 3):
        for side in range(2, 7):
            n = side**p
            sup = sg_worst_volume(p, n)
            points = gen_sg(p, n)
            corner = evaluate_design(points, BoundaryCornerOracle(p))
            got = uncertain_volume(corner).v_uncertain
            if abs(got - sup) > 1e-12:
                return CheckResult(
                    "sg-worst",
                    False,
                    f"corner oracle p={p} n={n}: v={got!r} != {sup!r}",
                    time.perf_counter() - t0,
                )
            for oracle in _staircases(p, staircases_per_cell, base_seed=7000 * p + side):
                v = uncertain_volume(evaluate_design(points, oracle)).v_uncertain
                if v > sup + 1e-12:
                    return CheckResult(
                        "sg-worst",
                        False,
                        f"{oracle.oracle_id} exceeds sup at p={p} n={n}: {v!r} > {sup!r}",
                        time.perf_counter() - t0,
                    )
    return CheckResult("sg-worst", True, "corner attains the sup; no staircase exceeds it", time.perf_counter() - t0)


def _count_through_level(trace, g: int) -> int:
    return sum(1 for r in trace if r.level <= g)


def check_gi_count(oracles_per_cell: int = 22) -> CheckResult:
    t0 = time.perf_counter()
    for p in (1, 2, 3):
        for g in (1, 2, 3):
            m_exact = gi_count_exact(p, g)
            m_bound = gg_count_bound(p, g)
            for oracle in _staircases(p, oracles_per_cell, base_seed=300 * p + 37 * g):
                gi_trace = run_strategy(StrategySpec("gi", p, m_exact + 1, seed=g), oracle)
                got = _count_through_level(gi_trace, g)
                done = len(gi_trace) <= m_exact or gi_trace[m_exact].level > g
                if got != m_exact or not done:
                    return CheckResult(
                        "gi-count",
                        False,
                        f"p={p} g={g} {oracle.oracle_id}: {got} evals, formula {m_exact}",
                        time.perf_counter() - t0,
                    )
                gg_trace = run_strategy(StrategySpec("gg", p, m_bound + 1, seed=g), oracle)
                gg_got = _count_through_level(gg_trace, g)
                if gg_got > m_bound:
                    return CheckResult(
                        "gi-count",
                        False,
                        f"grouped-grid bound violated p={p} g={g}: {gg_got} > {m_bound}",
                        time.perf_counter() - t0,
                    )
    return CheckResult("gi-count", True, "inner-grid counts exact; grouped bound respected", time.perf_counter() - t0)


def check_worked_trace() -> CheckResult:
    t0 = time.perf_counter()
    oracle = IllustrationOracle()
    trace = run_strategy(StrategySpec("ag", 2, 16, seed=0), oracle)
    v8 = uncertain_volume(state_from_trace(2, trace[:8])).v_uncertain
    v16 = uncertain_volume(state_from_trace(2, trace)).v_uncertain
    ok = abs(v8 - 0.375) <= 0.01 and abs(v16 - 0.1875) <= 0.01
    return CheckResult(
        "worked-trace",
        ok,
        f"v(8)={float(v8)!r} (want 0.375), v(16)={float(v16)!r} (want 0.1875)",
        time.perf_counter() - t0,
    )


def check_mc_p1(replicates: int = 100_000) -> CheckResult:
    t0 = time.perf_counter()
    details = []
    for n in (1, 5, 10, 20):
        vols = mc_worst1d_volumes(n, replicates, seed=5150 + n)
        mean = float(vols.mean())
        se = float(vols.std(ddof=1) / math.sqrt(replicates))
        target = mc_worst_expected_volume_p1(n)
        dev = abs(mean - target)
        details.append(f"n={n}: |{mean:.5f}-{target:.5f}|={dev:.2e} vs 3se={3 * se:.2e}")
        if dev > 3 * se:
            return CheckResult("mc-p1", False, details[-1], time.perf_counter() - t0)
    return CheckResult("mc-p1", True, "; ".join(details), time.perf_counter() - t0)


def check_amc_p1(n_tries: int = 5000, replicates: int = 262_144) -> CheckResult:
    t0 = time.perf_counter()
    counts = amc_worst1d_eval_counts(n_tries, replicates, seed=909)
    mean = float(counts.mean()) - 2.0 * math.log(n_tries)
    target = amc_asymptote_p1()
    ok = abs(mean - target) <= 0.05
    return CheckResult(
        "amc-p1",
        ok,
        f"mean(m)-2ln(n)={mean:.4f}, limit={target:.4f}, replicates={replicates}",
        time.perf_counter() - t0,
    )


def check_rate_floors(n_max: int = 20) -> CheckResult:
    t0 = time.perf_counter()
    floor_fuzz = 1e-9
    for kind in ("ag", "gg", "gi", "ai", "amc", "ale"):
        oracle = AdversarialIntervalOracle()
        trace = run_strategy(StrategySpec(kind, 1, n_max, seed=11), oracle)
        for k in range(1, len(trace) + 1):
            v = uncertain_volume(state_from_trace(1, trace[:k])).v_uncertain
            if v < adaptive_lower_bound(1, k) * (1.0 - floor_fuzz):
                return CheckResult(
                    "rate-floors",
                    False,
                    f"{kind} beat the 2^-n floor at n={k}: v={v!r}",
                    time.perf_counter() - t0,
                )
    adversary = AdversarialIntervalOracle()
    mc_state = evaluate_design(gen_mc(1, n_max, seed=4), adversary)
    if uncertain_volume(mc_state).v_uncertain < 2.0**-n_max * (1 - floor_fuzz):
        return CheckResult("rate-floors", False, "uniform sampling beat the floor", time.perf_counter() - t0)
    for thresh in (0.0, 0.3, 1.0 / 3.0, 0.5, 0.77):
        trace = run_strategy(StrategySpec("gi", 1, n_max, seed=0), ThresholdOracle(thresh))
        for k in range(1, n_max + 1):
            v = uncertain_volume(state_from_trace(1, trace[:k])).v_uncertain
            if v != 2.0**-k:
                return CheckResult(
                    "rate-floors",
                    False,
                    f"inner grid at threshold {thresh}: v({k})={v!r} != 2^-{k}",
                    time.perf_counter() - t0,
                )
    return CheckResult(
        "rate-floors", True, f"floor held for all strategies; inner grid exact to n={n_max}", time.perf_counter() - t0
    )


def check_table_constants() -> CheckResult:
    t0 = time.perf_counter()
    mc_expected = {2: 2.51, 3: 2.43, 4: 2.67, 5: 2.87, 6: 3.06}
    for p, want in mc_expected.items():
        got = round(mc_rate_constant(p), 2)
        if abs(got - want) > 0.005:
            return CheckResult(
                "table-constants", False, f"uniform-design constant p={p}: {got} != {want}", time.perf_counter() - t0
            )
    for p, want in {2: 8.0, 3: 6.0}.items():
        got = gg_rate_constant(p)
        if abs(got - want) > 1e-9:
            return CheckResult(
                "table-constants", False, f"grouped-grid constant p={p}: {got} != {want}", time.perf_counter() - t0
            )
    asym = amc_asymptote_p1()
    if abs(asym - (-0.23186)) > 5e-5 or asym >= 0:
        return CheckResult("table-constants", False, f"rejection asymptote {asym}", time.perf_counter() - t0)
    return CheckResult("table-constants", True, "all tabulated constants reproduced", time.perf_counter() - t0)


def check_comparable_pairs(seeds: int = 200) -> CheckResult:
    t0 = time.perf_counter()
    sg2 = count_comparable_pairs(gen_sg(2, 81))
    sg5 = count_comparable_pairs(gen_sg(5, 243))
    if sg2 != 1944 or sg5 != 7533:
        return CheckResult(
            "comparable-pairs", False, f"grid counts {sg2}/{sg5} != 1944/7533", time.perf_counter() - t0
        )
    lhd_counts = [count_comparable_pairs(gen_lhd(2, 81, seed=s)) for s in range(seeds)]
    mc_counts = [count_comparable_pairs(gen_mc(2, 81, seed=10_000 + s)) for s in range(seeds)]
    lhd_mean = float(np.mean(lhd_counts))
    mc_mean = float(np.mean(mc_counts))
    ok = abs(lhd_mean - 1619) <= 30 and abs(mc_mean - 1620) <= 30
    return CheckResult(
        "comparable-pairs",
        ok,
        f"grid 81/243-run counts exact; lhd mean {lhd_mean:.2f} (1619 +/- 30), "
        f"mc mean {mc_mean:.2f} (1620 +/- 30)",
        time.perf_counter() - t0,
    )


def check_level_equivalence() -> CheckResult:
    """After finishing level g, adaptive and grouped grids know exactly what
    the fully evaluated (2^g+1)^p grid knows."""
    t0 = time.perf_counter()
    cases = []
    for p, g, seeds in ((1, 3, 3), (2, 2, 3), (3, 1, 2)):
        for s in range(seeds):
            cases.append((p, g, StaircaseOracle(p, 6, seed=88 + 13 * s + p)))
    cases.append((2, 3, IllustrationOracle()))
    for p, g, oracle in cases:
        sg_state = evaluate_design(gen_sg(p, (2**g + 1) ** p), oracle)
        v_ref = uncertain_volume(sg_state).v_uncertain
        for kind in ("ag", "gg"):
            budget = gg_count_bound(p, g) + 5
            trace = run_strategy(StrategySpec(kind, p, budget, seed=5), oracle)
            prefix = [r for r in trace if r.level <= g]
            if len(trace) > len(prefix) or len(trace) < budget:
                v_got = uncertain_volume(state_from_trace(p, prefix)).v_uncertain
                if abs(v_got - v_ref) > 1e-12:
                    return CheckResult(
                        "level-equivalence",
                        False,
                        f"{kind} p={p} g={g} {oracle.oracle_id}: {v_got!r} != {v_ref!r}",
                        time.perf_counter() - t0,
                    )
    return CheckResult("level-equivalence", True, "level-completion volumes match the full grid", time.perf_counter() - t0)


ALL_CHECKS = {
    "si-identity": check_si_identity,
    "sg-worst": check_sg_worst,
    "gi-count": check_gi_count,
    "worked-trace": check_worked_trace,
    "mc-p1": check_mc_p1,
    "amc-p1": check_amc_p1,
    "rate-floors": check_rate_floors,
    "table-constants": check_table_constants,
    "comparable-pairs": check_comparable_pairs,
    "level-equivalence": check_level_equivalence,
}


def run_checks(names=None):
    names = list(ALL_CHECKS) if not names else list(names)
    results = []
    for name in names:
        if name not in ALL_CHECKS:
            raise ValueError(f"unknown check {name!r}; known: {', '.join(ALL_CHECKS)}")
        results.append(ALL_CHECKS[name]())
    return results
