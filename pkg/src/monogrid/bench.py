"""Benchmark harness: strategy x oracle x budget matrices over seeded
replicates, reporting uncertain volume and classification accuracy.

Adaptive strategies run one trace per replicate and emit rows from its
prefixes; grid and Latin hypercube baselines are regenerated per budget
(a prefix of a larger grid is not a smaller grid), uniform sampling uses
prefixes. Deterministic under the plan's master seed; wall-clock columns
are excluded from the determinism hash.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .core import DesignState, evaluate_design
from .designs import gen_lhd, gen_mc, gen_sg, gen_si
from .oracles import ArctanContourOracle, make_oracle
from .strategies import ADAPTIVE_KINDS, StrategySpec, run_strategy, state_from_trace
from .svc import fit_predictor
from .volume import uncertain_volume_auto

STATIC_BENCH_KINDS = ("mc", "sg", "si", "lhd")


@dataclass(frozen=True)
class ExperimentPlan:
    dimension: int
    oracle: dict  # family descriptor, e.g. {"kind": "arctan", "mu_range": [a, b], "draws": 20}
    strategies: tuple  # of kind strings
    budgets: tuple  # strictly increasing ints
    test_points: int = 100_000
    master_seed: int = 0
    parallelism: int = 1
    fit_classifier: bool = True
    amc_max_attempts: int = 1_000_000

    def __post_init__(self):
        budgets = tuple(self.budgets)
        if any(b <= 0 for b in budgets) or any(
            b2 <= b1 for b1, b2 in zip(budgets, budgets[1:])
        ):
            raise ValueError("budgets must be positive and strictly increasing")
        for kind in self.strategies:
            if kind not in ADAPTIVE_KINDS + STATIC_BENCH_KINDS:
                raise ValueError(f"unknown strategy kind {kind!r}")

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "oracle": self.oracle,
            "strategies": list(self.strategies),
            "budgets": list(self.budgets),
            "test_points": self.test_points,
            "master_seed": self.master_seed,
            "parallelism": self.parallelism,
            "fit_classifier": self.fit_classifier,
            "amc_max_attempts": self.amc_max_attempts,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        return cls(
            dimension=int(data["dimension"]),
            oracle=dict(data["oracle"]),
            strategies=tuple(data["strategies"]),
            budgets=tuple(int(b) for b in data["budgets"]),
            test_points=int(data.get("test_points", 100_000)),
            master_seed=int(data.get("master_seed", 0)),
            parallelism=int(data.get("parallelism", 1)),
            fit_classifier=bool(data.get("fit_classifier", True)),
            amc_max_attempts=int(data.get("amc_max_attempts", 1_000_000)),
        )

    @classmethod
    def load(cls, path) -> "ExperimentPlan":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class ResultRow:
    strategy: str
    p: int
    oracle_id: str
    n: int
    v_uncertain: float | None
    accuracy: float | None
    gamma: object  # float, "majority", "error", or None
    wall_time_ms: int

    def csv_values(self):
        return [
            self.strategy,
            self.p,
            self.oracle_id,
            self.n,
            "" if self.v_uncertain is None else repr(float(self.v_uncertain)),
            "" if self.accuracy is None else repr(float(self.accuracy)),
            "" if self.gamma is None else (repr(float(self.gamma)) if isinstance(self.gamma, float) else self.gamma),
            self.wall_time_ms,
        ]


CSV_HEADER = ["strategy", "p", "oracle_id", "n", "v_uncertain", "accuracy", "gamma", "wall_time_ms"]


def _replicate_oracles(plan: ExperimentPlan):
    """Materialize the oracle for every replicate of the plan's family."""
    spec = plan.oracle
    kind = spec["kind"]
    if kind == "arctan":
        if "mu" in spec:
            return [ArctanContourOracle(plan.dimension, float(spec["mu"]))]
        lo, hi = spec["mu_range"]
        draws = int(spec.get("draws", 20))
        rng = np.random.default_rng(np.random.SeedSequence([plan.master_seed, 0xA1]))
        mus = lo + (hi - lo) * rng.random(draws)
        return [ArctanContourOracle(plan.dimension, float(mu)) for mu in mus]
    if kind == "staircase":
        draws = int(spec.get("draws", 20))
        res = int(spec.get("resolution", 8))
        return [
            make_oracle("staircase", plan.dimension, resolution=res, seed=plan.master_seed * 1000 + r)
            for r in range(draws)
        ]
    extra = {k: v for k, v in spec.items() if k != "kind"}
    return [make_oracle(kind, plan.dimension, **extra)]


def _seed_for(master_seed: int, rep: int, strat: int) -> int:
    ss = np.random.SeedSequence([master_seed, rep, strat])
    return int(ss.generate_state(1)[0])


def accuracy_eval(predictor, oracle, test_points: int, seed: int) -> float:
    """Fraction of seeded uniform test inputs predicted correctly."""
    rng = np.random.default_rng(seed)
    pts = oracle.sample_inputs(rng, test_points)
    truth = oracle.label_many(pts)
    pred = predictor.predict(pts)
    return float((pred == truth).mean())


class CertainRegionPredictor:
    """Hybrid used for the accuracy/volume coupling check: defers to the
    implied label where one exists, else to the fitted classifier."""

    def __init__(self, state: DesignState, fallback):
        self.state = state
        self.fallback = fallback

    def predict(self, queries) -> np.ndarray:
        queries = np.atleast_2d(queries)
        codes = self.state.classify_many(queries).astype(np.int64)
        unknown = codes == 0
        if np.any(unknown):
            codes[unknown] = self.fallback.predict(queries[unknown])
        return codes


def negative_proportion_track(trace) -> list:
    """Running fraction of negative outcomes after each evaluation."""
    if not trace:
        raise ValueError("trace must be nonempty")
    labels = np.array([r.label for r in trace])
    return list(np.cumsum(labels == -1) / np.arange(1, labels.size + 1))


def _checkpoint_states(plan: ExperimentPlan, kind: str, oracle, seed: int):
    """Yield (n, DesignState) at each budget for one replicate/strategy."""
    p = plan.dimension
    max_budget = plan.budgets[-1]
    if kind in ADAPTIVE_KINDS:
        spec = StrategySpec(
            kind=kind,
            dimension=p,
            budget=max_budget,
            seed=seed,
            amc_max_attempts=plan.amc_max_attempts,
        )
        trace = run_strategy(spec, oracle)
        for b in plan.budgets:
            prefix = [r for r in trace if r.index <= b]
            yield b, state_from_trace(p, prefix)
    elif kind == "mc":
        points = gen_mc(p, max_budget, seed)
        for b in plan.budgets:
            yield b, evaluate_design(points[:b], oracle)
    else:
        for b in plan.budgets:
            try:
                if kind == "sg":
                    points = gen_sg(p, b)
                elif kind == "si":
                    points = gen_si(p, b)
                else:
                    points = gen_lhd(p, b, seed)
            except ValueError:
                continue  # budget is not a valid size for this design
            yield b, evaluate_design(points, oracle)


def _run_cell(plan: ExperimentPlan, rep: int, strat_idx: int):
    """All rows for one (replicate, strategy) pair."""
    kind = plan.strategies[strat_idx]
    oracle = _replicate_oracles(plan)[rep]
    oracle_id = f"{oracle.oracle_id}#r{rep}"
    seed = _seed_for(plan.master_seed, rep, strat_idx)
    rows = []
    try:
        for n, state in _checkpoint_states(plan, kind, oracle, seed):
            t0 = time.perf_counter()
            report = uncertain_volume_auto(state, seed=seed)
            accuracy = None
            gamma_out = None
            if plan.fit_classifier and state.n_evaluated > 0:
                predictor, gamma = fit_predictor(
                    state.points, state.labels, seed=_seed_for(seed, n, 1)
                )
                gamma_out = float(gamma) if gamma is not None else "majority"
                accuracy = accuracy_eval(
                    predictor, oracle, plan.test_points, _seed_for(seed, n, 2)
                )
            ms = int(round((time.perf_counter() - t0) * 1000.0))
            rows.append(
                ResultRow(kind, plan.dimension, oracle_id, n, report.v_uncertain, accuracy, gamma_out, ms)
            )
    except Exception as exc:  # noqa: BLE001 - recorded, never aborts the plan
        rows.append(ResultRow(kind, plan.dimension, oracle_id, -1, None, None, "error", 0))
        return rows, [f"{kind}/{oracle_id}: {exc}"]
    return rows, []


def _run_cell_args(args):
    plan_dict, rep, strat_idx = args
    return _run_cell(ExperimentPlan.from_dict(plan_dict), rep, strat_idx)


def run_plan(plan: ExperimentPlan):
    """Execute the full matrix; returns (rows, errors).

    Replicates are independent and may run across a worker pool; rows are
    sorted before return, so aggregation is order-insensitive.
    """
    n_reps = len(_replicate_oracles(plan))
    cells = [(rep, s) for rep in range(n_reps) for s in range(len(plan.strategies))]
    rows: list[ResultRow] = []
    errors: list[str] = []
    if plan.parallelism > 1 and len(cells) > 1:
        args = [(plan.to_dict(), rep, s) for rep, s in cells]
        with ProcessPoolExecutor(max_workers=plan.parallelism) as pool:
            for cell_rows, cell_errors in pool.map(_run_cell_args, args):
                rows.extend(cell_rows)
                errors.extend(cell_errors)
    else:
        for rep, s in cells:
            cell_rows, cell_errors = _run_cell(plan, rep, s)
            rows.extend(cell_rows)
            errors.extend(cell_errors)
    rows.sort(key=lambda r: (r.strategy, r.oracle_id, r.n))
    return rows, errors


def determinism_hash(rows) -> str:
    """Content hash over everything except wall-clock columns."""
    h = hashlib.sha256()
    for row in rows:
        h.update("|".join(str(v) for v in row.csv_values()[:-1]).encode())
        h.update(b"\n")
    return h.hexdigest()


def emit_results(rows, path, plan: ExperimentPlan | None = None, errors=None) -> None:
    """CSV with the fixed column order plus a JSON metadata sidecar."""
    path = str(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.csv_values())
    meta = {
        "version": __version__,
        "determinism_hash": determinism_hash(rows),
        "errors": list(errors or []),
        "notes": [
            "plain seeded LHD substituted for the distance-optimized variant",
            "SVC width grid {2^k / p, k=-6..6} and stratified CV fold seeding are library conventions",
        ],
    }
    if plan is not None:
        meta["plan"] = plan.to_dict()
        meta["master_seed"] = plan.master_seed
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)


def read_results(path):
    """Round-trip reader for emitted CSVs."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        for rec in reader:
            gamma: object
            if rec[6] == "":
                gamma = None
            elif rec[6] in ("majority", "error"):
                gamma = rec[6]
            else:
                gamma = float(rec[6])
            rows.append(
                ResultRow(
                    strategy=rec[0],
                    p=int(rec[1]),
                    oracle_id=rec[2],
                    n=int(rec[3]),
                    v_uncertain=None if rec[4] == "" else float(rec[4]),
                    accuracy=None if rec[5] == "" else float(rec[5]),
                    gamma=gamma,
                    wall_time_ms=int(rec[7]),
                )
            )
    return rows


def mean_v_by_strategy(rows, n: int) -> dict:
    """Mean uncertain volume per strategy at a fixed budget."""
    acc: dict = {}
    for row in rows:
        if row.n == n and row.v_uncertain is not None:
            acc.setdefault(row.strategy, []).append(row.v_uncertain)
    return {k: float(np.mean(v)) for k, v in acc.items()}
