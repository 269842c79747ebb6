"""Sequential design strategies.

Grid strategies walk a nested sequence of dyadic grids (boundary-including
or interior-only), either evaluating whole level groups in random order or
greedily picking the candidate whose outcome is guaranteed to settle the
most others. The rejection sampler draws uniforms and evaluates only points
whose label is still unknown; the entropy sampler scores a calibrated SVC
over a jittered grid.

Runners are resumable: ``propose()`` returns the next input (idempotent
until ``feed(label)`` records its outcome), which is what the interactive
session service drives. ``run_strategy`` is the closed-loop driver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._accel import dominance_counts
from .core import DesignState
from .designs import StaticDesignSpec, gen_static
from .svc import MajorityFallbackSignal, platt_calibrate, select_gamma_cv, svc_fit

ADAPTIVE_KINDS = ("amc", "gg", "ag", "gi", "ai", "ale")

# grid levels are abandoned once their point count would pass this cap
GRID_POINT_CAP = 1 << 26
DEFAULT_AMC_MAX_ATTEMPTS = 1_000_000


class GridResolutionError(RuntimeError):
    pass


class OracleFailure(RuntimeError):
    def __init__(self, point, cause):
        self.point = np.asarray(point, dtype=float)
        super().__init__(f"oracle failed at {self.point.tolist()}: {cause}")


@dataclass(frozen=True)
class StrategySpec:
    kind: str
    dimension: int
    budget: int
    seed: int = 0
    amc_max_attempts: int = DEFAULT_AMC_MAX_ATTEMPTS
    ale_initial: StaticDesignSpec | None = None
    ale_grid_base: int = 64
    ale_grid_extra: int = 16

    def __post_init__(self):
        if self.kind not in ADAPTIVE_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.dimension < 1 or self.budget < 0:
            raise ValueError("dimension must be >= 1 and budget >= 0")
        if self.amc_max_attempts < 1:
            raise ValueError("amc_max_attempts must be >= 1")

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "dimension": self.dimension,
            "budget": self.budget,
            "seed": self.seed,
            "amc_max_attempts": self.amc_max_attempts,
            "ale_grid_base": self.ale_grid_base,
            "ale_grid_extra": self.ale_grid_extra,
        }
        if self.ale_initial is not None:
            d["ale_initial"] = {
                "kind": self.ale_initial.kind,
                "dimension": self.ale_initial.dimension,
                "n": self.ale_initial.n,
                "seed": self.ale_initial.seed,
            }
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "StrategySpec":
        init = data.get("ale_initial")
        return cls(
            kind=data["kind"],
            dimension=int(data["dimension"]),
            budget=int(data["budget"]),
            seed=int(data.get("seed", 0)),
            amc_max_attempts=int(data.get("amc_max_attempts", DEFAULT_AMC_MAX_ATTEMPTS)),
            ale_initial=StaticDesignSpec(**init) if init else None,
            ale_grid_base=int(data.get("ale_grid_base", 64)),
            ale_grid_extra=int(data.get("ale_grid_extra", 16)),
        )


@dataclass(frozen=True)
class StepRecord:
    index: int  # 1-based evaluation counter
    point: tuple
    label: int
    candidates_before: int
    skipped_since_last: int
    level: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "point": list(self.point),
            "label": self.label,
            "candidates_before": self.candidates_before,
            "skipped_since_last": self.skipped_since_last,
            "level": self.level,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StepRecord":
        return cls(
            index=int(d["index"]),
            point=tuple(float(v) for v in d["point"]),
            label=int(d["label"]),
            candidates_before=int(d["candidates_before"]),
            skipped_since_last=int(d["skipped_since_last"]),
            level=int(d["level"]),
        )


def serialize_trace(records) -> str:
    """Newline-delimited JSON, one object per record."""
    return "".join(json.dumps(r.to_dict()) + "\n" for r in records)


def parse_trace(text: str) -> list:
    return [StepRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]


def state_from_trace(dimension: int, records) -> DesignState:
    """Rebuild the design state implied by a trace (or trace prefix)."""
    state = DesignState(dimension=dimension)
    for rec in records:
        state.insert(np.asarray(rec.point), rec.label)
    return state


# ---------------------------------------------------------------------------
# candidate grids
# ---------------------------------------------------------------------------


def new_grid_points(p: int, level: int, inner: bool) -> np.ndarray:
    """Points of the level grid absent from all coarser levels, in
    lexicographic order.

    Boundary-including grids have mesh 2^-level with level >= 0 (level 0 is
    the corner set); interior grids have the same mesh over multiples
    strictly inside, with level >= 1.
    """
    if inner:
        if level < 1:
            raise ValueError("interior grids start at level 1")
        m = 1 << level
        vals = np.arange(1, m, dtype=np.int64)
    else:
        if level < 0:
            raise ValueError("level must be >= 0")
        m = 1 << level
        vals = np.arange(0, m + 1, dtype=np.int64)
    if float(len(vals)) ** p > GRID_POINT_CAP:
        raise GridResolutionError(
            f"level {level} grid would hold {len(vals) ** p} points (cap {GRID_POINT_CAP})"
        )
    mesh = np.meshgrid(*([vals] * p), indexing="ij")
    grid = np.stack(mesh, axis=-1).reshape(-1, p)
    if (inner and level > 1) or (not inner and level > 0):
        is_new = (grid % 2 == 1).any(axis=1)
        grid = grid[is_new]
    return grid.astype(np.float64) / m


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------


class StrategyRunner:
    """Resumable strategy core: propose() -> point or None (complete),
    feed(label) -> StepRecord."""

    def __init__(self, spec: StrategySpec, lawful_fn=None, sample_fn=None):
        self.spec = spec
        self.state = DesignState(dimension=spec.dimension)
        self.rng = np.random.default_rng(spec.seed)
        self.lawful_fn = lawful_fn
        self.sample_fn = sample_fn or (lambda rng, size: rng.random((size, spec.dimension)))
        self.complete = False
        self._pending = None
        self._skipped = 0

    def propose(self):
        if self.complete:
            return None
        if self._pending is not None:
            return self._pending[0].copy()
        nxt = self._next()
        if nxt is None:
            self.complete = True
            return None
        self._pending = nxt
        return nxt[0].copy()

    def feed(self, label: int) -> StepRecord:
        if self._pending is None:
            raise RuntimeError("no pending proposal; call propose() first")
        point, meta = self._pending
        self._pending = None
        self.state.insert(point, label)
        self._after_insert(point, meta)
        rec = StepRecord(
            index=self.state.n_evaluated,
            point=tuple(point.tolist()),
            label=int(label),
            candidates_before=meta.get("candidates_before", 0),
            skipped_since_last=self._skipped,
            level=meta.get("level", 0),
        )
        self._skipped = 0
        return rec

    def _next(self):
        raise NotImplementedError

    def _after_insert(self, point, meta):
        pass


class GridRunner(StrategyRunner):
    def __init__(self, spec: StrategySpec, lawful_fn=None, sample_fn=None):
        super().__init__(spec, lawful_fn, sample_fn)
        self.inner = spec.kind in ("gi", "ai")
        self.greedy = spec.kind in ("ag", "ai")
        self.next_level = 1 if self.inner else 0
        self.pool = np.empty((0, spec.dimension), dtype=np.float64)
        self.pool_level = -1
        self._empty_streak = 0

    def _refill(self) -> bool:
        while self.pool.shape[0] == 0:
            if self._empty_streak >= 2:
                return False
            try:
                pts = new_grid_points(self.spec.dimension, self.next_level, self.inner)
            except GridResolutionError:
                return False
            if self.lawful_fn is not None:
                pts = pts[self.lawful_fn(pts)]
            if pts.shape[0]:
                codes = self.state.classify_many(pts)
                kept = pts[codes == 0]
                self._skipped += pts.shape[0] - kept.shape[0]
            else:
                kept = pts
            self.pool = kept
            self.pool_level = self.next_level
            self.next_level += 1
            self._empty_streak = self._empty_streak + 1 if kept.shape[0] == 0 else 0
        self.state.level = self.pool_level
        self._mirror_candidates()
        return True

    def _next(self):
        if not self._refill():
            return None
        size = self.pool.shape[0]
        if self.greedy:
            idx = _greedy_pick(self.pool)
        else:
            idx = int(self.rng.integers(size))
        point = self.pool[idx].copy()
        return point, {"index": idx, "candidates_before": size, "level": self.pool_level}

    def _after_insert(self, point, meta):
        # the evaluated point leaves the pool; greedy variants also drop
        # every candidate whose label the new outcome settles, while grouped
        # variants keep their group intact until it refills
        self.pool = np.delete(self.pool, meta["index"], axis=0)
        if self.greedy and self.pool.shape[0]:
            codes = self.state.classify_many(self.pool)
            kept = self.pool[codes == 0]
            self._skipped += self.pool.shape[0] - kept.shape[0]
            self.pool = kept
        self._mirror_candidates()

    def _mirror_candidates(self):
        # state.candidates always holds the pruned view, even when the
        # grouped pool itself still carries settled points
        if self.greedy or self.pool.shape[0] == 0:
            self.state.candidates = self.pool.copy()
        else:
            codes = self.state.classify_many(self.pool)
            self.state.candidates = self.pool[codes == 0]


def _greedy_pick(pool: np.ndarray) -> int:
    """Candidate maximizing min(#below, #above) within the pool, then
    max(#below, #above), then the lexicographically largest point.

    The final tie-break is a convention; this orientation reproduces the
    published worked traces exactly (see tests).
    """
    below, above = dominance_counts(pool)
    lo = np.minimum(below, above)
    hi = np.maximum(below, above)
    best = lo == lo.max()
    hi_best = hi[best].max()
    best &= hi == hi_best
    idx = np.flatnonzero(best)
    order = np.lexsort(pool[idx].T[::-1])
    return int(idx[order[-1]])


class AmcRunner(StrategyRunner):
    def _next(self):
        attempts = 0
        while attempts < self.spec.amc_max_attempts:
            x = self.sample_fn(self.rng, 1)[0]
            if int(self.state.classify_many(x[None, :])[0]) == 0:
                self._skipped += attempts
                return x, {"candidates_before": 0, "level": 0}
            attempts += 1
        # cap reached: the uncertain region is below resolvable scale
        self._skipped += attempts
        return None


class AleRunner(StrategyRunner):
    """Entropy-guided sampling on top of an initial space-filling design.

    No monotonicity filter: points may land in already-certain territory,
    by design of the criterion.
    """

    def __init__(self, spec: StrategySpec, lawful_fn=None, sample_fn=None):
        super().__init__(spec, lawful_fn, sample_fn)
        init_spec = spec.ale_initial or StaticDesignSpec(
            kind="lhd", dimension=spec.dimension, n=10 * spec.dimension, seed=spec.seed
        )
        if init_spec.dimension != spec.dimension:
            raise ValueError("initial design dimension mismatch")
        self._initial = list(gen_static(init_spec))
        self._cursor = 0

    def _next(self):
        if self._cursor < len(self._initial):
            pt = np.asarray(self._initial[self._cursor])
            self._cursor += 1
            return pt, {"candidates_before": 0, "level": 0}
        labels = self.state.labels
        n_neg = int((labels == -1).sum())
        n_pos = int((labels == 1).sum())
        if min(n_neg, n_pos) < 5:
            return self._uniform_in_unknown()
        try:
            gamma = select_gamma_cv(
                self.state.points, labels, seed=int(self.rng.integers(2**31))
            )
        except MajorityFallbackSignal:
            return self._uniform_in_unknown()
        model = platt_calibrate(svc_fit(self.state.points, labels, gamma))
        cands = self._candidates()
        probs = model.predict_proba(cands)
        ent = _entropy(probs)
        idx = int(np.argmax(ent))  # argmax returns the first maximal index
        return cands[idx].copy(), {"candidates_before": cands.shape[0], "level": 0}

    def _uniform_in_unknown(self):
        attempts = 0
        while attempts < self.spec.amc_max_attempts:
            x = self.sample_fn(self.rng, 1)[0]
            if int(self.state.classify_many(x[None, :])[0]) == 0:
                self._skipped += attempts
                return x, {"candidates_before": 0, "level": 0}
            attempts += 1
        return None

    def _candidates(self) -> np.ndarray:
        p = self.spec.dimension
        res = [self.spec.ale_grid_base if k < min(p, 2) else self.spec.ale_grid_extra for k in range(p)]
        total = int(np.prod(res))
        if total <= 1 << 18:
            mesh = np.meshgrid(*[np.arange(r) for r in res], indexing="ij")
            cells = np.stack(mesh, axis=-1).reshape(-1, p).astype(np.float64)
        else:
            # the full product grid is infeasible in high dimension; draw a
            # capped stratified sample of its cells instead
            total = 1 << 18
            cells = np.column_stack(
                [self.rng.integers(0, r, size=total) for r in res]
            ).astype(np.float64)
        jitter = self.rng.random(cells.shape)
        return (cells + jitter) / np.asarray(res, dtype=np.float64)[None, :]


def _entropy(prob: np.ndarray) -> np.ndarray:
    prob = np.clip(prob, 0.0, 1.0)
    out = np.zeros_like(prob)
    mask = (prob > 0.0) & (prob < 1.0)
    q = prob[mask]
    out[mask] = -q * np.log(q) - (1.0 - q) * np.log(1.0 - q)
    return out


def make_runner(spec: StrategySpec, oracle=None, lawful_fn=None, sample_fn=None) -> StrategyRunner:
    if oracle is not None and lawful_fn is None and sample_fn is None:
        if getattr(oracle, "lawful_mask", None) is not None:
            probe = oracle.lawful_mask(np.zeros((1, spec.dimension)))
            if probe is not None:
                lawful_fn = oracle.lawful_mask
        if hasattr(oracle, "sample_inputs"):
            sample_fn = oracle.sample_inputs
    if spec.kind in ("gg", "ag", "gi", "ai"):
        return GridRunner(spec, lawful_fn, sample_fn)
    if spec.kind == "amc":
        return AmcRunner(spec, lawful_fn, sample_fn)
    if spec.kind == "ale":
        return AleRunner(spec, lawful_fn, sample_fn)
    raise ValueError(f"unknown strategy kind {spec.kind!r}")


def run_strategy(spec: StrategySpec, oracle) -> list:
    """Closed-loop driver: propose, evaluate, record, to budget or
    completion. Deterministic for a fixed spec (seed included)."""
    runner = make_runner(spec, oracle)
    trace: list[StepRecord] = []
    while runner.state.n_evaluated < spec.budget:
        point = runner.propose()
        if point is None:
            break
        try:
            label = oracle(point)
        except Exception as exc:  # noqa: BLE001 - context added, then re-raised
            from .oracles import PendingOutcome

            if isinstance(exc, PendingOutcome):
                raise  # interactive oracles are driven through sessions
            raise OracleFailure(point, exc) from exc
        trace.append(runner.feed(label))
    return trace
