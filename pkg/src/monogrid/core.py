"""Dominance reasoning for monotone non-decreasing binary functions on [0,1]^p.

Evaluated outcomes are summarized by two antichains: the maximal negative
points and the minimal positive points. Together they determine, for any
query, whether the outcome is already implied by monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ._accel import classify_batch, comparable_pairs

NEGATIVE = -1
POSITIVE = 1


class Certainty(IntEnum):
    """Outcome of an inference query: implied label or unknown."""

    CERTAIN_NEGATIVE = -1
    UNKNOWN = 0
    CERTAIN_POSITIVE = 1


class DimensionMismatchError(ValueError):
    pass


class NonMonotoneOracleError(RuntimeError):
    """A recorded outcome contradicts monotonicity.

    Carries the two witnesses: (point, label) of the new observation and of
    the prior observation it conflicts with.
    """

    def __init__(self, new_obs, prior_obs):
        self.new_obs = (np.asarray(new_obs[0], dtype=float), int(new_obs[1]))
        self.prior_obs = (np.asarray(prior_obs[0], dtype=float), int(prior_obs[1]))
        super().__init__(
            f"non-monotone outcomes: f{tuple(self.new_obs[0])} = {self.new_obs[1]} "
            f"conflicts with f{tuple(self.prior_obs[0])} = {self.prior_obs[1]}"
        )

    def witnesses(self):
        return [
            {"point": self.new_obs[0].tolist(), "label": self.new_obs[1]},
            {"point": self.prior_obs[0].tolist(), "label": self.prior_obs[1]},
        ]


def as_point(x, dimension: int | None = None) -> np.ndarray:
    """Validate and return x as a float vector inside the closed unit cube."""
    pt = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if pt.ndim != 1 or pt.size < 1:
        raise ValueError(f"a point must be a 1-d vector, got shape {pt.shape}")
    if dimension is not None and pt.size != dimension:
        raise DimensionMismatchError(f"expected dimension {dimension}, got {pt.size}")
    if np.any(pt < 0.0) or np.any(pt > 1.0):
        raise ValueError(f"coordinates must lie in [0, 1], got {pt.tolist()}")
    return pt


def as_label(value) -> int:
    v = int(value)
    if v not in (NEGATIVE, POSITIVE):
        raise ValueError(f"label must be -1 or +1, got {value!r}")
    return v


def dominates_leq(a, b) -> bool:
    """True iff a_k <= b_k in every coordinate (equal dimensions required)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b))


def _empty(p: int) -> np.ndarray:
    return np.empty((0, p), dtype=np.float64)


@dataclass
class DesignState:
    """Evaluated observations plus the dominance frontiers they induce.

    Mutated in place by a single sequential owner; the query methods are
    read-only and safe to call concurrently between mutations.
    """

    dimension: int
    points: np.ndarray = None  # (n, p) in evaluation order
    labels: np.ndarray = None  # (n,) ints in {-1, +1}
    neg_frontier: np.ndarray = None  # maximal negative points, antichain
    pos_frontier: np.ndarray = None  # minimal positive points, antichain
    level: int = 0
    candidates: np.ndarray = None  # current pruned candidate pool

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        p = self.dimension
        if self.points is None:
            self.points = _empty(p)
        if self.labels is None:
            self.labels = np.empty(0, dtype=np.int64)
        if self.neg_frontier is None:
            self.neg_frontier = _empty(p)
        if self.pos_frontier is None:
            self.pos_frontier = _empty(p)
        if self.candidates is None:
            self.candidates = _empty(p)

    @property
    def n_evaluated(self) -> int:
        return self.points.shape[0]

    def classify(self, q) -> Certainty:
        """Label implied for q by monotonicity, or UNKNOWN."""
        q = as_point(q, self.dimension)
        code = int(classify_batch(q[None, :], self.neg_frontier, self.pos_frontier)[0])
        if code == 2:
            raise NonMonotoneOracleError((q, NEGATIVE), (q, POSITIVE))
        return Certainty(code)

    def classify_many(self, queries) -> np.ndarray:
        """Vectorized classify; returns int8 array of -1/0/+1."""
        queries = np.asarray(queries, dtype=np.float64)
        if queries.ndim != 2 or queries.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"queries must be (n, {self.dimension}), got {queries.shape}"
            )
        codes = classify_batch(queries, self.neg_frontier, self.pos_frontier)
        if np.any(codes == 2):
            bad = queries[np.argmax(codes == 2)]
            raise NonMonotoneOracleError((bad, NEGATIVE), (bad, POSITIVE))
        return codes

    def insert(self, point, label) -> "DesignState":
        """Record an observation, updating frontier and pruning candidates.

        Raises NonMonotoneOracleError if the observation contradicts an
        earlier one, reporting both witnesses.
        """
        q = as_point(point, self.dimension)
        lab = as_label(label)
        if lab == NEGATIVE:
            conflict = np.all(self.pos_frontier <= q[None, :], axis=1)
            if np.any(conflict):
                prior = self.pos_frontier[np.argmax(conflict)]
                raise NonMonotoneOracleError((q, lab), (prior, POSITIVE))
            self.neg_frontier = _absorb(self.neg_frontier, q, upper=True)
        else:
            conflict = np.all(self.neg_frontier >= q[None, :], axis=1)
            if np.any(conflict):
                prior = self.neg_frontier[np.argmax(conflict)]
                raise NonMonotoneOracleError((q, lab), (prior, NEGATIVE))
            self.pos_frontier = _absorb(self.pos_frontier, q, upper=False)
        self.points = np.vstack([self.points, q[None, :]])
        self.labels = np.append(self.labels, lab)
        if self.candidates.shape[0]:
            codes = classify_batch(self.candidates, self.neg_frontier, self.pos_frontier)
            self.candidates = self.candidates[codes == 0]
        return self

    def copy(self) -> "DesignState":
        return DesignState(
            dimension=self.dimension,
            points=self.points.copy(),
            labels=self.labels.copy(),
            neg_frontier=self.neg_frontier.copy(),
            pos_frontier=self.pos_frontier.copy(),
            level=self.level,
            candidates=self.candidates.copy(),
        )


def _absorb(frontier: np.ndarray, q: np.ndarray, upper: bool) -> np.ndarray:
    # upper=True keeps maximal elements (negative side), else minimal ones
    if frontier.shape[0]:
        if upper:
            if np.any(np.all(q[None, :] <= frontier, axis=1)):
                return frontier  # q already dominated, frontier unchanged
            keep = ~np.all(frontier <= q[None, :], axis=1)
        else:
            if np.any(np.all(q[None, :] >= frontier, axis=1)):
                return frontier
            keep = ~np.all(frontier >= q[None, :], axis=1)
        frontier = frontier[keep]
    return np.vstack([frontier, q[None, :]])


def classify_certain(state: DesignState, q) -> Certainty:
    return state.classify(q)


def insert_observation(state: DesignState, point, label) -> DesignState:
    return state.insert(point, label)


def count_comparable_pairs(points) -> int:
    """Unordered pairs {x, y}, x != y, with x <= y or y <= x componentwise."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array")
    return comparable_pairs(points)


def maximal_elements(points: np.ndarray) -> np.ndarray:
    """Brute-force maximal elements of a point set (O(n^2) scan)."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        for j in range(n):
            if i == j or not keep[i]:
                continue
            if np.all(points[i] <= points[j]) and np.any(points[i] < points[j]):
                keep[i] = False
                break
    # collapse exact duplicates to a single representative
    out = []
    seen = set()
    for i in range(n):
        if keep[i]:
            key = tuple(points[i])
            if key not in seen:
                seen.add(key)
                out.append(points[i])
    return np.array(out) if out else points[:0]


def minimal_elements(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    return 1.0 - maximal_elements(1.0 - points) if points.shape[0] else points


def evaluate_design(points, oracle, state: DesignState | None = None) -> DesignState:
    """Insert oracle outcomes for every design point into a state."""
    points = np.asarray(points, dtype=np.float64)
    if state is None:
        state = DesignState(dimension=points.shape[1])
    for row in points:
        state.insert(row, oracle(row))
    return state
