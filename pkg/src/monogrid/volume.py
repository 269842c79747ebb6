"""Volumes of the certain and uncertain regions induced by a design state.

The certainly-negative region is a union of boxes anchored at the origin,
the certainly-positive region a union of boxes anchored at the top corner.
Both unions admit an exact recursive slab sweep; a Monte Carlo estimator is
provided for states too large for the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import classify_batch
from .core import DesignState, NonMonotoneOracleError, maximal_elements

EXACT = "exact"
DYADIC_CELLS = "dyadic_cells"
MONTE_CARLO = "monte_carlo"

# beyond these sizes the sweep gets expensive; callers may switch to MC
EXACT_MAX_DIM = 6
EXACT_MAX_FRONTIER = 500


@dataclass(frozen=True)
class VolumeReport:
    v_negative: float
    v_positive: float
    v_uncertain: float
    method: str
    mc_samples: int | None = None
    mc_stderr: float | None = None

    def __post_init__(self):
        for part in (self.v_negative, self.v_positive, self.v_uncertain):
            if part < -1e-12 or part > 1.0 + 1e-12:
                raise ValueError(f"volume component out of [0, 1]: {part}")


def volume_union_down(boxes) -> float:
    """Exact measure of the union of boxes [0, x] over the given anchors."""
    boxes = _as_anchor_array(boxes)
    if boxes.shape[0] == 0:
        return 0.0
    return _sweep(maximal_elements(boxes))


def volume_union_up(boxes) -> float:
    """Exact measure of the union of boxes [x, 1]; mirror of the down case
    under the reflection x -> 1 - x."""
    boxes = _as_anchor_array(boxes)
    if boxes.shape[0] == 0:
        return 0.0
    return volume_union_down(1.0 - boxes)


def _as_anchor_array(boxes) -> np.ndarray:
    arr = np.asarray(boxes, dtype=np.float64)
    if arr.size == 0:
        return arr.reshape(0, arr.shape[1] if arr.ndim == 2 else 1)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("anchors must form a (n, p) array")
    return arr


def _sweep(anchors: np.ndarray) -> float:
    """Recursive coordinate sweep over the last axis.

    Anchors are sorted by last coordinate descending; each slab between
    consecutive distinct values contributes height times the (p-1)-volume of
    the anchors active so far. Equal coordinates are merged, not
    double-counted.
    """
    p = anchors.shape[1]
    if p == 1:
        return float(anchors.max())
    order = np.argsort(-anchors[:, -1], kind="stable")
    anchors = anchors[order]
    values = anchors[:, -1]
    total = 0.0
    active: list[np.ndarray] = []
    i = 0
    n = anchors.shape[0]
    while i < n:
        v = values[i]
        while i < n and values[i] == v:
            active.append(anchors[i, :-1])
            i += 1
        lower = values[i] if i < n else 0.0
        if v > lower:
            cross = maximal_elements(np.array(active))
            total += (v - lower) * _sweep(cross)
    return total


def uncertain_volume(state: DesignState) -> VolumeReport:
    """Exact volume split for a design state."""
    v_neg = volume_union_down(state.neg_frontier) if state.neg_frontier.shape[0] else 0.0
    v_pos = volume_union_up(state.pos_frontier) if state.pos_frontier.shape[0] else 0.0
    v_unc = 1.0 - v_neg - v_pos
    if v_unc < -1e-9:
        raise NonMonotoneOracleError(
            (state.neg_frontier[0], -1), (state.pos_frontier[0], 1)
        )
    return VolumeReport(v_neg, v_pos, max(v_unc, 0.0), EXACT)


def uncertain_volume_cells(state: DesignState, level: int) -> VolumeReport:
    """Cell-counting volume on the dyadic grid of the given level.

    Exact whenever every frontier coordinate is a multiple of 2**-level: a
    cell is certain iff its extreme corner is. Used as an independent oracle
    for the sweep.
    """
    p = state.dimension
    m = 1 << level
    axes = [np.arange(m, dtype=np.float64) for _ in range(p)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p)
    top = (grid + 1.0) / m
    bottom = grid / m
    neg_hit = np.zeros(top.shape[0], dtype=bool)
    pos_hit = np.zeros(top.shape[0], dtype=bool)
    if state.neg_frontier.shape[0]:
        neg_hit = classify_batch(top, state.neg_frontier, state.neg_frontier[:0]) == -1
    if state.pos_frontier.shape[0]:
        pos_hit = classify_batch(bottom, state.pos_frontier[:0], state.pos_frontier) == 1
    cell = float(m) ** -p
    v_neg = neg_hit.sum() * cell
    v_pos = pos_hit.sum() * cell
    return VolumeReport(v_neg, v_pos, 1.0 - v_neg - v_pos, DYADIC_CELLS)


def uncertain_volume_mc(state: DesignState, samples: int, seed: int) -> VolumeReport:
    """Monte Carlo estimate of the uncertain volume with binomial stderr."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    draws = rng.random((samples, state.dimension))
    codes = state.classify_many(draws)
    unknown = codes == 0
    v_unc = float(unknown.mean())
    v_neg = float((codes == -1).mean())
    v_pos = float((codes == 1).mean())
    stderr = float(np.sqrt(v_unc * (1.0 - v_unc) / samples))
    return VolumeReport(v_neg, v_pos, v_unc, MONTE_CARLO, samples, stderr)


def uncertain_volume_auto(
    state: DesignState, mc_samples: int = 10**6, seed: int = 0
) -> VolumeReport:
    """Exact sweep when tractable, else Monte Carlo with reported stderr."""
    frontier = max(state.neg_frontier.shape[0], state.pos_frontier.shape[0])
    if state.dimension <= EXACT_MAX_DIM and frontier <= EXACT_MAX_FRONTIER:
        return uncertain_volume(state)
    return uncertain_volume_mc(state, mc_samples, seed)
