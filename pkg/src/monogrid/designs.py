"""Static baseline designs: full grid, inner grid, uniform Monte Carlo and
plain Latin hypercube samples on the unit cube."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STATIC_KINDS = ("sg", "si", "mc", "lhd")


@dataclass(frozen=True)
class StaticDesignSpec:
    kind: str
    dimension: int
    n: int
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in STATIC_KINDS:
            raise ValueError(f"unknown static design kind {self.kind!r}")
        if self.dimension < 1 or self.n < 1:
            raise ValueError("dimension and n must be positive")
        if self.kind in ("mc", "lhd") and self.seed is None:
            raise ValueError(f"{self.kind} requires a seed for reproducibility")


class GridSizeError(ValueError):
    """n is not a valid grid size; carries the nearest valid choices."""

    def __init__(self, kind, p, n, suggestions):
        self.suggestions = suggestions
        hint = " or ".join(str(s) for s in suggestions)
        super().__init__(
            f"{kind} with p={p} needs n to be a perfect {p}-th power"
            f"{' of an integer >= 2' if kind == 'sg' else ''}; "
            f"n={n} is invalid, nearest valid: {hint}"
        )


def _grid_side(kind: str, p: int, n: int, min_side: int) -> int:
    m = round(n ** (1.0 / p))
    for cand in (m - 1, m, m + 1):
        if cand >= min_side and cand**p == n:
            return cand
    lo = max(min_side, int(np.floor(n ** (1.0 / p))))
    suggestions = sorted({lo**p, (lo + 1) ** p})
    raise GridSizeError(kind, p, n, suggestions)


def _lattice(levels: np.ndarray, p: int) -> np.ndarray:
    # lexicographic order: first coordinate varies slowest
    mesh = np.meshgrid(*([levels] * p), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, p)


def gen_sg(p: int, n: int) -> np.ndarray:
    """Full grid {z/(m-1)}^p with m = n^(1/p) >= 2, boundary included."""
    m = _grid_side("sg", p, n, min_side=2)
    levels = np.arange(m, dtype=np.float64) / (m - 1)
    return _lattice(levels, p)


def gen_si(p: int, n: int) -> np.ndarray:
    """Inner grid {z/(m+1), z=1..m}^p with m = n^(1/p); boundary excluded."""
    m = _grid_side("si", p, n, min_side=1)
    levels = np.arange(1, m + 1, dtype=np.float64) / (m + 1)
    return _lattice(levels, p)


def gen_mc(p: int, n: int, seed: int) -> np.ndarray:
    """n i.i.d. uniform points; identical output for identical seed."""
    rng = np.random.default_rng(seed)
    return rng.random((n, p))


def gen_lhd(p: int, n: int, seed: int) -> np.ndarray:
    """Plain randomized Latin hypercube: per dimension one point per bin
    [k/n, (k+1)/n), independent permutations, uniform within the cell."""
    rng = np.random.default_rng(seed)
    out = np.empty((n, p))
    for k in range(p):
        perm = rng.permutation(n)
        out[:, k] = (perm + rng.random(n)) / n
    return out


def gen_static(spec: StaticDesignSpec) -> np.ndarray:
    if spec.kind == "sg":
        return gen_sg(spec.dimension, spec.n)
    if spec.kind == "si":
        return gen_si(spec.dimension, spec.n)
    if spec.kind == "mc":
        return gen_mc(spec.dimension, spec.n, spec.seed)
    return gen_lhd(spec.dimension, spec.n, spec.seed)
