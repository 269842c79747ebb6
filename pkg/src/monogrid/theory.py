"""Closed-form efficiency formulas for the design families.

Pure functions; bounds outside their stated preconditions return the typed
NOT_APPLICABLE marker instead of an extrapolated number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT = "exact"
UPPER_BOUND = "upper_bound"
LOWER_BOUND = "lower_bound"
ASYMPTOTE = "asymptote"


class _NotApplicable:
    """Marker for a bound requested outside its precondition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotApplicable"

    def __bool__(self):
        return False


NOT_APPLICABLE = _NotApplicable()


@dataclass(frozen=True)
class BoundReport:
    name: str
    p: int
    n: int | None
    value: float
    kind: str


def _grid_side(p: int, n: int, min_side: int) -> int:
    m = round(n ** (1.0 / p))
    for cand in (m - 1, m, m + 1):
        if cand >= min_side and cand**p == n:
            return cand
    raise ValueError(f"n={n} is not a valid grid size for p={p}")


def sg_worst_volume(p: int, n: int) -> float:
    """Largest possible uncertain volume after fully evaluating the
    boundary-including grid: 1 - (m-2)^p / (m-1)^p with m = n^(1/p)."""
    m = _grid_side(p, n, min_side=2)
    return 1.0 - ((m - 2) / (m - 1)) ** p


def si_volume(p: int, n: int) -> float:
    """Uncertain volume of the fully evaluated inner grid; identical for
    every monotone labeler: 1 - n / (n^(1/p) + 1)^p."""
    m = _grid_side(p, n, min_side=1)
    return 1.0 - n / float((m + 1) ** p)


def static_lower_bound(p: int, n: int):
    """Floor on the worst-case uncertain volume of any n-point static
    design; None of it applies below the stated sample sizes."""
    if p == 1:
        return 1.0 / (n + 1)
    if n < 10 ** (p - 1) * p**p:
        return NOT_APPLICABLE
    return (
        2.0 ** (-1.0 / (p - 1))
        * 10.0 ** (-1.0 / p)
        / math.factorial(p - 1)
        * n ** (-1.0 / p)
    )


def adaptive_lower_bound(p: int, n: int):
    """Floor on the worst-case uncertain volume of any n-point adaptive
    design: 2^-n in one dimension."""
    if p == 1:
        return 2.0**-n
    if n < 4 ** (p - 2) * p**p:
        return NOT_APPLICABLE
    return (
        p ** (1.0 / (p - 1))
        * 2.0 ** (-(p + 1.0) / (p - 1))
        / math.factorial(p - 1)
        * n ** (-1.0 / (p - 1))
    )


def gg_count_bound(p: int, g: int) -> int:
    """Upper bound on evaluations needed by the grouped grid strategy to
    learn everything the level-g full grid knows."""
    if g < 0:
        raise ValueError("g must be >= 0")
    return 2**p + sum(p * (2**lvl + 1) ** (p - 1) for lvl in range(1, g + 1))


def gi_count_exact(p: int, g: int) -> int:
    """Exact evaluations needed by the grouped inner-grid strategy at level
    completion, independent of the labeler."""
    if g < 1:
        raise ValueError("g must be >= 1")
    return sum((2**lvl - 1) ** p - (2**lvl - 2) ** p for lvl in range(1, g + 1))


def g_p_constant(p: int) -> float:
    """Alternating-binomial constant entering the Monte Carlo rates."""
    if p < 1:
        raise ValueError("p must be >= 1")
    total = 0.0
    k = 0
    while k < p / 2.0:
        total += (-1.0) ** k * math.comb(p, k) * (p / 2.0 - k) ** (p - 1)
        k += 1
    return total


def mc_rate_constant(p: int) -> float:
    """Leading constant of the expected uncertain volume, c * n^(-1/p), for
    uniform random designs against the half-space labeler."""
    return 2.0 * math.factorial(p) ** (1.0 / p - 1.0) * math.gamma(1.0 / p) * g_p_constant(p)


def amc_rate_constant(p: int) -> float:
    """Leading constant of the expected evaluation count, c * n^((p-1)/p),
    for rejection-filtered uniform designs (p >= 2)."""
    if p < 2:
        raise ValueError("defined for p >= 2")
    return mc_rate_constant(p) * p / (p - 1.0)


def gg_rate_constant(p: int) -> float:
    """Leading constant of the grouped-grid worst-case volume bound,
    c * n^(-1/(p-1)), for p >= 2."""
    if p < 2:
        raise ValueError("defined for p >= 2")
    return 2.0 * p ** (p / (p - 1.0)) * (2 ** (p - 1) - 1.0) ** (-1.0 / (p - 1))


def mc_worst_expected_volume_p1(n: int) -> float:
    """Exact worst-case expectation of the uncertain length for n uniform
    draws in one dimension: (2 - 2^-n) / (n + 1); 1 by convention at n=0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1.0
    return (2.0 - 2.0**-n) / (n + 1.0)


def amc_expected_eval_count_p1(n: int) -> float:
    """Expected evaluations after n uniform proposals with rejection of
    already-certain points, one dimension, worst step function."""
    return sum((2.0 - 2.0 ** -(i - 1)) / i for i in range(1, n + 1))


def amc_asymptote_p1() -> float:
    """Limit of (expected evaluations - 2 ln n): 2 (Euler gamma - ln 2)."""
    return 2.0 * (np.euler_gamma - math.log(2.0))
