"""Gaussian-kernel support vector classification.

Hard-margin dual (no box constraint): deterministic binary data with
distinct points is separable under the Gaussian kernel, so the dual is
bounded. Solved by maximal-violating-pair coordinate updates that preserve
the equality constraint. Includes 5-fold cross-validated kernel-width
selection with a majority-class fallback, and Platt probability
calibration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

KKT_TOL = 1e-6
PLATT_SLOPE_CAP = 50.0


class SingleClassError(ValueError):
    """Training data holds one label only; use the majority fallback."""


class MajorityFallbackSignal(Exception):
    """Too few observations per class to cross-validate; predict the
    majority class instead."""

    def __init__(self, majority_label: int):
        self.majority_label = majority_label
        super().__init__(f"fewer than 5 observations in one class; majority={majority_label}")


def gaussian_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * squared distance), pairwise between row sets."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    sq = (
        (a**2).sum(axis=1)[:, None]
        + (b**2).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class SvcModel:
    points: np.ndarray
    labels: np.ndarray
    alphas: np.ndarray
    bias: float
    gamma: float
    platt_a: float | None = None
    platt_b: float | None = None

    def decision_values(self, queries) -> np.ndarray:
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        K = gaussian_kernel(queries, self.points, self.gamma)
        return K @ (self.alphas * self.labels) + self.bias

    def predict(self, queries) -> np.ndarray:
        vals = self.decision_values(queries)
        return np.where(vals >= 0.0, 1, -1).astype(np.int64)

    def predict_one(self, x) -> int:
        return int(self.predict(np.asarray(x, dtype=float)[None, :])[0])

    def predict_proba(self, queries) -> np.ndarray:
        """Calibrated probability of the positive label."""
        if self.platt_a is None:
            raise ValueError("model has no calibration parameters; fit them first")
        s = self.decision_values(queries)
        z = np.clip(self.platt_a * s + self.platt_b, -500.0, 500.0)
        return 1.0 / (1.0 + np.exp(z))

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "labels": self.labels.tolist(),
            "alphas": self.alphas.tolist(),
            "bias": self.bias,
            "gamma": self.gamma,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SvcModel":
        return cls(
            points=np.asarray(data["points"], dtype=np.float64),
            labels=np.asarray(data["labels"], dtype=np.int64),
            alphas=np.asarray(data["alphas"], dtype=np.float64),
            bias=float(data["bias"]),
            gamma=float(data["gamma"]),
            platt_a=data.get("platt_a"),
            platt_b=data.get("platt_b"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SvcModel":
        return cls.from_dict(json.loads(text))


class MajorityModel:
    """Constant predictor used when one class is (nearly) absent."""

    def __init__(self, label: int):
        self.label = int(label)

    def predict(self, queries) -> np.ndarray:
        queries = np.atleast_2d(queries)
        return np.full(queries.shape[0], self.label, dtype=np.int64)

    def predict_one(self, x) -> int:
        return self.label


def svc_fit(points, labels, gamma: float, tol: float = KKT_TOL, max_iter: int = 500_000) -> SvcModel:
    """Solve the hard-margin Gaussian-kernel dual to KKT tolerance.

    Maximal-violating-pair coordinate updates do the work; every few sweeps
    an exact solve on the current support set is attempted and adopted when
    it is feasible and verifiably optimal, which keeps ill-conditioned
    small-width problems (near-coincident opposite labels) from crawling.
    Exact duplicate rows are collapsed beforehand; duplicates with
    conflicting labels cannot come from a deterministic oracle and raise.
    """
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if points.ndim != 2 or points.shape[0] != labels.shape[0]:
        raise ValueError("points must be (n, p) with one label per row")
    points, labels = _dedupe(points, labels)
    if len(set(labels.tolist())) < 2:
        raise SingleClassError("training data holds a single class")
    n = points.shape[0]
    K = gaussian_kernel(points, points, gamma)
    y = labels.astype(np.float64)
    alpha = np.zeros(n)
    F = np.zeros(n)  # sum_j alpha_j y_j K(., j), decision values without bias
    next_jump = 256
    eps = np.finfo(np.float64).eps
    for it in range(max_iter):
        # the KKT gap cannot be evaluated below the float64 noise floor of
        # F itself, which scales with the coefficient magnitudes
        tol_eff = max(tol, 16.0 * eps * n * max(1.0, float(alpha.max(initial=0.0))))
        crit = y - F
        up = (y > 0) | (alpha > 0)  # directions that may increase
        low = (y < 0) | (alpha > 0)
        i = int(np.argmax(np.where(up, crit, -np.inf)))
        j = int(np.argmin(np.where(low, crit, np.inf)))
        gap = crit[i] - crit[j]
        if gap <= tol_eff:
            break
        if it == next_jump:
            jumped = _kkt_finisher(K, y, alpha, (i, j), tol_eff)
            if jumped is not None:
                alpha = jumped
                F = K @ (alpha * y)
                break
            next_jump *= 2
        kappa = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if kappa <= 1e-14:
            break
        step = gap / kappa
        if y[i] < 0:
            step = min(step, alpha[i])
        if y[j] > 0:
            step = min(step, alpha[j])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        F += step * (K[:, i] - K[:, j])
    else:
        raise RuntimeError(f"dual solver did not reach tolerance {tol} in {max_iter} iterations")
    _zero_constraint_residual(alpha, y)
    bias = _bias_from_alphas(K, y, alpha)
    return SvcModel(points=points, labels=labels, alphas=alpha, bias=bias, gamma=gamma)


def _solve_working_set(K, y, idx):
    """Equality-constrained minimizer restricted to the working set."""
    ys = y[idx]
    Q = (ys[:, None] * ys[None, :]) * K[np.ix_(idx, idx)]
    size = idx.size
    system = np.zeros((size + 1, size + 1))
    system[:size, :size] = Q
    system[:size, size] = ys
    system[size, :size] = ys
    rhs = np.zeros(size + 1)
    rhs[:size] = 1.0
    try:
        sol = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return sol[:size]


def _kkt_finisher(K, y, alpha, violators, tol, rounds_per_n: int = 16):
    """Active-set finisher in the nonnegative-least-squares mold.

    Keeps a feasible iterate: the working-set minimizer is adopted outright
    when nonnegative, else the iterate moves toward it until the first
    coordinate hits zero and that coordinate leaves the set. Violators
    enter one at a time. Acceptance requires the full problem's KKT gap
    within tolerance (scale-aware: the gap cannot be certified below the
    float64 noise floor of the candidate's own magnitudes). Returns None if
    the round cap is hit; the pair updates then carry on unharmed.
    """
    n = y.shape[0]
    eps = np.finfo(np.float64).eps
    current = alpha.copy()
    working = set(np.flatnonzero(current > 0).tolist()) | set(violators)
    for _ in range(rounds_per_n * max(n, 8)):
        idx = np.fromiter(sorted(working), dtype=np.int64)
        if idx.size < 2 or len(set(y[idx].tolist())) < 2:
            return None
        a_new = _solve_working_set(K, y, idx)
        if not np.all(np.isfinite(a_new)):
            return None
        if np.all(a_new >= 0.0):
            current = np.zeros(n)
            current[idx] = a_new
            _zero_constraint_residual(current, y)
            F = K @ (current * y)
            crit = y - F
            up = (y > 0) | (current > 0)
            low = (y < 0) | (current > 0)
            i = int(np.argmax(np.where(up, crit, -np.inf)))
            j = int(np.argmin(np.where(low, crit, np.inf)))
            floor = max(tol, 16.0 * eps * n * max(1.0, float(current.max())))
            if crit[i] - crit[j] <= floor:
                return current
            # admit the single worst violator outside the working set
            entering = i if i not in working else (j if j not in working else None)
            if entering is None:
                return None  # numerically stuck; let the pair updates decide
            working.add(entering)
            continue
        # partial step: walk toward the solution until a coordinate zeroes
        a_old = current[idx]
        shrink = a_new < 0.0
        denom = a_old[shrink] - a_new[shrink]
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = np.where(denom > 0, a_old[shrink] / denom, np.inf)
        t = float(np.min(steps))
        if not np.isfinite(t) or t <= 0.0:
            working -= {int(idx[k]) for k in np.flatnonzero(shrink)}
            continue
        moved = a_old + min(t, 1.0) * (a_new - a_old)
        current[idx] = np.maximum(moved, 0.0)
        working = set(np.flatnonzero(current > 0).tolist())
        if len(working) < 2:
            return None
    return None


def _zero_constraint_residual(alpha, y):
    # pair updates and linear solves leave O(1e-12 * scale) residue in the
    # equality constraint; push it into the largest coefficient
    residual = float(np.dot(alpha, y))
    if residual != 0.0:
        k = int(np.argmax(alpha))
        if alpha[k] >= abs(residual):
            alpha[k] = max(alpha[k] - y[k] * residual, 0.0)


def _dedupe(points, labels):
    seen: dict = {}
    keep = []
    for idx in range(points.shape[0]):
        key = tuple(points[idx])
        if key in seen:
            if labels[seen[key]] != labels[idx]:
                raise ValueError(f"conflicting labels at duplicate point {list(key)}")
            continue
        seen[key] = idx
        keep.append(idx)
    return points[keep], labels[keep]


def _bias_from_alphas(K, y, alpha) -> float:
    """Average residual over points carrying positive dual weight."""
    sv = alpha > 0.0
    if not np.any(sv):
        raise RuntimeError("no support vectors; dual solve failed")
    contrib = K[np.ix_(sv, sv)] @ (alpha[sv] * y[sv])
    return float(np.mean(y[sv] - contrib))


def recompute_bias(model: SvcModel) -> float:
    """Re-derive the bias from stored alphas (for audits)."""
    K = gaussian_kernel(model.points, model.points, model.gamma)
    return _bias_from_alphas(K, model.labels.astype(float), model.alphas)


def default_gamma_grid(p: int) -> np.ndarray:
    """Geometric grid 2^-6 .. 2^6 scaled by 1/p."""
    return np.array([2.0**k / p for k in range(-6, 7)])


def select_gamma_cv(points, labels, grid=None, folds: int = 5, seed: int = 0) -> float:
    """Kernel width minimizing stratified cross-validated error.

    Ties break toward the smallest width (smoother boundary). Raises
    MajorityFallbackSignal when either class has fewer than 5 observations.
    """
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_neg = int((labels == -1).sum())
    n_pos = int((labels == 1).sum())
    if min(n_neg, n_pos) < 5:
        majority = -1 if n_neg >= n_pos else 1
        raise MajorityFallbackSignal(majority)
    if grid is None:
        grid = default_gamma_grid(points.shape[1])
    grid = np.sort(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("gamma grid must be nonempty")
    fold_of = _stratified_folds(labels, folds, seed)
    best_gamma = None
    best_err = None
    for gamma in grid:
        err = 0
        for f in range(folds):
            train = fold_of != f
            val = ~train
            model = svc_fit(points[train], labels[train], gamma)
            err += int((model.predict(points[val]) != labels[val]).sum())
        if best_err is None or err < best_err:
            best_err = err
            best_gamma = float(gamma)
    return best_gamma


def _stratified_folds(labels, folds, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    fold_of = np.zeros(labels.shape[0], dtype=np.int64)
    for cls in (-1, 1):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            fold_of[i] = pos % folds
    return fold_of


def platt_calibrate(model: SvcModel, points=None, labels=None) -> SvcModel:
    """Fit the sigmoid 1 / (1 + exp(a s + b)) on decision values by damped
    Newton with the usual target smoothing; |a| capped to keep entropies
    finite on separable data."""
    if points is None:
        points, labels = model.points, model.labels
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(set(labels.tolist())) < 2:
        raise SingleClassError("calibration needs both classes")
    scores = model.decision_values(points)
    a, b = _platt_fit(scores, labels)
    return SvcModel(
        points=model.points,
        labels=model.labels,
        alphas=model.alphas,
        bias=model.bias,
        gamma=model.gamma,
        platt_a=a,
        platt_b=b,
    )


def _platt_loss(f, t):
    z = np.clip(f, -500.0, 500.0)
    # -[t log P + (1-t) log(1-P)] with P = 1/(1+e^z), written stably
    return float(np.sum(np.logaddexp(0.0, z) - (1.0 - t) * z))


def _platt_fit(scores, labels, max_iter: int = 100, tol: float = 1e-8):
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    n_pos = int((y == 1).sum())
    n_neg = int((y == -1).sum())
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    a, b = 0.0, math.log((n_neg + 1.0) / (n_pos + 1.0))
    loss = _platt_loss(a * s + b, t)
    for _ in range(max_iter):
        f = np.clip(a * s + b, -500.0, 500.0)
        P = 1.0 / (1.0 + np.exp(f))
        grad_f = t - P
        g = np.array([np.dot(grad_f, s), grad_f.sum()])
        if float(np.abs(g).max()) < tol:
            break
        w = np.maximum(P * (1.0 - P), 1e-12)
        H = np.array(
            [
                [np.dot(w, s * s) + 1e-12, np.dot(w, s)],
                [np.dot(w, s), w.sum() + 1e-12],
            ]
        )
        try:
            delta = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        scale = 1.0
        for _ in range(30):
            na, nb = a - scale * delta[0], b - scale * delta[1]
            new_loss = _platt_loss(na * s + nb, t)
            if new_loss <= loss + 1e-15:
                a, b, loss = na, nb, new_loss
                break
            scale *= 0.5
        else:
            break
    if abs(a) > PLATT_SLOPE_CAP:
        a = math.copysign(PLATT_SLOPE_CAP, a)
        b = _platt_refit_intercept(a, s, t)
    return float(a), float(b)


def _platt_refit_intercept(a, s, t, max_iter: int = 100):
    b = 0.0
    for _ in range(max_iter):
        f = np.clip(a * s + b, -500.0, 500.0)
        P = 1.0 / (1.0 + np.exp(f))
        g = float((t - P).sum())
        h = float(np.maximum(P * (1.0 - P), 1e-12).sum())
        step = g / h
        b -= step
        if abs(step) < 1e-10:
            break
    return b


def fit_predictor(points, labels, seed: int = 0, grid=None):
    """CV-tuned SVC when the per-class guard passes, else majority fallback.

    Returns (predictor, gamma) where gamma is None for the fallback.
    """
    labels = np.asarray(labels, dtype=np.int64)
    try:
        gamma = select_gamma_cv(points, labels, grid=grid, seed=seed)
    except MajorityFallbackSignal as sig:
        return MajorityModel(sig.majority_label), None
    model = svc_fit(points, labels, gamma)
    return model, gamma
