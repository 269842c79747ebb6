"""Outcome sources: analytic test functions, randomized monotone staircases,
tabular datasets behind lattice transforms, and interactive placeholders.

Every oracle is deterministic and monotone non-decreasing on the unit cube
(after its transform); thresholds use >= for the positive label.
"""

from __future__ import annotations

import csv
import warnings

import numpy as np

from .core import NonMonotoneOracleError, as_point
from .transforms import Transform, UnlawfulPointError

# calibrated ranges for the arctan contour family: the negative region
# occupies between roughly 10% and 90% of the cube inside these bands
ARCTAN_MU_RANGES = {
    2: (0.92, 2.10),
    3: (1.53, 2.95),
    4: (2.14, 3.75),
    5: (2.76, 4.59),
    6: (3.43, 5.40),
}


class Oracle:
    """Base class: deterministic monotone labeler on [0,1]^p."""

    dimension: int | None = None
    oracle_id: str = "oracle"

    def label_many(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return np.array([self(row) for row in points], dtype=np.int64)

    def sample_inputs(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Uniform draws over the admissible inputs (lattice for tabular)."""
        return rng.random((size, self.dimension))

    def lawful_mask(self, points: np.ndarray) -> np.ndarray | None:
        """Mask of evaluable rows, or None when every point is evaluable."""
        return None

    def __call__(self, x) -> int:
        raise NotImplementedError


class IllustrationOracle(Oracle):
    """Two-dimensional curved-boundary test function used in the worked
    figures: positive where a quartic-plus-kink expression reaches 2.84."""

    dimension = 2
    oracle_id = "illustration"

    def __call__(self, x) -> int:
        x = as_point(x, 2)
        return 1 if self._expr(x[0], x[1]) >= 2.84 else -1

    @staticmethod
    def _expr(x1, x2):
        return (
            x1**2
            + x2**2
            + 15.0 * max(x1 - 0.5, 0.0) ** 2
            + 3.0 * max(x2 - 0.2, 0.0) ** 0.4
        )

    def label_many(self, points):
        points = np.asarray(points, dtype=np.float64)
        x1, x2 = points[:, 0], points[:, 1]
        expr = (
            x1**2
            + x2**2
            + 15.0 * np.maximum(x1 - 0.5, 0.0) ** 2
            + 3.0 * np.maximum(x2 - 0.2, 0.0) ** 0.4
        )
        return np.where(expr >= 2.84, 1, -1).astype(np.int64)


class ArctanContourOracle(Oracle):
    """Arctan-sum contour family: positive iff
    sum_i arctan(5 (p+1-i) x_i / (p+1)) >= mu."""

    def __init__(self, p: int, mu: float):
        self.dimension = p
        self.mu = float(mu)
        self.oracle_id = f"arctan(p={p},mu={mu:.6f})"
        rng = ARCTAN_MU_RANGES.get(p)
        if rng is not None and not (rng[0] <= mu <= rng[1]):
            warnings.warn(
                f"mu={mu} outside the calibrated range {rng} for p={p}; "
                "one class may dominate almost everywhere",
                stacklevel=2,
            )
        self._coef = 5.0 * (p + 1 - np.arange(1, p + 1)) / (p + 1)

    def __call__(self, x) -> int:
        x = as_point(x, self.dimension)
        return 1 if float(np.arctan(self._coef * x).sum()) >= self.mu else -1

    def label_many(self, points):
        points = np.asarray(points, dtype=np.float64)
        total = np.arctan(points * self._coef[None, :]).sum(axis=1)
        return np.where(total >= self.mu, 1, -1).astype(np.int64)


class HalfSpaceOracle(Oracle):
    """Negative iff the coordinate sum is strictly below p/2."""

    def __init__(self, p: int):
        self.dimension = p
        self.oracle_id = f"halfspace(p={p})"

    def __call__(self, x) -> int:
        x = as_point(x, self.dimension)
        return -1 if float(x.sum()) < self.dimension / 2.0 else 1

    def label_many(self, points):
        points = np.asarray(points, dtype=np.float64)
        return np.where(points.sum(axis=1) < self.dimension / 2.0, -1, 1).astype(np.int64)


class BoundaryCornerOracle(Oracle):
    """Negative on the open cube, positive only where some coordinate is 1.

    Realizes the worst case for a fully evaluated boundary-including grid:
    the positive evidence sits on faces of measure zero.
    """

    def __init__(self, p: int):
        self.dimension = p
        self.oracle_id = f"corner(p={p})"

    def __call__(self, x) -> int:
        x = as_point(x, self.dimension)
        return 1 if float(x.max()) >= 1.0 else -1

    def label_many(self, points):
        points = np.asarray(points, dtype=np.float64)
        return np.where(points.max(axis=1) >= 1.0, 1, -1).astype(np.int64)


class ThresholdOracle(Oracle):
    """One-dimensional step function: negative strictly below the threshold."""

    dimension = 1

    def __init__(self, threshold: float):
        self.threshold = float(threshold)
        self.oracle_id = f"threshold({threshold:g})"

    def __call__(self, x) -> int:
        x = as_point(x, 1)
        return -1 if float(x[0]) < self.threshold else 1

    def label_many(self, points):
        points = np.asarray(points, dtype=np.float64)
        return np.where(points[:, 0] < self.threshold, -1, 1).astype(np.int64)


class StaircaseOracle(Oracle):
    """Random monotone labeling of the m^p cell grid, monotone by
    construction; continuous queries resolve to their cell."""

    def __init__(self, p: int, resolution: int, seed: int):
        if resolution < 2:
            raise ValueError("resolution must be >= 2")
        self.dimension = p
        self.resolution = resolution
        self.seed = seed
        self.oracle_id = f"staircase(p={p},m={resolution},seed={seed})"
        rng = np.random.default_rng(seed)
        height = rng.random((resolution,) * p)
        # running max over every axis turns iid noise into a monotone field
        for axis in range(p):
            height = np.maximum.accumulate(height, axis=axis)
        self.grid = np.where(height >= rng.random(), 1, -1).astype(np.int8)

    def _cell(self, x: np.ndarray) -> tuple:
        idx = np.minimum((x * self.resolution).astype(int), self.resolution - 1)
        return tuple(idx)

    def __call__(self, x) -> int:
        x = as_point(x, self.dimension)
        return int(self.grid[self._cell(x)])

    def label_many(self, points):
        points = np.asarray(points, dtype=np.float64)
        idx = np.minimum((points * self.resolution).astype(int), self.resolution - 1)
        return self.grid[tuple(idx.T)].astype(np.int64)


class TabularOracle(Oracle):
    """Outcomes defined only on a finite physical lattice, queried through a
    lattice transform; off-lattice queries are rejected."""

    def __init__(self, lattice_values: list, labels: np.ndarray, transform: Transform):
        # lattice_values: per-dimension sorted physical levels
        self.transform = transform
        self.dimension = transform.dimension
        self.physical_levels = [np.asarray(v, dtype=np.float64) for v in lattice_values]
        self.labels_grid = np.asarray(labels, dtype=np.int8)
        if self.labels_grid.shape != tuple(len(v) for v in self.physical_levels):
            raise ValueError("label grid shape does not match lattice levels")
        self.oracle_id = f"tabular({'x'.join(str(s) for s in self.labels_grid.shape)})"
        self._unit_levels = []
        for k, levels in enumerate(self.physical_levels):
            units = np.array([transform.dims[k].to_unit(v) for v in levels])
            order = np.argsort(units)
            self._unit_levels.append(units[order])
            self.labels_grid = np.take(self.labels_grid, order, axis=k)
        self._audit()

    def _audit(self):
        # non-decreasing along every unit axis is equivalent to monotone
        # over all comparable lattice pairs
        for axis in range(self.dimension):
            diff = np.diff(self.labels_grid, axis=axis)
            if np.any(diff < 0):
                where = np.argwhere(diff < 0)[0]
                lo = list(where)
                hi = list(where)
                hi[axis] += 1
                lo_pt = [self._unit_levels[k][lo[k]] for k in range(self.dimension)]
                hi_pt = [self._unit_levels[k][hi[k]] for k in range(self.dimension)]
                raise NonMonotoneOracleError((np.array(hi_pt), -1), (np.array(lo_pt), 1))

    def _index(self, x: np.ndarray) -> tuple:
        idx = []
        for k in range(self.dimension):
            levels = self._unit_levels[k]
            j = int(np.argmin(np.abs(levels - x[k])))
            if abs(levels[j] - x[k]) > 1e-9:
                raise UnlawfulPointError(k, float(x[k]), levels)
            idx.append(j)
        return tuple(idx)

    def __call__(self, x) -> int:
        x = as_point(x, self.dimension)
        return int(self.labels_grid[self._index(x)])

    def lawful_mask(self, points: np.ndarray) -> np.ndarray:
        return self.transform.lawful_mask(points)

    def lattice_unit_points(self) -> np.ndarray:
        mesh = np.meshgrid(*self._unit_levels, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dimension)

    def sample_inputs(self, rng: np.random.Generator, size: int) -> np.ndarray:
        pts = self.lattice_unit_points()
        return pts[rng.integers(0, pts.shape[0], size=size)]


class TransformedOracle(Oracle):
    """Wraps a physical-space simulator behind a transform so the composite
    is monotone non-decreasing on the unit cube."""

    def __init__(self, physical_fn, transform: Transform, oracle_id: str = "transformed"):
        self.physical_fn = physical_fn
        self.transform = transform
        self.dimension = transform.dimension
        self.oracle_id = oracle_id

    def __call__(self, x) -> int:
        x = as_point(x, self.dimension)
        label = int(self.physical_fn(self.transform.to_physical(x)))
        if label not in (-1, 1):
            raise ValueError(f"simulator returned {label!r}, expected -1 or +1")
        return label

    def lawful_mask(self, points: np.ndarray) -> np.ndarray | None:
        if all(d.lawful_unit_values() is None for d in self.transform.dims):
            return None
        return self.transform.lawful_mask(points)


class PendingOutcome(RuntimeError):
    """Raised when an interactive oracle is asked for a label it does not
    have; the surrounding session supplies outcomes asynchronously."""

    def __init__(self, point):
        self.point = np.asarray(point, dtype=float)
        super().__init__(f"outcome for {self.point.tolist()} must be supplied externally")


class InteractiveOracle(Oracle):
    """Human-supplied outcomes, recorded one at a time by a session."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.oracle_id = "interactive"
        self._known: dict = {}

    def record(self, point, label: int) -> None:
        self._known[tuple(np.asarray(point, dtype=float))] = int(label)

    def __call__(self, x) -> int:
        x = as_point(x, self.dimension)
        key = tuple(x)
        if key not in self._known:
            raise PendingOutcome(x)
        return self._known[key]


def load_tabular_csv(csv_path, transform: Transform) -> TabularOracle:
    """Load a complete-lattice outcome table.

    CSV schema: header ``dim1,dim2,...,label``; one row per lattice
    combination in physical coordinates; label in {-1, 1}.
    """
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        p = len(header) - 1
        if p != transform.dimension or header[-1] != "label":
            raise ValueError(
                f"expected header dim1,...,dim{transform.dimension},label, got {header}"
            )
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows)
    levels = [np.unique(data[:, k]) for k in range(p)]
    shape = tuple(len(v) for v in levels)
    expected = int(np.prod(shape))
    if data.shape[0] != expected:
        raise ValueError(
            f"table must cover the full lattice: got {data.shape[0]} rows, "
            f"need {expected}"
        )
    grid = np.zeros(shape, dtype=np.int8)
    seen = np.zeros(shape, dtype=bool)
    for row in data:
        idx = tuple(int(np.searchsorted(levels[k], row[k])) for k in range(p))
        if seen[idx]:
            raise ValueError(f"duplicate lattice row at {row[:-1].tolist()}")
        seen[idx] = True
        lab = int(row[-1])
        if lab not in (-1, 1):
            raise ValueError(f"label must be -1 or 1, got {lab}")
        grid[idx] = lab
    return TabularOracle(levels, grid, transform)


def make_oracle(kind: str, p: int | None = None, **kwargs) -> Oracle:
    """Factory used by the CLI and the benchmark harness."""
    kind = kind.lower()
    if kind == "illustration":
        return IllustrationOracle()
    if kind == "arctan":
        return ArctanContourOracle(p, kwargs["mu"])
    if kind == "halfspace":
        return HalfSpaceOracle(p)
    if kind == "corner":
        return BoundaryCornerOracle(p)
    if kind == "threshold":
        return ThresholdOracle(kwargs.get("threshold", 0.5))
    if kind == "staircase":
        return StaircaseOracle(p, kwargs.get("resolution", 8), kwargs.get("seed", 0))
    if kind == "tabular":
        transform = Transform.load(kwargs["transform_path"])
        return load_tabular_csv(kwargs["table_path"], transform)
    raise ValueError(f"unknown oracle kind {kind!r}")
