"""Mappings between physical input spaces and the unit cube.

Each dimension carries either an affine map or an exhaustive breakpoint
table, plus a monotonicity direction. Decreasing dimensions are realized by
composing with x -> 1 - x, so a wrapped simulator is always non-decreasing
in unit coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

INCREASING = "increasing"
DECREASING = "decreasing"

_MATCH_TOL = 1e-9


class UnlawfulPointError(ValueError):
    """Query does not hit a lawful value of a breakpoint-table dimension."""

    def __init__(self, dim_index, value, lawful):
        self.dim_index = dim_index
        self.value = value
        self.lawful = list(lawful)
        shown = ", ".join(f"{v:g}" for v in self.lawful[:12])
        more = "" if len(self.lawful) <= 12 else f", ... ({len(self.lawful)} values)"
        super().__init__(
            f"dimension {dim_index}: {value!r} is not a lawful value; "
            f"lawful: [{shown}{more}]"
        )


@dataclass(frozen=True)
class AffineMap:
    """physical = scale * u + offset with scale > 0, u in [0, 1]."""

    scale: float
    offset: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive; encode direction separately")

    def apply(self, u: float) -> float:
        return self.scale * u + self.offset

    def invert(self, value: float) -> float:
        return (value - self.offset) / self.scale


@dataclass(frozen=True)
class TableMap:
    """Exhaustive lookup of lawful (unit, physical) pairs, both increasing."""

    breakpoints: tuple  # of (unit_value, physical_value)

    def __post_init__(self):
        u = np.array([b[0] for b in self.breakpoints])
        v = np.array([b[1] for b in self.breakpoints])
        if len(u) < 2 or np.any(np.diff(u) <= 0) or np.any(np.diff(v) <= 0):
            raise ValueError("breakpoints must be strictly increasing in both columns")

    @property
    def unit_values(self) -> np.ndarray:
        return np.array([b[0] for b in self.breakpoints])

    @property
    def physical_values(self) -> np.ndarray:
        return np.array([b[1] for b in self.breakpoints])

    def apply(self, u: float) -> float:
        idx = _match(self.unit_values, u)
        if idx is None:
            raise UnlawfulPointError(-1, u, self.unit_values)
        return float(self.physical_values[idx])

    def invert(self, value: float) -> float:
        idx = _match(self.physical_values, value)
        if idx is None:
            raise UnlawfulPointError(-1, value, self.physical_values)
        return float(self.unit_values[idx])


def _match(values: np.ndarray, x: float):
    idx = int(np.argmin(np.abs(values - x)))
    return idx if abs(values[idx] - x) <= _MATCH_TOL else None


@dataclass(frozen=True)
class DimensionTransform:
    mapping: AffineMap | TableMap
    direction: str = INCREASING
    bounds: tuple | None = None  # physical (lo, hi), informational
    unit_label: str = ""  # free-text physical units

    def __post_init__(self):
        if self.direction not in (INCREASING, DECREASING):
            raise ValueError(f"direction must be increasing/decreasing, got {self.direction!r}")

    def oriented(self, x: float) -> float:
        return x if self.direction == INCREASING else 1.0 - x

    def to_physical(self, x: float) -> float:
        return self.mapping.apply(self.oriented(x))

    def to_unit(self, value: float) -> float:
        return self.oriented(self.mapping.invert(value))

    def lawful_unit_values(self) -> np.ndarray | None:
        """Sorted lawful unit coordinates, or None when continuous."""
        if isinstance(self.mapping, AffineMap):
            return None
        vals = self.mapping.unit_values
        if self.direction == DECREASING:
            vals = 1.0 - vals
        return np.sort(vals)


@dataclass(frozen=True)
class Transform:
    dims: tuple  # of DimensionTransform

    @property
    def dimension(self) -> int:
        return len(self.dims)

    def to_physical(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        self._check_dim(x)
        out = np.empty_like(x)
        for k, dim in enumerate(self.dims):
            try:
                out[k] = dim.to_physical(float(x[k]))
            except UnlawfulPointError as exc:
                raise UnlawfulPointError(k, float(x[k]), exc.lawful) from None
        return out

    def to_unit(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        self._check_dim(values)
        out = np.empty_like(values)
        for k, dim in enumerate(self.dims):
            try:
                out[k] = dim.to_unit(float(values[k]))
            except UnlawfulPointError as exc:
                raise UnlawfulPointError(k, float(values[k]), exc.lawful) from None
        return out

    def lawful_mask(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of rows whose every coordinate is lawful."""
        points = np.asarray(points, dtype=np.float64)
        mask = np.ones(points.shape[0], dtype=bool)
        for k, dim in enumerate(self.dims):
            lawful = dim.lawful_unit_values()
            if lawful is None:
                continue
            idx = np.searchsorted(lawful, points[:, k])
            near_lo = np.abs(lawful[np.clip(idx - 1, 0, len(lawful) - 1)] - points[:, k])
            near_hi = np.abs(lawful[np.clip(idx, 0, len(lawful) - 1)] - points[:, k])
            mask &= np.minimum(near_lo, near_hi) <= _MATCH_TOL
        return mask

    def lawful_lattice(self) -> np.ndarray | None:
        """Full lattice of lawful unit points, or None if any dim continuous."""
        per_dim = [d.lawful_unit_values() for d in self.dims]
        if any(v is None for v in per_dim):
            return None
        mesh = np.meshgrid(*per_dim, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dimension)

    def unit_labels(self) -> list[str]:
        return [d.unit_label for d in self.dims]

    def _check_dim(self, x):
        if x.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} coordinates, got shape {x.shape}")

    # ---- JSON sidecar (external interface) ----

    def to_dict(self) -> dict:
        dims = []
        for d in self.dims:
            entry = {
                "direction": d.direction,
                "bounds": list(d.bounds) if d.bounds else None,
                "unit": d.unit_label,
            }
            if isinstance(d.mapping, AffineMap):
                entry["kind"] = "affine"
                entry["scale"] = d.mapping.scale
                entry["offset"] = d.mapping.offset
            else:
                entry["kind"] = "table"
                entry["breakpoints"] = [[u, v] for u, v in d.mapping.breakpoints]
            dims.append(entry)
        return {"dimensions": dims}

    @classmethod
    def from_dict(cls, data: dict) -> "Transform":
        dims = []
        for entry in data["dimensions"]:
            if entry["kind"] == "affine":
                mapping = AffineMap(float(entry["scale"]), float(entry["offset"]))
            elif entry["kind"] == "table":
                mapping = TableMap(tuple((float(u), float(v)) for u, v in entry["breakpoints"]))
            else:
                raise ValueError(f"unknown mapping kind {entry['kind']!r}")
            bounds = tuple(entry["bounds"]) if entry.get("bounds") else None
            dims.append(
                DimensionTransform(
                    mapping=mapping,
                    direction=entry.get("direction", INCREASING),
                    bounds=bounds,
                    unit_label=entry.get("unit", ""),
                )
            )
        return cls(dims=tuple(dims))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path) -> "Transform":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def identity_transform(p: int) -> Transform:
    return Transform(tuple(DimensionTransform(AffineMap(1.0, 0.0), bounds=(0.0, 1.0)) for _ in range(p)))


def ice_breaking_transform() -> Transform:
    """Velocity / ice thickness / elastic modulus, the latter two decreasing."""
    return Transform(
        (
            DimensionTransform(AffineMap(35.0, 5.0), INCREASING, (5.0, 40.0), "m/s"),
            DimensionTransform(AffineMap(10.0, 5.0), DECREASING, (5.0, 15.0), "mm"),
            DimensionTransform(AffineMap(4.0, 1.0), DECREASING, (1.0, 5.0), "GPa"),
        )
    )


def _glance_breakpoints(lo_unit: float, hi_unit: float) -> tuple:
    # 67 glance-duration levels, 0.0 .. 6.6 s in 0.1 steps; the interior 63
    # levels sit on the affine segment 6.4 x + 0.1 over x in [1/64, 63/64]
    pts = [(lo_unit, 0.0), (1.0 / 128.0, 0.1)]
    for k in range(1, 64):
        pts.append((k / 64.0, round(6.4 * (k / 64.0) + 0.1, 10)))
    pts.append((127.0 / 128.0, 6.5))
    pts.append((hi_unit, 6.6))
    return tuple(pts)


def crash_transform_grid() -> Transform:
    """Dyadic lattice used by boundary-including grid strategies on the
    road-crash table: 67 glance levels x 15 deceleration levels."""
    decel = [(0.0, -10.3)]
    for k in range(2, 15):
        decel.append((k / 16.0, round(8.0 * (k / 16.0) - 10.8, 10)))
    decel.append((1.0, -3.3))
    return Transform(
        (
            DimensionTransform(TableMap(_glance_breakpoints(0.0, 1.0)), INCREASING, (0.0, 6.6), "s"),
            DimensionTransform(TableMap(tuple(decel)), INCREASING, (-10.3, -3.3), "m/s^2"),
        )
    )


def crash_transform_inner() -> Transform:
    """Interior dyadic lattice for inner-grid strategies on the crash table."""
    decel = tuple((k / 16.0, round(8.0 * (k / 16.0) - 10.8, 10)) for k in range(1, 16))
    return Transform(
        (
            DimensionTransform(
                TableMap(_glance_breakpoints(1.0 / 256.0, 255.0 / 256.0)),
                INCREASING,
                (0.0, 6.6),
                "s",
            ),
            DimensionTransform(TableMap(decel), INCREASING, (-10.3, -3.3), "m/s^2"),
        )
    )
