"""Finite representations of nonempty subsets of R^d.

Two concrete forms: PointCloud (finite point list, any polyhedral cone) and
BoxUnion (finite union of axis boxes with per-axis open/closed lower and
upper ends; exact set arithmetic under the orthant only). The preorders
never need more than A + C, cl(A + C) and A + int(C), all of which reduce
to lower-corner sweeps in halfspace coordinates.

Structural equality between SetReps is intentionally not defined; compare
through the order module's equivalence relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence, Union

import numpy as np

from ._kernels import LARGE, LOWER, rel_corners
from .cone import DEFAULT_TOL, Cone
from .errors import DimensionMismatch, SetSpecError, Unsupported
from .verdict import Verdict

_INF = math.inf


@dataclass(frozen=True, eq=False)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    lo_open: tuple[bool, ...]
    hi_open: tuple[bool, ...]

    def __post_init__(self):
        d = len(self.lo)
        if d == 0 or not (len(self.hi) == len(self.lo_open) == len(self.hi_open) == d):
            raise SetSpecError("box endpoint tuples must be nonempty and of equal length")
        for i in range(d):
            lo, hi = self.lo[i], self.hi[i]
            if not math.isfinite(lo):
                raise SetSpecError(f"axis {i}: lower endpoint must be finite, got {lo}")
            if math.isnan(hi):
                raise SetSpecError(f"axis {i}: upper endpoint is NaN")
            if hi == _INF:
                if not self.hi_open[i]:
                    raise SetSpecError(f"axis {i}: an infinite upper end must be open")
                continue
            if lo > hi:
                raise SetSpecError(f"axis {i}: empty interval [{lo}, {hi}]")
            if lo == hi and (self.lo_open[i] or self.hi_open[i]):
                raise SetSpecError(
                    f"axis {i}: degenerate interval at {lo} must be a closed singleton")

    @property
    def dim(self) -> int:
        return len(self.lo)


@dataclass(frozen=True, eq=False)
class BoxUnion:
    dim: int
    boxes: tuple[Box, ...]

    def __post_init__(self):
        if not self.boxes:
            raise SetSpecError("a box union needs at least one box")
        for b in self.boxes:
            if b.dim != self.dim:
                raise DimensionMismatch(f"box of dim {b.dim} in a union of dim {self.dim}")

    def lower_corners(self) -> tuple[np.ndarray, np.ndarray]:
        """(corners, lo_open) as (k, d) float64 / uint8 arrays."""
        c = np.array([b.lo for b in self.boxes], dtype=float)
        o = np.array([b.lo_open for b in self.boxes], dtype=np.uint8)
        return c, o


@dataclass(frozen=True, eq=False)
class PointCloud:
    dim: int
    points: np.ndarray  # (k, dim) float64, read-only

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise SetSpecError("a point cloud needs a nonempty (k, d) point array")
        if pts.shape[1] != self.dim:
            raise DimensionMismatch(f"points of dim {pts.shape[1]} in a cloud of dim {self.dim}")
        if not np.all(np.isfinite(pts)):
            raise SetSpecError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


SetRep = Union[BoxUnion, PointCloud]


def box(lo: Sequence[float], hi: Sequence[float],
        lo_open: Sequence[bool] | None = None,
        hi_open: Sequence[bool] | None = None) -> BoxUnion:
    """Single-box convenience constructor (flags default to closed)."""
    d = len(lo)
    lo_open = tuple(bool(v) for v in (lo_open or [False] * d))
    hi_open = tuple(bool(v) for v in (hi_open or [False] * d))
    return BoxUnion(d, (Box(tuple(map(float, lo)), tuple(map(float, hi)), lo_open, hi_open),))


def points(pts: Sequence[Sequence[float]]) -> PointCloud:
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return PointCloud(arr.shape[1], arr)


@dataclass(frozen=True, eq=False)
class UpSet:
    """Union of upper sets prod_i (l_i, inf) with per-axis lower-end flags.

    Exact representation of A + C (flags preserved) or cl(A + C) (flags
    cleared) for a BoxUnion A under the orthant cone.
    """
    dim: int
    corners: np.ndarray     # (k, dim) float64
    lo_open: np.ndarray     # (k, dim) uint8
    closed: bool


@dataclass(frozen=True, eq=False)
class UpsetPredicate:
    """Membership test for A + C (closed=False) or cl(A + C) (closed=True).

    For point-cloud A the two coincide (a finite union of translated closed
    cones is closed); `closed_noop` records that.
    """
    cone: Cone
    closed: bool
    closed_noop: bool
    h_corners: np.ndarray   # (k, m) halfspace coordinates of the corners
    lo_open: np.ndarray     # (k, m) uint8; all zero for point clouds
    upset: UpSet | None     # exact orthant object when A is a BoxUnion

    def __call__(self, z: Sequence[float] | np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        z = np.asarray(z, dtype=float).reshape(1, -1)
        if z.shape[1] != self.cone.dim:
            raise DimensionMismatch(f"point of dim {z.shape[1]} against cone dim {self.cone.dim}")
        hz = np.ascontiguousarray(self.cone.h_coords(z))
        mode = LARGE if self.closed else LOWER
        ok, _ = rel_corners(self.h_corners, self.lo_open, hz,
                            np.zeros_like(hz, dtype=np.uint8), mode, True, tol)
        return ok


def _corner_data(A: SetRep, C: Cone) -> tuple[np.ndarray, np.ndarray, bool]:
    """(h_corners, lo_open flags, is_cloud) for a set under a cone."""
    if isinstance(A, PointCloud):
        h = np.ascontiguousarray(C.h_coords(A.points))
        return h, np.zeros(h.shape, dtype=np.uint8), True
    if isinstance(A, BoxUnion):
        if C.kind != "orthant":
            raise Unsupported("box-union sets require the orthant cone; "
                              "sample to a point cloud for general cones")
        c, o = A.lower_corners()
        return np.ascontiguousarray(c), np.ascontiguousarray(o), False
    raise TypeError(f"not a SetRep: {A!r}")


def upset(A: SetRep, C: Cone, closed: bool) -> UpsetPredicate:
    """Membership predicate for A + C, or cl(A + C) when closed=True."""
    if dim_of(A) != C.dim:
        raise DimensionMismatch(f"set dim {dim_of(A)} against cone dim {C.dim}")
    h, o, is_cloud = _corner_data(A, C)
    if is_cloud:
        return UpsetPredicate(C, closed, True, h, o, None)
    flags = np.zeros_like(o) if closed else o
    exact = UpSet(A.dim, h, flags, closed)
    return UpsetPredicate(C, closed, False, h, flags, exact)


def contains_set(p: UpsetPredicate, B: SetRep, tol: float = DEFAULT_TOL) -> bool:
    """B subset-of the upper set described by p."""
    if dim_of(B) != p.cone.dim:
        raise DimensionMismatch(f"set dim {dim_of(B)} against cone dim {p.cone.dim}")
    hb, ob, b_cloud = _corner_data(B, p.cone)
    mode = LARGE if p.closed else LOWER
    ok, _ = rel_corners(p.h_corners, p.lo_open, hb, ob, mode, b_cloud, tol)
    return ok


def translate(A: SetRep, v: Sequence[float] | np.ndarray) -> SetRep:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != dim_of(A):
        raise DimensionMismatch(f"shift of dim {v.shape[0]} against set dim {dim_of(A)}")
    if isinstance(A, PointCloud):
        return PointCloud(A.dim, A.points + v)
    moved = tuple(
        Box(tuple(float(l + s) for l, s in zip(b.lo, v)),
            tuple(float(h + s) if h != _INF else _INF for h, s in zip(b.hi, v)),
            b.lo_open, b.hi_open)
        for b in A.boxes)
    return BoxUnion(A.dim, moved)


def dim_of(A: SetRep) -> int:
    return A.dim


def min_corner(A: SetRep) -> np.ndarray:
    """Componentwise minimum over points or box lower corners."""
    if isinstance(A, PointCloud):
        return A.points.min(axis=0)
    c, _ = A.lower_corners()
    return c.min(axis=0)


def is_c_proper(A: SetRep, C: Cone) -> Verdict:
    """A + C != R^d, certified by an explicit point outside cl(A + C)."""
    if dim_of(A) != C.dim:
        raise DimensionMismatch(f"set dim {dim_of(A)} against cone dim {C.dim}")
    if isinstance(A, BoxUnion) and C.kind != "orthant":
        return Verdict.inconclusive("box-union sets under a general cone are unsupported")
    if isinstance(A, PointCloud):
        # push far enough along -u that the first halfspace row rules out
        # domination by every point of A
        h = C.h_coords(A.points)
        pmin = A.points.min(axis=0)
        t = 1.0 + float(C.h_coords(pmin.reshape(1, -1))[0, 0] - h[:, 0].min())
        z = pmin - t * C.interior_direction
    else:
        z = min_corner(A) - 1.0
    pred = upset(A, C, closed=True)
    if pred(z, tol=DEFAULT_TOL):  # pragma: no cover - defensive
        return Verdict.fails("constructed exterior point landed inside A + C",
                             counterexample={"point": z})
    return Verdict.holds("found a point outside cl(A + C)", certificate={"point": z})


# -- JSON literals -----------------------------------------------------------


def set_from_json(obj: dict[str, Any]) -> SetRep:
    if not isinstance(obj, dict):
        raise SetSpecError(f"bad set literal: {obj!r}")
    if "points" in obj:
        return points(obj["points"])
    if "boxes" in obj:
        parsed = []
        for raw in obj["boxes"]:
            lo = [float(v) for v in raw["lo"]]
            hi = [_INF if v == "inf" else float(v) for v in raw["hi"]]
            d = len(lo)
            lo_open = [bool(v) for v in raw.get("lo_open", [False] * d)]
            hi_open = [bool(v) for v in raw.get("hi_open", [False] * d)]
            parsed.append(Box(tuple(lo), tuple(hi), tuple(lo_open), tuple(hi_open)))
        if not parsed:
            raise SetSpecError("empty box list")
        return BoxUnion(parsed[0].dim, tuple(parsed))
    raise SetSpecError("set literal needs a 'points' or 'boxes' key")


def set_to_json(A: SetRep) -> dict[str, Any]:
    if isinstance(A, PointCloud):
        return {"points": A.points.tolist()}
    return {"boxes": [
        {"lo": list(b.lo),
         "hi": ["inf" if v == _INF else v for v in b.hi],
         "lo_open": list(b.lo_open),
         "hi_open": list(b.hi_open)}
        for b in A.boxes]}


def sample_points(A: SetRep, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw points of A itself (not of A + C); used by property tests.

    Box sampling stays strictly inside open ends and caps unbounded axes.
    """
    if isinstance(A, PointCloud):
        idx = rng.integers(0, A.points.shape[0], size=count)
        return A.points[idx]
    out = np.empty((count, A.dim))
    which = rng.integers(0, len(A.boxes), size=count)
    for i in range(count):
        b = A.boxes[which[i]]
        for j in range(A.dim):
            lo, hi = b.lo[j], b.hi[j]
            if hi == _INF:
                hi = lo + 2.0
            if lo == hi:
                out[i, j] = lo
                continue
            frac = rng.uniform(0.25, 0.75)
            out[i, j] = lo + frac * (hi - lo)
    return out
