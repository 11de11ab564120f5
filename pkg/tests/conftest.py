"""Shared generators and helpers.

Random sets for order-law tests live on the half-integer lattice (all
coordinates k/2) so that every corner comparison is IEEE-exact: law
violations can then never hide behind rounding, and the suites demand
zero violations rather than a tolerance band.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from setorder.cone import Cone
from setorder.order import OrderCtx
from setorder.setrep import Box, BoxUnion, PointCloud

LATTICE_STEP = 0.5
EXACT_SCALES = (0.5, 1.0, 2.0, 3.0, 4.0)


@pytest.fixture(scope="session")
def ctx1() -> OrderCtx:
    return OrderCtx(Cone.orthant(1))


@pytest.fixture(scope="session")
def ctx2() -> OrderCtx:
    return OrderCtx(Cone.orthant(2))


@pytest.fixture(scope="session")
def ctx3() -> OrderCtx:
    return OrderCtx(Cone.orthant(3))


def lattice_coord() -> st.SearchStrategy[float]:
    return st.integers(-8, 8).map(lambda k: k * LATTICE_STEP)


def lattice_point(dim: int) -> st.SearchStrategy[tuple[float, ...]]:
    return st.tuples(*[lattice_coord()] * dim)


@st.composite
def lattice_cloud(draw, dim: int, max_points: int = 6) -> PointCloud:
    count = draw(st.integers(1, max_points))
    pts = [draw(lattice_point(dim)) for _ in range(count)]
    return PointCloud(dim, np.array(pts, dtype=float))


@st.composite
def lattice_box(draw, dim: int) -> Box:
    lo, hi, lo_open, hi_open = [], [], [], []
    for _ in range(dim):
        a = draw(lattice_coord())
        width = draw(st.integers(0, 6)) * LATTICE_STEP
        unbounded = draw(st.booleans()) and width > 0
        b = np.inf if unbounded else a + width
        if width == 0 and not unbounded:
            oa = ob = False
        else:
            oa = draw(st.booleans())
            ob = True if unbounded else draw(st.booleans())
        lo.append(a)
        hi.append(b)
        lo_open.append(oa)
        hi_open.append(ob)
    return Box(tuple(lo), tuple(hi), tuple(lo_open), tuple(hi_open))


@st.composite
def lattice_box_union(draw, dim: int, max_boxes: int = 3) -> BoxUnion:
    count = draw(st.integers(1, max_boxes))
    return BoxUnion(dim, tuple(draw(lattice_box(dim)) for _ in range(count)))


@st.composite
def lattice_set(draw, dim: int):
    if draw(st.booleans()):
        return draw(lattice_cloud(dim))
    return draw(lattice_box_union(dim))


def scale_set(A, lam: float):
    """Image of A under z -> lam*z; exact for lattice data and dyadic lam."""
    if isinstance(A, PointCloud):
        return PointCloud(A.dim, A.points * lam)
    boxes = tuple(
        Box(tuple(l * lam for l in b.lo),
            tuple(h * lam if h != np.inf else np.inf for h in b.hi),
            b.lo_open, b.hi_open)
        for b in A.boxes)
    return BoxUnion(A.dim, boxes)


def random_solid_cone(rng: np.random.Generator, dim: int, rows: int) -> Cone:
    """Halfspace cone guaranteed solid: rows cluster around a common center."""
    center = rng.standard_normal(dim)
    center /= np.linalg.norm(center)
    G = []
    for _ in range(rows):
        e = rng.standard_normal(dim)
        e /= np.linalg.norm(e)
        G.append(center + 0.85 * e)
    return Cone.from_halfspaces(np.array(G))
