"""NumPy reference kernels for pairwise corner comparisons.

Every preorder query between two finitely-represented sets reduces to a
"for every B-corner there is an A-corner dominating it" sweep over
halfspace coordinates. These two reductions are the package's hot path;
a compiled twin lives in _fast.pyx and must match this module bit for bit.

Conventions shared by both backends:
  * ca/cb: (na, m) / (nb, m) float64 lower corners in halfspace coordinates;
  * oa/ob: matching uint8 openness flags (1 = open lower end); point clouds
    pass all-zero flags;
  * b_cloud: True when B is a point cloud, which is the only case where tol
    enters (box-vs-box corner logic is exact);
  * returns (ok, bad_b) with bad_b the first uncovered B-corner, -1 if ok.
"""

from __future__ import annotations

import numpy as np

LOWER = 0
LARGE = 1
STRICT = 2


def rel_corners(ca: np.ndarray, oa: np.ndarray, cb: np.ndarray, ob: np.ndarray,
                mode: int, b_cloud: bool, tol: float) -> tuple[bool, int]:
    A = ca[None, :, :]   # (1, na, m)
    B = cb[:, None, :]   # (nb, 1, m)
    if mode == STRICT:
        need = B > A + tol if b_cloud else B > A
    elif mode == LARGE:
        need = B >= A - tol if b_cloud else B >= A
    elif mode == LOWER:
        if b_cloud:
            open_a = oa[None, :, :] != 0
            need = np.where(open_a, B > A + tol, B >= A - tol)
        else:
            # box corner lies in the upper set iff per axis:
            # cb > ca, or cb == ca and (ca open implies cb open)
            flag_ok = (oa[None, :, :] == 0) | (ob[:, None, :] != 0)
            need = (B > A) | ((B == A) & flag_ok)
    else:
        raise ValueError(f"unknown relation mode {mode}")
    covered = need.all(axis=2).any(axis=1)   # (nb,)
    if covered.all():
        return True, -1
    return False, int(np.flatnonzero(~covered)[0])


def shift_bound(ha: np.ndarray, hb: np.ndarray, w: np.ndarray) -> tuple[float, int]:
    """Largest s with ha + s*w componentwise-below hb in the forall-exists sense.

    Openness flags are deliberately ignored: the bound is consumed only where
    a strict epsilon of slack exists on at least one side. Returns (s, b) with
    b the index of the tightest B-corner.
    """
    diff = (hb[:, None, :] - ha[None, :, :]) / w   # (nb, na, m)
    per_b = diff.min(axis=2).max(axis=1)           # (nb,)
    b = int(np.argmin(per_b))
    return float(per_b[b]), b
