"""The lower set-less preorders.

Three relations on nonempty sets, induced by a solid polyhedral cone C:

    lower_le(A, B):  B inside A + C
    large_le(A, B):  B inside cl(A + C)
    strict_lt(A, B): A + eps below B for some eps in int(C)

plus the equivalence large_le both ways. For finite representations
strict_lt is decided pointwise (every B-corner strictly dominated by some
A-corner); equivalence with the existential-epsilon form is re-checked on
demand along the ray eps = t*u, u the cone's interior direction.

Universal epsilon quantifiers everywhere in the package are instantiated
along that same ray, on a strictly decreasing schedule.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._kernels import LARGE, LOWER, STRICT, rel_corners, shift_bound
from .cone import DEFAULT_TOL, Cone
from .errors import InternalCheckError
from .setrep import SetRep, _corner_data, translate
from .verdict import Verdict
from . import setrep

DEFAULT_EPS_SCHEDULE: tuple[float, ...] = tuple(2.0 ** -k for k in range(21))


def crosscheck_enabled() -> bool:
    """Redundant strict_lt verification via the epsilon-schedule search."""
    return os.environ.get("SETORDER_DEBUG", "").strip() not in ("", "0")


@dataclass(frozen=True, eq=False)
class OrderCtx:
    cone: Cone
    tol: float = DEFAULT_TOL
    eps_schedule: tuple[float, ...] = DEFAULT_EPS_SCHEDULE

    def __post_init__(self):
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        sched = tuple(float(t) for t in self.eps_schedule)
        if not sched or any(t <= 0 for t in sched):
            raise ValueError("eps schedule must be positive")
        if any(b >= a for a, b in zip(sched, sched[1:])) or sched[-1] >= 1e-6:
            raise ValueError("eps schedule must decrease strictly to below 1e-6")
        object.__setattr__(self, "eps_schedule", sched)

    @cached_property
    def u(self) -> np.ndarray:
        """Interior ray direction used to instantiate epsilon quantifiers."""
        return self.cone.interior_direction

    @cached_property
    def w(self) -> np.ndarray:
        """u in halfspace coordinates; every entry >= 1 by normalization."""
        return np.ascontiguousarray(self.cone.h_coords(self.u.reshape(1, -1))[0])


def _rel(A: SetRep, B: SetRep, ctx: OrderCtx, mode: int) -> bool:
    ha, oa, _ = _corner_data(A, ctx.cone)
    hb, ob, b_cloud = _corner_data(B, ctx.cone)
    ok, _ = rel_corners(ha, oa, hb, ob, mode, b_cloud, ctx.tol)
    return ok


def lower_le(A: SetRep, B: SetRep, ctx: OrderCtx) -> bool:
    """A below B: B inside A + C."""
    return _rel(A, B, ctx, LOWER)


def large_le(A: SetRep, B: SetRep, ctx: OrderCtx) -> bool:
    """A largely below B: B inside cl(A + C)."""
    return _rel(A, B, ctx, LARGE)


def strict_lt(A: SetRep, B: SetRep, ctx: OrderCtx) -> bool:
    """A strictly below B: some interior eps with A + eps below B."""
    primary = _rel(A, B, ctx, STRICT)
    if crosscheck_enabled():
        searched = strict_lt_by_search(A, B, ctx)
        # the ray search can only miss when the true margin sits below the
        # schedule floor; that direction is not a disagreement
        if searched and not primary:
            raise InternalCheckError(
                "strict_lt: epsilon search succeeded where pointwise domination failed")
        if primary and not searched and _margin(A, B, ctx) > ctx.eps_schedule[-1] * 4:
            raise InternalCheckError(
                "strict_lt: pointwise domination not confirmed by epsilon search")
    return primary


def strict_lt_by_search(A: SetRep, B: SetRep, ctx: OrderCtx) -> bool:
    """Existential form of strict_lt along the ray eps = t*u."""
    return any(lower_le(translate(A, t * ctx.u), B, ctx) for t in ctx.eps_schedule)


def equiv(A: SetRep, B: SetRep, ctx: OrderCtx) -> bool:
    """Closed-upset equality: large_le both ways."""
    return large_le(A, B, ctx) and large_le(B, A, ctx)


def shift_margin(A: SetRep, B: SetRep, ctx: OrderCtx) -> tuple[float, int]:
    """Largest s with translate(A, s*u) largely below B, flags aside.

    Positive s measures slack, negative s measures violation; the second
    component is the index of the tightest corner/point of B. Exact for
    point-cloud B; for box B it ignores endpoint flags, so consume it only
    where a strictly positive epsilon of slack is in play.
    """
    ha, _, _ = _corner_data(A, ctx.cone)
    hb, _, _ = _corner_data(B, ctx.cone)
    return shift_bound(ha, hb, ctx.w)


def _margin(A: SetRep, B: SetRep, ctx: OrderCtx) -> float:
    return shift_margin(A, B, ctx)[0]


def not_proper_witness(A: SetRep, ctx: OrderCtx) -> Verdict:
    """Self-consistency probe for C-properness.

    Computes properness twice: geometrically (a point outside A + C) and
    through the order (no strict self-domination). The two must agree.
    """
    proper = setrep.is_c_proper(A, ctx.cone)
    try:
        self_strict = strict_lt(A, A, ctx)
    except Exception:
        self_strict = None
    if self_strict is None or proper.is_inconclusive:
        return Verdict.inconclusive("properness undecidable for this representation/cone pair")
    if proper.is_holds and not self_strict:
        return Verdict.holds("A + C is a proper subset and A is not strictly below itself",
                             certificate=dict(proper.certificate))
    if proper.is_holds and self_strict:
        return Verdict.fails("strict self-domination on a C-proper set",
                             counterexample={"set": setrep.set_to_json(A)})
    if proper.is_fails and self_strict:  # pragma: no cover - unreachable for our reps
        return Verdict.fails("A + C covers the space (consistent: A strictly below itself)",
                             counterexample={"set": setrep.set_to_json(A)})
    return Verdict.fails("properness routes disagree",  # pragma: no cover
                         counterexample={"set": setrep.set_to_json(A)})
