"""Set optimization problems: discretized domains, piecewise maps, families.

A Problem bundles a set-valued objective over a finite grid with an
ordering cone. A PerturbedFamily adds an indexed sequence of problems
sharing that cone. Everything is validated eagerly at load time: guard
coverage, value well-formedness, and properness of every grid value, so
the solvers can assume a total, memoized ``value``.

Every universally quantified statement downstream ("for all x in D")
ranges over the grid points stored here; reports carry the step so that
reading a verdict never requires guessing the discretization.
"""

from __future__ import annotations

import inspect
import itertools
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .cone import Cone
from .errors import ExprError, HorizonExceeded, ProblemLoadError, SetSpecError
from .setrep import Box, BoxUnion, PointCloud, SetRep, is_c_proper

# finite upper endpoints beyond this are treated as unbounded; keeps huge
# exp(n) values from overflowing later arithmetic while changing nothing
# about lower-corner comparisons
_HI_CAP = 1e15


# ---------------------------------------------------------------- domains

@dataclass(frozen=True)
class Window:
    """1-D grid window: points a + j*step while they stay inside [a, b].

    ``hi_open`` drops b itself (used for half-open perturbed domains);
    ``truncated`` marks the window as a stand-in for an unbounded set, a
    caveat that propagates into reports.
    """
    a: float
    b: float
    step: float
    truncated: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ProblemLoadError("window endpoints must be finite")
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ProblemLoadError("window step must be positive and finite")
        if self.b < self.a:
            raise ProblemLoadError(f"empty window [{self.a}, {self.b}]")

    def points(self) -> list[float]:
        out = []
        j = 0
        while True:
            v = self.a + j * self.step
            if v > self.b or (self.hi_open and v >= self.b):
                return out
            out.append(v)
            j += 1


class Domain:
    """Finite point set, either an explicit list or a product of windows."""

    def __init__(self, points: np.ndarray, windows: Optional[tuple[Window, ...]] = None):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ProblemLoadError("domain must contain at least one point")
        if not np.all(np.isfinite(pts)):
            raise ProblemLoadError("domain points must be finite")
        pts.setflags(write=False)
        self.points = pts
        self.windows = windows
        self._index: dict[tuple[float, ...], int] = {
            tuple(p): i for i, p in enumerate(pts)}

    @classmethod
    def from_windows(cls, windows: Sequence[Window]) -> "Domain":
        axes = [w.points() for w in windows]
        for w, ax in zip(windows, axes):
            if not ax:
                raise ProblemLoadError(f"window [{w.a}, {w.b}] step {w.step} has no grid points")
        pts = np.array(list(itertools.product(*axes)), dtype=np.float64)
        return cls(pts, tuple(windows))

    @classmethod
    def from_points(cls, pts) -> "Domain":
        return cls(np.asarray(pts, dtype=np.float64))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def truncated(self) -> bool:
        return bool(self.windows) and any(w.truncated for w in self.windows)

    def __len__(self) -> int:
        return self.points.shape[0]

    def index_of(self, x) -> Optional[int]:
        """Exact-match grid index, or None."""
        return self._index.get(tuple(np.asarray(x, dtype=np.float64)))

    def nearest_index(self, x) -> int:
        d = np.linalg.norm(self.points - np.asarray(x, dtype=np.float64), axis=1)
        return int(np.argmin(d))

    def step_summary(self) -> object:
        if self.windows is None:
            return "explicit"
        return [w.step for w in self.windows]


# ----------------------------------------------------------- guarded maps

_COMPARE = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


@dataclass(frozen=True)
class Guard:
    """Conjunction of comparisons between expressions; () matches everything."""
    atoms: tuple[tuple[ex.Expr, str, ex.Expr], ...]
    text: str = "true"

    @classmethod
    def parse(cls, src: str) -> "Guard":
        src = src.strip()
        if src in ("", "true"):
            return cls((), "true")
        atoms = []
        for clause in src.split(" and "):
            m = None
            # scan for the longest operator first so "<=" is not read as "<"
            for op in ("<=", ">=", "<", ">"):
                if op in clause:
                    m = op
                    break
            if m is None:
                raise ProblemLoadError(f"guard clause {clause!r} has no comparison")
            lhs, rhs = clause.split(m, 1)
            atoms.append((ex.parse(lhs), m, ex.parse(rhs)))
        return cls(tuple(atoms), src)

    def matches(self, env: Mapping[str, object]) -> bool:
        return all(_COMPARE[op](ex.evaluate(l, env), ex.evaluate(r, env))
                   for l, op, r in self.atoms)


@dataclass(frozen=True)
class AxisSpec:
    """One box axis: endpoint expressions plus openness flags."""
    lo: ex.Expr
    hi: ex.Expr
    lo_open: bool = False
    hi_open: bool = False


@dataclass(frozen=True)
class Piece:
    guard: Guard
    box_axes: Optional[tuple[AxisSpec, ...]] = None
    point_vectors: Optional[tuple[tuple[ex.Expr, ...], ...]] = None

    def __post_init__(self):
        if (self.box_axes is None) == (self.point_vectors is None):
            raise ProblemLoadError("piece must define exactly one of box / points")


class PieceMap:
    """First-matching-piece expression map x -> SetRep."""

    def __init__(self, pieces: Sequence[Piece], image_dim: int):
        if not pieces:
            raise ProblemLoadError("map needs at least one piece")
        self.pieces = tuple(pieces)
        self.image_dim = image_dim

    def value(self, x, n: Optional[int] = None) -> SetRep:
        env: dict[str, object] = {"x": tuple(float(c) for c in x)}
        if n is not None:
            env["n"] = n
        for k, piece in enumerate(self.pieces):
            if piece.guard.matches(env):
                return _eval_piece(piece, k, env, self.image_dim)
        raise ProblemLoadError(f"no piece matches x = {env['x']}")


def _eval_piece(piece: Piece, k: int, env, image_dim: int) -> SetRep:
    if piece.point_vectors is not None:
        pts = [[ex.evaluate(c, env) for c in vec] for vec in piece.point_vectors]
        return PointCloud(image_dim, np.array(pts, dtype=np.float64))
    lo, hi, lo_open, hi_open = [], [], [], []
    for axis, spec in enumerate(piece.box_axes):
        a = ex.evaluate(spec.lo, env)
        b = ex.evaluate(spec.hi, env)
        a_open, b_open = spec.lo_open, spec.hi_open
        if not math.isfinite(a):
            raise ProblemLoadError(
                f"piece {k} axis {axis}: lower endpoint evaluated to {a} at x = {env['x']}")
        if b > _HI_CAP:
            b, b_open = math.inf, True
        if b < a:
            raise ProblemLoadError(
                f"piece {k} axis {axis}: empty interval [{a}, {b}] at x = {env['x']}")
        if b == a and (a_open or b_open):
            raise ProblemLoadError(
                f"piece {k} axis {axis}: degenerate interval at {a} must be a "
                f"closed singleton (x = {env['x']})")
        lo.append(a)
        hi.append(b)
        lo_open.append(a_open)
        hi_open.append(b_open)
    b = Box(tuple(lo), tuple(hi), tuple(lo_open), tuple(hi_open))
    return BoxUnion(image_dim, (b,))


class TableMap:
    """Programmatic map for crafted test families: a callable per point."""

    def __init__(self, fn: Callable[..., SetRep], image_dim: int):
        self.fn = fn
        self.image_dim = image_dim
        self._takes_n = len(inspect.signature(fn).parameters) >= 2

    def value(self, x, n: Optional[int] = None) -> SetRep:
        if self._takes_n and n is not None:
            return self.fn(tuple(x), n)
        return self.fn(tuple(x))


SetValuedMap = Union[PieceMap, TableMap]


# ---------------------------------------------------------------- problem

class Problem:
    """SetValuedMap + Cone + Domain, fully validated and memoized on the grid."""

    def __init__(self, label: str, map: SetValuedMap, cone: Cone, domain: Domain,
                 n: Optional[int] = None, check_proper: bool = True):
        if map.image_dim != cone.dim:
            raise ProblemLoadError(
                f"map image dim {map.image_dim} != cone dim {cone.dim}")
        self.label = label
        self.map = map
        self.cone = cone
        self.domain = domain
        self.n = n
        values = []
        for x in domain.points:
            try:
                v = map.value(x, n)
            except (SetSpecError, ExprError) as e:
                raise ProblemLoadError(
                    f"value at x = {tuple(float(c) for c in x)}: {e}") from e
            values.append(v)
        self._values = tuple(values)
        if check_proper:
            for i, v in enumerate(self._values):
                verdict = is_c_proper(v, cone)
                if verdict.is_fails:
                    raise ProblemLoadError(
                        f"value at x = {tuple(domain.points[i])} is not proper "
                        f"for the cone: {verdict.reason} "
                        f"(certificate {verdict.counterexample})")

    def value(self, i: int) -> SetRep:
        return self._values[i]

    def value_at(self, x) -> SetRep:
        i = self.domain.index_of(x)
        if i is None:
            raise ProblemLoadError(
                f"x = {tuple(float(c) for c in np.atleast_1d(x))} is not a grid point")
        return self._values[i]

    def values(self) -> tuple[SetRep, ...]:
        return self._values

    def __len__(self) -> int:
        return len(self.domain)


# ----------------------------------------------------------------- family

class PerturbedFamily:
    """Base problem plus n -> Problem, sharing one cone.

    ``factory(n)`` results are cached; the cache is filled before the
    family is handed to any worker threads, or grows monotonically under
    the interpreter lock, so concurrent readers are safe.
    """

    def __init__(self, base: Problem, factory: Callable[[int], Problem],
                 n_max: int, recovery_hint: Optional[tuple[ex.Expr, ...]] = None,
                 label: Optional[str] = None,
                 domain_factory: Optional[Callable[[int], Domain]] = None):
        if n_max < 8:
            raise ProblemLoadError(f"family horizon n_max = {n_max} must be >= 8")
        self.base = base
        self.factory = factory
        self.n_max = int(n_max)
        self.recovery_hint = recovery_hint
        self.label = label or base.label
        self.domain_factory = domain_factory
        self._cache: dict[int, Problem] = {}
        self._domain_cache: dict[int, Domain] = {}

    def recovery_point(self, x, n: int) -> Optional[np.ndarray]:
        if self.recovery_hint is None:
            return None
        env = {"x": tuple(x), "n": n}
        return np.array([ex.evaluate(h, env) for h in self.recovery_hint])

    def domain_at(self, n: int) -> Domain:
        """D_n without the cost of evaluating the map over its grid."""
        if not (0 <= n <= self.n_max):
            raise HorizonExceeded(f"n = {n} outside [0, {self.n_max}]")
        got = self._domain_cache.get(n)
        if got is None:
            cached = self._cache.get(n)
            if cached is not None:
                got = cached.domain
            elif self.domain_factory is not None:
                got = self.domain_factory(n)
            else:
                got = family_at(self, n).domain
            self._domain_cache[n] = got
        return got


def family_at(fam: PerturbedFamily, n: int) -> Problem:
    if not (0 <= n <= fam.n_max):
        raise HorizonExceeded(f"n = {n} outside [0, {fam.n_max}]")
    got = fam._cache.get(n)
    if got is None:
        got = fam.factory(n)
        if not _cones_equal(got.cone, fam.base.cone):
            raise ProblemLoadError(f"family cone changed at n = {n}; "
                                   "only the map and domain may vary")
        fam._cache[n] = got
    return got


def _cones_equal(c1: Cone, c2: Cone) -> bool:
    return c1 is c2 or (c1.dim == c2.dim and
                        np.array_equal(c1.halfspaces, c2.halfspaces))


# ------------------------------------------------------------ JSON loader

def _data_dir(kind: str):
    return resources.files("setorder") / "data" / kind


def _schema():
    return json.loads((_data_dir("schema") / "problem.schema.json").read_text())


def _validate_schema(doc: dict) -> None:
    import jsonschema
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise ProblemLoadError(f"schema: {e.message} (at {path or 'root'})") from e


def _num_or_expr(v, env) -> float:
    if isinstance(v, (int, float)):
        return float(v)
    return ex.evaluate(ex.parse(v), env)


def _build_window(spec: dict, env) -> Window:
    return Window(
        a=_num_or_expr(spec["a"], env),
        b=_num_or_expr(spec["b"], env),
        step=_num_or_expr(spec["step"], env),
        truncated=bool(spec.get("truncated", False)),
        hi_open=bool(spec.get("hi_open", False)),
    )


def _build_domain(spec: dict, env) -> Domain:
    if "points" in spec:
        return Domain.from_points(spec["points"])
    return Domain.from_windows([_build_window(w, env) for w in spec["windows"]])


def _parse_endpoint(v) -> ex.Expr:
    return ex.parse(str(v)) if not isinstance(v, str) else ex.parse(v)


def _build_map(spec: dict, image_dim: int) -> PieceMap:
    pieces = []
    for p in spec["pieces"]:
        guard = Guard.parse(p.get("guard", "true"))
        if "box" in p:
            axes = tuple(
                AxisSpec(lo=_parse_endpoint(a["lo"]), hi=_parse_endpoint(a["hi"]),
                         lo_open=bool(a.get("lo_open", False)),
                         hi_open=bool(a.get("hi_open", False)))
                for a in p["box"])
            if len(axes) != image_dim:
                raise ProblemLoadError(
                    f"box piece has {len(axes)} axes, cone dim is {image_dim}")
            pieces.append(Piece(guard, box_axes=axes))
        else:
            vecs = tuple(tuple(_parse_endpoint(c) for c in vec) for vec in p["points"])
            for vec in vecs:
                if len(vec) != image_dim:
                    raise ProblemLoadError(
                        f"point vector has {len(vec)} coordinates, cone dim is {image_dim}")
            pieces.append(Piece(guard, point_vectors=vecs))
    return PieceMap(pieces, image_dim)


def load_dict(doc: dict) -> Union[Problem, PerturbedFamily]:
    _validate_schema(doc)
    cone = Cone.from_json(doc["cone"])
    label = doc["label"]
    base_domain = _build_domain(doc["domain"], env={})
    base_map = _build_map(doc["map"], cone.dim)
    base = Problem(label, base_map, cone, base_domain)

    fam_spec = doc.get("family")
    if fam_spec is None:
        return base

    dom_n_spec = fam_spec.get("domain_n", doc["domain"])
    map_n = (_build_map(fam_spec["map_n"], cone.dim)
             if "map_n" in fam_spec else base_map)

    def domain_factory(n: int) -> Domain:
        return _build_domain(dom_n_spec, env={"n": n})

    def factory(n: int) -> Problem:
        return Problem(f"{label}[n={n}]", map_n, cone, domain_factory(n), n=n)

    hint = fam_spec.get("recovery_hint")
    hint_exprs = tuple(ex.parse(h) for h in hint) if hint else None
    return PerturbedFamily(base, factory, n_max=int(fam_spec["n_max"]),
                           domain_factory=domain_factory,
                           recovery_hint=hint_exprs, label=label)


def load(path) -> Union[Problem, PerturbedFamily]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ProblemLoadError(f"not valid JSON: {e}") from e
    return load_dict(doc)


def builtin_names() -> list[str]:
    root = _data_dir("problems")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_builtin(name: str) -> Union[Problem, PerturbedFamily]:
    f = _data_dir("problems") / f"{name}.json"
    if not f.is_file():
        raise ProblemLoadError(
            f"no builtin problem {name!r}; available: {', '.join(builtin_names())}")
    return load_dict(json.loads(f.read_text()))
