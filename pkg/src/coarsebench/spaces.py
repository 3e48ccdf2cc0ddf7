"""Finite metric spaces organized as truncation towers.

A tower is a nested chain of finite point sets, all carrying one total
distance function, standing in for a countable discrete space at desk scale.
Towers come either from named generators (integer lines, square/cube gap
sequences, discrete unit spaces) or from explicit matrices loaded via
:mod:`coarsebench.schemas`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .exact import Q, as_q

Point = object
DistFn = Callable[[Point, Point], Q]

_INT64_GUARD = 2**61


def point_sort_key(p):
    """Deterministic order for heterogeneous point labels."""
    return (type(p).__name__, repr(p) if not isinstance(p, (int, Fraction)) else "", p if isinstance(p, (int, Fraction)) else 0)


def json_point(p):
    """JSON-stable form of a point label; round-trips for int/str labels."""
    if isinstance(p, (int, str)):
        return p
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    if isinstance(p, tuple):
        return [json_point(v) for v in p]
    return repr(p)


@dataclass(frozen=True)
class InputError(Exception):
    message: str

    def __str__(self):
        return self.message


class MetricTower:
    """Nested finite point sets sharing one exact distance function.

    `levels` are tuples of point labels, each a subset of the next; `dist`
    is total on the union and is never interpolated or rounded.  Dense
    per-level distance matrices are cached after first use.
    """

    def __init__(self, levels: Sequence[Iterable], dist: DistFn, generator: Optional[dict] = None):
        lv = tuple(tuple(sorted(set(points), key=point_sort_key)) for points in levels)
        if not lv or any(len(points) == 0 for points in lv):
            raise InputError("tower needs at least one nonempty level")
        self.levels = lv
        self.dist = dist
        self.generator = generator
        self._dense: dict[int, list[list[Q]]] = {}
        self._index: dict[int, dict] = {}

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def points(self, level: int = -1) -> tuple:
        return self.levels[level]

    def index_at(self, level: int = -1) -> dict:
        key = level % self.num_levels
        if key not in self._index:
            self._index[key] = {p: i for i, p in enumerate(self.levels[key])}
        return self._index[key]

    def dense(self, level: int = -1) -> list[list[Q]]:
        """Dense distance matrix for one level, row/col order = sorted points."""
        key = level % self.num_levels
        if key not in self._dense:
            pts = self.levels[key]
            d = self.dist
            self._dense[key] = [[d(p, q) for q in pts] for p in pts]
        return self._dense[key]

    def first_level_with(self, *points) -> Optional[int]:
        for i, level in enumerate(self.levels):
            if all(p in level for p in points):
                return i
        return None

    def __repr__(self):
        gen = self.generator["name"] if self.generator else "explicit"
        sizes = ",".join(str(len(l)) for l in self.levels)
        return f"MetricTower({gen}; sizes {sizes})"


def int_matrix(rows: Sequence[Sequence[Q]]):
    """np.int64 view of an exact matrix, or None when that would be lossy."""
    flat = []
    for row in rows:
        for v in row:
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    return None
                v = v.numerator
            if not isinstance(v, int) or abs(v) > _INT64_GUARD:
                return None
            flat.append(v)
    n = len(rows)
    m = len(rows[0]) if rows else 0
    return np.array(flat, dtype=np.int64).reshape(n, m)


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Violation:
    axiom: str
    points: tuple
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()

    def to_json(self):
        return {
            "ok": self.ok,
            "violations": [
                {"axiom": v.axiom, "points": [repr(p) for p in v.points], "detail": v.detail}
                for v in self.violations
            ],
        }


def validate_metric(tower: MetricTower, max_violations: int = 20) -> ValidationReport:
    """Check nesting plus the three metric axioms; violations name their points.

    Axioms are scanned on the deepest level (which contains every nested
    level, so shared pairs are covered once); the scan is exact.
    """
    violations: list[Violation] = []

    def add(axiom, points, detail):
        if len(violations) < max_violations:
            violations.append(Violation(axiom, points, detail))

    for i in range(tower.num_levels - 1):
        missing = set(tower.levels[i]) - set(tower.levels[i + 1])
        for p in sorted(missing, key=point_sort_key):
            add("nesting", (p,), f"level {i} point missing from level {i + 1}")

    pts = tower.levels[-1]
    D = tower.dense(-1)
    n = len(pts)
    for i in range(n):
        if D[i][i] != 0:
            add("identity", (pts[i],), f"d(p,p) = {D[i][i]} != 0")
        for j in range(i + 1, n):
            if D[i][j] != D[j][i]:
                add("symmetry", (pts[i], pts[j]), f"{D[i][j]} != {D[j][i]}")
            if D[i][j] <= 0:
                add("identity", (pts[i], pts[j]), f"d = {D[i][j]} for distinct points")

    if not violations:
        M = int_matrix(D)
        if M is not None:
            for k in range(n):
                bad = np.argwhere(M > M[:, k : k + 1] + M[k : k + 1, :])
                for i, j in bad[:max_violations]:
                    add(
                        "triangle",
                        (pts[i], pts[k], pts[j]),
                        f"d({pts[i]!r},{pts[j]!r}) = {D[i][j]} > {D[i][k]} + {D[k][j]}",
                    )
                if len(violations) >= max_violations:
                    break
        else:
            for k in range(n):
                row_k = D[k]
                for i in range(n):
                    dik = D[i][k]
                    row_i = D[i]
                    for j in range(n):
                        if row_i[j] > dik + row_k[j]:
                            add(
                                "triangle",
                                (pts[i], pts[k], pts[j]),
                                f"d({pts[i]!r},{pts[j]!r}) = {row_i[j]} > {dik} + {row_k[j]}",
                            )

    return ValidationReport(ok=not violations, violations=tuple(violations))


# ---------------------------------------------------------------------------
# balls and geometry profiles

def ball(tower: MetricTower, center, radius: Q, level: int = -1) -> frozenset:
    """Points of the level within `radius` of `center` (closed ball)."""
    pts = tower.points(level)
    if center not in tower.index_at(level):
        raise InputError(f"center {center!r} not present at level {level}")
    radius = as_q(radius)
    d = tower.dist
    return frozenset(p for p in pts if d(center, p) <= radius)


def bounded_geometry_profile(tower: MetricTower, radii: Sequence[Q]) -> dict:
    """For each radius, the largest ball cardinality observed at each level.

    A profile whose rows keep growing with the level is evidence against
    bounded geometry; a row that is constant across deep levels is evidence
    for it.  Finite data never proves the uniform bound.
    """
    out = {}
    for radius in radii:
        radius = as_q(radius)
        per_level = []
        for i in range(tower.num_levels):
            D = tower.dense(i)
            n = len(D)
            best = 0
            for row in D:
                count = sum(1 for v in row if v <= radius)
                if count > best:
                    best = count
            per_level.append(best)
        out[radius] = tuple(per_level)
    return out


# ---------------------------------------------------------------------------
# generators

def _sorted_schedule(values, name):
    vals = list(values)
    if not vals or any(v <= 0 for v in vals) or sorted(vals) != vals:
        raise InputError(f"{name} must be a positive increasing schedule")
    return vals


def integer_line(params: dict) -> MetricTower:
    if "spans" in params:
        spans = [tuple(s) for s in params["spans"]]
        for (a, b), (c, d) in zip(spans, spans[1:]):
            if c > a or d < b:
                raise InputError("spans must be nested")
        levels = [range(a, b + 1) for a, b in spans]
    else:
        radii = _sorted_schedule(params["radii"], "radii")
        levels = [range(-r, r + 1) for r in radii]
    return MetricTower(levels, lambda x, y: abs(x - y), {"name": "integer_line", "params": params})


def discrete_unit(params: dict) -> MetricTower:
    sizes = _sorted_schedule(params["sizes"], "sizes")
    levels = [range(k) for k in sizes]
    return MetricTower(levels, lambda x, y: 0 if x == y else 1, {"name": "discrete_unit", "params": params})


def squares(params: dict) -> MetricTower:
    """One-sided square gaps: points n*n for 0 <= n <= count."""
    counts = _sorted_schedule(params["counts"], "counts")
    levels = [[n * n for n in range(c + 1)] for c in counts]
    return MetricTower(levels, lambda x, y: abs(x - y), {"name": "squares", "params": params})


def signed_squares(params: dict) -> MetricTower:
    """Two-sided square gaps: points n*|n| for |n| <= radius.

    The labels are the signed values so that the points indexed by n and -n
    stay distinct and the gap metric |x - y| is a genuine metric.
    """
    radii = _sorted_schedule(params["radii"], "radii")
    levels = [[n * abs(n) for n in range(-r, r + 1)] for r in radii]
    return MetricTower(levels, lambda x, y: abs(x - y), {"name": "signed_squares", "params": params})


GENERATORS: dict[str, Callable[[dict], MetricTower]] = {
    "integer_line": integer_line,
    "discrete_unit": discrete_unit,
    "squares": squares,
    "signed_squares": signed_squares,
}


def tower_from_generator(name: str, params: dict) -> MetricTower:
    if name not in GENERATORS:
        raise InputError(f"unknown generator {name!r}; known: {sorted(GENERATORS)}")
    return GENERATORS[name](params)


def tower_from_matrix(points: Sequence, matrix: Sequence[Sequence], level_sizes: Optional[Sequence[int]] = None) -> MetricTower:
    pts = list(points)
    if len(matrix) != len(pts) or any(len(row) != len(pts) for row in matrix):
        raise InputError("matrix shape must match the point list")
    table = {}
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            table[(p, q)] = as_q(matrix[i][j])
    if level_sizes is None:
        level_sizes = [len(pts)]
    if list(level_sizes) != sorted(level_sizes) or level_sizes[-1] != len(pts):
        raise InputError("level sizes must increase and end at the full point list")
    levels = [pts[:k] for k in level_sizes]

    def dist(x, y):
        return table[(x, y)]

    return MetricTower(levels, dist, None)


# ---------------------------------------------------------------------------
# named alternative metrics on a tower's points

def _signed_index(value: int) -> int:
    mag = math.isqrt(abs(value))
    if mag * mag != abs(value):
        raise InputError(f"{value!r} is not a signed-square label")
    return mag if value >= 0 else -mag


def cube_gap_value(n: int) -> int:
    """The interleaving cube map: two-sided indices onto one-sided cubes."""
    return (2 * n) ** 3 if n >= 0 else -((2 * n + 1) ** 3)


def metric_fn(tower: MetricTower, spec) -> DistFn:
    """Resolve a metric description to an exact distance callable.

    Specs: "tower" (the tower's own metric), {"name": "scale", "factor": q},
    {"name": "cube_gaps"} (pullback of cube gaps along signed-square labels),
    {"name": "exp_gaps", "base": b} (pullback of b**x gaps on integer labels).
    """
    if spec == "tower" or spec == {"name": "tower"} or spec is None:
        return tower.dist
    if callable(spec):
        return spec
    name = spec["name"]
    if name == "scale":
        factor = as_q(spec["factor"])
        if factor <= 0:
            raise InputError("scale factor must be positive")
        base = tower.dist
        return lambda x, y: as_q(factor * base(x, y))
    if name == "cube_gaps":
        return lambda x, y: abs(cube_gap_value(_signed_index(x)) - cube_gap_value(_signed_index(y)))
    if name == "exp_gaps":
        b = as_q(spec.get("base", 2))

        def power(x):
            return b**x if x >= 0 else Fraction(1, int(b**-x))

        return lambda x, y: as_q(abs(power(x) - power(y)))
    raise InputError(f"unknown metric spec {spec!r}")
