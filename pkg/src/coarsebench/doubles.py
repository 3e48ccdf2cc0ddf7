"""Metrics on two labeled copies of a space, and their concatenation semigroup.

A two-copy metric is stored as the base tower plus the cross-distance
function c(x, y) between copy 0 and copy 1; the four exact inequalities
checked by :func:`validate_double` are equivalent to the whole thing being a
metric on the doubled point set that restricts to the base metric on each
copy and keeps the copies strictly apart.

Concatenation is the min-plus product of cross tables through a shared
middle copy.  The copy swap :func:`flip` is adopted as the inverse
operation of this semigroup (regularity probes exercise that choice), and
equality of semigroup elements is always a coarse-comparison verdict, never
raw pointwise equality alone.

Most constructors go through one normal form: a finite list of *portals*
(a, b, t) meaning "crossing from a in copy 0 to b in copy 1 costs t", with
c(x, y) = min over portals of d(x, a) + t + d(b, y).  Portal families whose
endpoint patterns distort distances by at most the crossing costs are always
valid, which gives exact constructors for units, zeros, nested-family
idempotents, translations, and seeded random doubles.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Optional, Sequence

import numpy as np

from .compare import ComparisonConfig, CoarseVerdict, WitnessPair, compare_leveled
from .exact import Q, as_q
from .spaces import InputError, MetricTower, ValidationReport, Violation, int_matrix, point_sort_key

_INT64_GUARD = 2**61


# ---------------------------------------------------------------------------
# exact min-plus kernels

def minplus(A: Sequence[Sequence[Q]], B: Sequence[Sequence[Q]]) -> list[list[Q]]:
    """C[i][j] = min_k A[i][k] + B[k][j], exactly."""
    Ai, Bi = int_matrix(A), int_matrix(B)
    if Ai is not None and Bi is not None:
        out = np.empty((Ai.shape[0], Bi.shape[1]), dtype=np.int64)
        for i in range(Ai.shape[0]):
            out[i] = (Ai[i][:, None] + Bi).min(axis=0)
        return [[int(v) for v in row] for row in out]
    k = len(B)
    cols = len(B[0])
    out_rows = []
    for row_a in A:
        row = []
        for j in range(cols):
            row.append(min(row_a[z] + B[z][j] for z in range(k)))
        out_rows.append(row)
    return out_rows


def minplus_argmin(A, B) -> tuple[list[list[Q]], list[list[int]]]:
    """Min-plus product plus, per entry, the first index attaining the minimum."""
    Ai, Bi = int_matrix(A), int_matrix(B)
    if Ai is not None and Bi is not None:
        vals = np.empty((Ai.shape[0], Bi.shape[1]), dtype=np.int64)
        args = np.empty_like(vals)
        for i in range(Ai.shape[0]):
            block = Ai[i][:, None] + Bi
            args[i] = block.argmin(axis=0)
            vals[i] = block.min(axis=0)
        return [[int(v) for v in row] for row in vals], [[int(v) for v in row] for row in args]
    k = len(B)
    cols = len(B[0])
    vals_rows, args_rows = [], []
    for row_a in A:
        vr, ar = [], []
        for j in range(cols):
            best, arg = None, -1
            for z in range(k):
                v = row_a[z] + B[z][j]
                if best is None or v < best:
                    best, arg = v, z
            vr.append(best)
            ar.append(arg)
        vals_rows.append(vr)
        args_rows.append(ar)
    return vals_rows, args_rows


def _restricted_min(A, B, rows_keep):
    """Min-plus restricted to middle indices in `rows_keep` (None where empty)."""
    if not rows_keep:
        return None
    A_sub = [[row[z] for z in rows_keep] for row in A]
    B_sub = [B[z] for z in rows_keep]
    return minplus(A_sub, B_sub)


# ---------------------------------------------------------------------------
# the double metric value

class DoubleMetric:
    """Base tower + exact cross-distance tables, one per truncation level.

    Portal-backed doubles evaluate the same portal list at every level, so
    their cross values agree across levels.  Table-backed doubles (concat
    outputs, explicit matrices) carry one table per level; each level is a
    valid double on its own, but values for a shared pair may differ between
    levels because deeper levels see more candidate through-points.
    """

    def __init__(self, base: MetricTower, label: str, portals=None, tables=None, boundary_flags=None):
        if (portals is None) == (tables is None):
            raise InputError("exactly one of portals/tables must be given")
        self.base = base
        self.label = label
        self.portals = None if portals is None else tuple((a, b, as_q(t)) for a, b, t in portals)
        self._tables: dict[int, list[list[Q]]] = {} if tables is None else dict(tables)
        self.boundary_flags: dict[int, frozenset] = dict(boundary_flags or {})
        if self.portals is not None:
            universe = set(base.points(-1))
            for a, b, t in self.portals:
                if a not in universe or b not in universe:
                    raise InputError(f"portal endpoint {a!r}/{b!r} outside the tower")
                if t <= 0:
                    raise InputError("portal cost must be positive (copies must stay apart)")

    # -- evaluation ---------------------------------------------------------

    def cross(self, level: int = -1) -> list[list[Q]]:
        key = level % self.base.num_levels
        if key not in self._tables:
            if self.portals is None:
                raise InputError(f"no cross table materialized for level {key}")
            pts = self.base.points(key)
            d = self.base.dist
            left = [[d(x, a) + t for (a, _b, t) in self.portals] for x in pts]
            right = [[d(b, y) for y in pts] for (_a, b, _t) in self.portals]
            self._tables[key] = minplus(left, right)
        return self._tables[key]

    def cross_value(self, level: int, x, y) -> Q:
        idx = self.base.index_at(level)
        return self.cross(level)[idx[x]][idx[y]]

    def separation(self, level: int = -1) -> Q:
        return min(min(row) for row in self.cross(level))

    def leveled_points(self) -> tuple:
        """Doubled point sets per level: (p, 0) for copy 0, (p, 1) for copy 1."""
        out = []
        for pts in self.base.levels:
            doubled = [(p, 0) for p in pts] + [(p, 1) for p in pts]
            out.append(tuple(sorted(doubled, key=point_sort_key)))
        return tuple(out)

    def leveled_dist(self):
        base_dist = self.base.dist

        def dist(level, p, q):
            (x, cx), (y, cy) = p, q
            if cx == cy:
                return base_dist(x, y)
            if cx == 0:
                return self.cross_value(level, x, y)
            return self.cross_value(level, y, x)

        return dist

    def __repr__(self):
        return f"DoubleMetric({self.label})"


# ---------------------------------------------------------------------------
# validation

def validate_double(dm: DoubleMetric, levels: Optional[Sequence[int]] = None, max_violations: int = 20) -> ValidationReport:
    """Exact check of the four cross inequalities at the given levels.

    Together with the base metric's own axioms these are equivalent to the
    doubled space being a metric space restricting to the base on each copy;
    a zero cross value is reported as the copies touching.
    """
    violations: list[Violation] = []

    def add(axiom, points, detail):
        if len(violations) < max_violations:
            violations.append(Violation(axiom, points, detail))

    level_list = range(dm.base.num_levels) if levels is None else levels
    for level in level_list:
        pts = dm.base.points(level)
        n = len(pts)
        C = dm.cross(level)
        D = dm.base.dense(level)
        Ci, Di = int_matrix(C), int_matrix(D)
        if Ci is not None and Di is not None:
            if (Ci <= 0).any():
                for i, j in np.argwhere(Ci <= 0)[:max_violations]:
                    add("separation", (pts[i], pts[j]), f"copies touch: c = {C[i][j]} at level {level}")
                continue
            for j in range(n):
                col = Ci[:, j : j + 1]
                bad = np.argwhere(np.abs(col - col.T) > Di)
                for i, k in bad[:1]:
                    add("lipschitz_left", (pts[i], pts[k], pts[j]),
                        f"|c({pts[i]!r},{pts[j]!r}) - c({pts[k]!r},{pts[j]!r})| > d at level {level}")
                bad = np.argwhere(col + col.T < Di)
                for i, k in bad[:1]:
                    add("spread_left", (pts[i], pts[k], pts[j]),
                        f"c({pts[i]!r},{pts[j]!r}) + c({pts[k]!r},{pts[j]!r}) < d({pts[i]!r},{pts[k]!r}) at level {level}")
            for i in range(n):
                row = Ci[i : i + 1, :]
                bad = np.argwhere(np.abs(row - row.T) > Di)
                for j, k in bad[:1]:
                    add("lipschitz_right", (pts[i], pts[j], pts[k]),
                        f"|c({pts[i]!r},{pts[j]!r}) - c({pts[i]!r},{pts[k]!r})| > d at level {level}")
                bad = np.argwhere(row + row.T < Di)
                for j, k in bad[:1]:
                    add("spread_right", (pts[i], pts[j], pts[k]),
                        f"c({pts[i]!r},{pts[j]!r}) + c({pts[i]!r},{pts[k]!r}) < d({pts[j]!r},{pts[k]!r}) at level {level}")
        else:
            for i in range(n):
                for j in range(n):
                    if C[i][j] <= 0:
                        add("separation", (pts[i], pts[j]), f"copies touch: c = {C[i][j]} at level {level}")
            if violations:
                continue
            for j in range(n):
                for i in range(n):
                    cij = C[i][j]
                    for k in range(n):
                        if abs(cij - C[k][j]) > D[i][k]:
                            add("lipschitz_left", (pts[i], pts[k], pts[j]), f"level {level}")
                        if cij + C[k][j] < D[i][k]:
                            add("spread_left", (pts[i], pts[k], pts[j]), f"level {level}")
            for i in range(n):
                for j in range(n):
                    cij = C[i][j]
                    for k in range(n):
                        if abs(cij - C[i][k]) > D[j][k]:
                            add("lipschitz_right", (pts[i], pts[j], pts[k]), f"level {level}")
                        if cij + C[i][k] < D[j][k]:
                            add("spread_right", (pts[i], pts[j], pts[k]), f"level {level}")
    return ValidationReport(ok=not violations, violations=tuple(violations))


# ---------------------------------------------------------------------------
# nested families and the standard constructors

@dataclass(frozen=True)
class NestedFamily:
    """Increasing subsets A_1 <= A_2 <= ... of the tower's deepest level."""

    sets: tuple[frozenset, ...]

    @property
    def depth(self) -> int:
        return len(self.sets)

    @staticmethod
    def of(point_sets: Sequence) -> "NestedFamily":
        return NestedFamily(tuple(frozenset(s) for s in point_sets))


def validate_family(base: MetricTower, fam: NestedFamily, max_violations: int = 20) -> ValidationReport:
    """Check nesting and the 1-neighborhood growth condition on the top level."""
    violations = []
    top = base.points(-1)
    universe = set(top)
    d = base.dist
    for n, a_n in enumerate(fam.sets):
        stray = a_n - universe
        if stray:
            violations.append(Violation("membership", tuple(sorted(stray, key=point_sort_key))[:3], f"set {n + 1} leaves the tower"))
    for n in range(fam.depth - 1):
        a_n, a_next = fam.sets[n], fam.sets[n + 1]
        if not a_n <= a_next:
            p = sorted(a_n - a_next, key=point_sort_key)[0]
            violations.append(Violation("nesting", (p,), f"set {n + 1} not contained in set {n + 2}"))
            continue
        for x in top:
            if x in a_next:
                continue
            if any(d(x, z) <= 1 for z in a_n):
                violations.append(
                    Violation("one_neighborhood", (x,), f"1-neighborhood of set {n + 1} leaves set {n + 2}")
                )
                break
        if len(violations) >= max_violations:
            break
    return ValidationReport(ok=not violations, violations=tuple(violations))


def idempotent_from_family(base: MetricTower, fam: NestedFamily, require_growth: bool = True) -> DoubleMetric:
    """Cross(x, y) = min over n and z in A_n of d(x, z) + n + d(z, y).

    Because the sets increase, the double minimum collapses to portals
    (z, z, first n containing z); the growth condition (each set's
    1-neighborhood inside the next) is what makes the result idempotent up
    to coarse equivalence, and is enforced unless `require_growth` is off.
    """
    report = validate_family(base, fam)
    growth_only = all(v.axiom == "one_neighborhood" for v in report.violations)
    if not report.ok and (require_growth or not growth_only):
        first = report.violations[0]
        raise InputError(f"invalid nested family ({first.axiom}): {first.detail}")
    first_n: dict[object, int] = {}
    for n, a_n in enumerate(fam.sets, start=1):
        for z in a_n:
            first_n.setdefault(z, n)
    if not first_n:
        raise InputError("family has no points; the cross distance would be infinite")
    portals = tuple((z, z, n) for z, n in sorted(first_n.items(), key=lambda kv: point_sort_key(kv[0])))
    return DoubleMetric(base, f"family[{fam.depth}]", portals=portals)


def unit_double(base: MetricTower) -> DoubleMetric:
    """Cross = base distance + 1; acts as a two-sided unit up to an exact +1."""
    return DoubleMetric(base, "unit", portals=tuple((p, p, 1) for p in base.points(-1)))


def zero_double(base: MetricTower, basepoint=None) -> DoubleMetric:
    """Every crossing funnels through one bounded point: the zero class.

    Equals the family formula on the constant singleton family; that family
    fails the 1-neighborhood growth condition, which is irrelevant here
    because any bounded family lands in the same coarse class.
    """
    if basepoint is None:
        basepoint = base.points(0)[0]
    if basepoint not in set(base.points(-1)):
        raise InputError(f"basepoint {basepoint!r} not in the tower")
    return DoubleMetric(base, f"zero[{basepoint!r}]", portals=((basepoint, basepoint, 1),))


def standard_double(base: MetricTower, kind: str, basepoint=None, family: Optional[NestedFamily] = None) -> DoubleMetric:
    if kind == "unit":
        return unit_double(base)
    if kind == "zero":
        return zero_double(base, basepoint)
    if kind == "family":
        if family is None:
            raise InputError("kind 'family' needs a NestedFamily")
        return idempotent_from_family(base, family)
    raise InputError(f"unknown standard double kind {kind!r}")


def portal_double(base: MetricTower, portals: Sequence, label: str, check: bool = True) -> DoubleMetric:
    """General portal constructor with the exact pairwise compatibility check."""
    portals = tuple((a, b, as_q(t)) for a, b, t in portals)
    if check:
        d = base.dist
        for i, (a1, b1, t1) in enumerate(portals):
            for a2, b2, t2 in portals[i + 1 :]:
                if abs(d(a1, a2) - d(b1, b2)) > t1 + t2:
                    raise InputError(
                        f"portals ({a1!r}->{b1!r}) and ({a2!r}->{b2!r}) distort by more than {t1}+{t2}"
                    )
    return DoubleMetric(base, label, portals=portals)


def translation_double(base: MetricTower, shift, weight: Q = 1, label: Optional[str] = None) -> DoubleMetric:
    universe = set(base.points(-1))
    portals = [(p, p + shift, weight) for p in base.points(-1) if p + shift in universe]
    if not portals:
        raise InputError("shift leaves the tower for every point")
    return portal_double(base, portals, label or f"shift[{shift}]", check=False)


def matrix_double(base: MetricTower, rows: Sequence[Sequence[Q]], label: str = "matrix") -> DoubleMetric:
    """Explicit cross matrix on the deepest level, restricted to each level."""
    top = base.points(-1)
    n = len(top)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InputError("cross matrix shape must match the deepest level")
    rows = [[as_q(v) for v in r] for r in rows]
    top_index = {p: i for i, p in enumerate(top)}
    tables = {}
    for lvl in range(base.num_levels):
        pts = base.points(lvl)
        sel = [top_index[p] for p in pts]
        tables[lvl] = [[rows[i][j] for j in sel] for i in sel]
    return DoubleMetric(base, label, tables=tables)


def constant_double(base: MetricTower, value: Q = 1, label: Optional[str] = None) -> DoubleMetric:
    value = as_q(value)
    top = base.points(-1)
    return matrix_double(base, [[value] * len(top) for _ in top], label or f"const[{value}]")


def random_portal_double(base: MetricTower, rng: Random, label: str) -> DoubleMetric:
    """Seeded valid double: portals along one random isometry of the line.

    Only meaningful for towers with integer point labels; portals share one
    sign and shift so endpoint patterns are distance-preserving and any
    positive crossing costs are compatible.
    """
    pts = base.points(-1)
    universe = set(pts)
    sign = rng.choice((1, -1))
    span = max(pts) - min(pts)
    shift = rng.randrange(-span // 4, span // 4 + 1)
    domain = [p for p in pts if sign * p + shift in universe]
    if not domain:
        return unit_double(base)
    size = max(1, min(len(domain), rng.randrange(1, len(domain) + 1)))
    chosen = sorted(rng.sample(domain, size))
    portals = [(a, sign * a + shift, rng.randrange(1, 7)) for a in chosen]
    return portal_double(base, portals, label, check=False)


# ---------------------------------------------------------------------------
# the semigroup operations

def _require_same_base(d1: DoubleMetric, d2: DoubleMetric):
    if d1.base is not d2.base:
        raise InputError("doubles must share one base tower")


def concat(d1: DoubleMetric, d2: DoubleMetric, buffer: int = 1, validate: bool = True) -> DoubleMetric:
    """Min-plus concatenation through the shared middle copy.

    At each level the middle point ranges over a deeper evaluation level
    (`buffer` levels down, clamped at the top) so truncation bias shrinks;
    entries whose every minimizer sits in the evaluation level's outermost
    ring are recorded as boundary-limited in `boundary_flags`.
    """
    _require_same_base(d1, d2)
    base = d1.base
    tables = {}
    flags = {}
    for lvl in range(base.num_levels):
        ev = min(lvl + buffer, base.num_levels - 1)
        pts_ev = base.points(ev)
        A, B = d1.cross(ev), d2.cross(ev)
        full = minplus(A, B)
        if ev > 0:
            inner = set(base.points(ev - 1))
            keep = [k for k, p in enumerate(pts_ev) if p in inner]
        else:
            keep = list(range(len(pts_ev)))
        interior = _restricted_min(A, B, keep)
        idx_ev = base.index_at(ev)
        pts = base.points(lvl)
        sel = [idx_ev[p] for p in pts]
        tables[lvl] = [[full[i][j] for j in sel] for i in sel]
        if interior is None:
            flags[lvl] = frozenset((x, y) for x in pts for y in pts)
        else:
            flags[lvl] = frozenset(
                (pts[a], pts[b])
                for a, i in enumerate(sel)
                for b, j in enumerate(sel)
                if interior[i][j] > full[i][j]
            )
    out = DoubleMetric(base, f"({d1.label}*{d2.label})", tables=tables, boundary_flags=flags)
    if validate:
        report = validate_double(out)
        if not report.ok:
            raise AssertionError(f"concatenation produced an invalid double: {report.violations[0]}")
    return out


def flip(d: DoubleMetric) -> DoubleMetric:
    """Swap the two copies: cross'(x, y) = cross(y, x).  An involution."""
    if d.portals is not None:
        return DoubleMetric(d.base, f"~{d.label}", portals=tuple((b, a, t) for a, b, t in d.portals))
    tables = {lvl: [list(col) for col in zip(*d.cross(lvl))] for lvl in range(d.base.num_levels)}
    flags = {lvl: frozenset((y, x) for x, y in fl) for lvl, fl in d.boundary_flags.items()}
    return DoubleMetric(d.base, f"~{d.label}", tables=tables, boundary_flags=flags)


def compare_doubles(d1: DoubleMetric, d2: DoubleMetric, config: ComparisonConfig = ComparisonConfig()) -> CoarseVerdict:
    """Coarse-comparison verdict between two doubles over the same base."""
    _require_same_base(d1, d2)
    return compare_leveled(d1.leveled_dist(), d2.leveled_dist(), d1.leveled_points(), config)


def witness_nonequivalence(d1: DoubleMetric, d2: DoubleMetric, C: Q, T: Q) -> Optional[tuple[WitnessPair, ...]]:
    """Hunt for pairs cheap in d1 (cross <= C) but strictly growing in d2 past T.

    Walks the levels from shallow to deep, picking per level the candidate
    with the largest d2 cross value (ties broken by point order) whenever it
    strictly exceeds everything chosen so far; absence of witnesses is a
    value (None), not an error.
    """
    _require_same_base(d1, d2)
    C, T = as_q(C), as_q(T)
    base = d1.base
    found: list[WitnessPair] = []
    prev = T
    for lvl in range(base.num_levels):
        pts = base.points(lvl)
        C1, C2 = d1.cross(lvl), d2.cross(lvl)
        M1, M2 = int_matrix(C1), int_matrix(C2)
        best, where = None, None
        if M1 is not None and M2 is not None and isinstance(C, int):
            masked = np.where(M1 <= C, M2, np.iinfo(np.int64).min)
            flat = int(masked.argmax())
            i, j = divmod(flat, masked.shape[1])
            if masked[i, j] != np.iinfo(np.int64).min:
                top = int(masked[i, j])
                hits = np.argwhere(masked == top)
                i, j = (int(hits[0][0]), int(hits[0][1]))
                best, where = top, (pts[i], pts[j])
        else:
            n = len(pts)
            for i in range(n):
                for j in range(n):
                    if C1[i][j] <= C and (best is None or C2[i][j] > best):
                        best, where = C2[i][j], (pts[i], pts[j])
        if best is not None and best > prev:
            x, y = where
            found.append(WitnessPair(x, y, d1.cross_value(lvl, x, y), d2.cross_value(lvl, x, y), lvl))
            prev = best
    return tuple(found) if found else None


# ---------------------------------------------------------------------------
# law probes

@dataclass(frozen=True)
class ProbeResult:
    law: str
    instance: str
    exact: Optional[bool] = None
    verdict: Optional[CoarseVerdict] = None
    detail: str = ""

    def to_json(self):
        return {
            "law": self.law,
            "instance": self.instance,
            "exact": self.exact,
            "verdict": None if self.verdict is None else self.verdict.to_json(),
            "detail": self.detail,
        }


def top_concat_rows(d1: DoubleMetric, d2: DoubleMetric) -> list[list[Q]]:
    """Concatenation evaluated purely on the deepest (full) level."""
    _require_same_base(d1, d2)
    return minplus(d1.cross(-1), d2.cross(-1))


def semigroup_probe(catalog: Sequence[DoubleMetric], law: str, config: ComparisonConfig = ComparisonConfig()) -> tuple[ProbeResult, ...]:
    """Exercise a semigroup law over a catalog of doubles sharing one base.

    associativity: exact table equality of both bracketings on the deepest
    level.  regularity: verdict for d * ~d * d against d.  idempotent
    commutation: verdict for a * b against b * a over unordered pairs.
    """
    for dm in catalog[1:]:
        _require_same_base(catalog[0], dm)
    results = []
    if law == "associativity":
        for a in catalog:
            for b in catalog:
                ab = top_concat_rows(a, b)
                for c in catalog:
                    left = minplus(ab, c.cross(-1))
                    right = minplus(a.cross(-1), top_concat_rows(b, c))
                    same = left == right
                    results.append(
                        ProbeResult(law, f"({a.label},{b.label},{c.label})", exact=same,
                                    detail="" if same else "bracketings differ on the deepest level")
                    )
    elif law == "regularity":
        for d in catalog:
            sts = concat(concat(d, flip(d), validate=False), d, validate=False)
            results.append(ProbeResult(law, d.label, verdict=compare_doubles(sts, d, config)))
    elif law == "idempotent_commutation":
        for i, a in enumerate(catalog):
            for b in catalog[i + 1 :]:
                verdict = compare_doubles(concat(a, b, validate=False), concat(b, a, validate=False), config)
                results.append(ProbeResult(law, f"({a.label},{b.label})", verdict=verdict))
    else:
        raise InputError(f"unknown law {law!r}")
    return tuple(results)
