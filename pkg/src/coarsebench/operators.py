"""Band operators on truncations, support masks, and ghost diagnostics.

Operators are finitely supported matrices between level point sets with
exact complex-rational entries; in doubled contexts the source is copy 0 and
the target copy 1.  A support mask is the boolean relation of index pairs an
operator of a given propagation bound may occupy.  Mask equality is this
package's notion of bimodule-class equality: distinct masks mean distinct
classes, and at finite scale the operators supported on a mask are exactly
the class they represent, so class comparisons reduce to exact relational
algebra.

Orientation convention, owned here and nowhere else: masks and entry keys
are (source point, target point) pairs, and relational composition reads
left to right, matching concatenation of doubles.  The matrix product
`compose(S, T)` applies T first, so its support is the relational composite
of T's mask with S's mask; :func:`operator_support` documents the flip.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .doubles import DoubleMetric
from .exact import CX_ONE, Cx, Q, as_q, q_str
from .spaces import InputError, MetricTower, json_point, point_sort_key


def _entry_sort_key(item):
    (x, y), _ = item
    return (point_sort_key(x), point_sort_key(y))


@dataclass(frozen=True)
class BandOperator:
    """Finitely supported exact matrix from a source level to a target level."""

    source: tuple
    target: tuple
    entries: tuple  # ((x, y), Cx) pairs, sorted, zero entries dropped

    @staticmethod
    def build(source: Sequence, target: Sequence, entries) -> "BandOperator":
        source = tuple(source)
        target = tuple(target)
        src, tgt = set(source), set(target)
        cleaned = {}
        items = entries.items() if hasattr(entries, "items") else entries
        for (x, y), value in items:
            if x not in src:
                raise InputError(f"entry source {x!r} not at the level")
            if y not in tgt:
                raise InputError(f"entry target {y!r} not at the level")
            value = Cx.of(value)
            if not value.is_zero():
                cleaned[(x, y)] = value
        return BandOperator(source, target, tuple(sorted(cleaned.items(), key=_entry_sort_key)))

    @property
    def entry_map(self) -> dict:
        return dict(self.entries)

    @property
    def support(self) -> frozenset:
        return frozenset(k for k, _ in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def to_json(self):
        return {
            "source": [json_point(p) for p in self.source],
            "target": [json_point(p) for p in self.target],
            "entries": [
                [json_point(x), json_point(y), q_str(v.re), q_str(v.im)]
                for (x, y), v in self.entries
            ],
        }


def elementary(source: Sequence, target: Sequence, x, y) -> BandOperator:
    """The single-entry operator sending the basis vector at x to the one at y."""
    return BandOperator.build(source, target, {(x, y): CX_ONE})


def identity_operator(points: Sequence) -> BandOperator:
    return BandOperator.build(points, points, {(p, p): CX_ONE for p in points})


def adjoint(T: BandOperator) -> BandOperator:
    return BandOperator.build(
        T.target, T.source, {(y, x): v.conj() for (x, y), v in T.entries}
    )


def compose(S: BandOperator, T: BandOperator) -> BandOperator:
    """Operator product S.T (T acts first): entry (x, y) = sum_z T(x,z) S(z,y)."""
    if T.target != S.source:
        raise InputError("compose: T's target level must equal S's source level")
    by_source: dict = {}
    for (z, y), v in S.entries:
        by_source.setdefault(z, []).append((y, v))
    acc: dict = {}
    for (x, z), t in T.entries:
        for y, s in by_source.get(z, ()):
            key = (x, y)
            prod = t * s
            acc[key] = acc[key] + prod if key in acc else prod
    return BandOperator.build(T.source, S.target, acc)


def inner_right(T: BandOperator, S: BandOperator) -> BandOperator:
    """Source-side inner product T*S; lands in operators on the source level."""
    return compose(adjoint(T), S)


def inner_left(T: BandOperator, S: BandOperator) -> BandOperator:
    """Target-side inner product T S*; lands in operators on the target level."""
    return compose(T, adjoint(S))


def propagation(T: BandOperator, dist: Callable[[object, object], Q]) -> Q:
    """Largest distance across the support, 0 for the zero operator."""
    return max((as_q(dist(x, y)) for (x, y), _ in T.entries), default=0)


def row_sum_bound(T: BandOperator) -> Q:
    """Max row sum of exact entry moduli: a bound for the operator norm."""
    rows: dict = {}
    for (x, _y), v in T.entries:
        rows[x] = rows.get(x, 0) + v.abs_exact()
    return as_q(max(rows.values(), default=0))


def col_sum_bound(T: BandOperator) -> Q:
    cols: dict = {}
    for (_x, y), v in T.entries:
        cols[y] = cols.get(y, 0) + v.abs_exact()
    return as_q(max(cols.values(), default=0))


def pair_sum_operator(source: Sequence, target: Sequence, pairs: Sequence) -> BandOperator:
    """Entries 1 exactly at the listed pairs; a finite partial isometry.

    Repeating a source or target point would break the partial-isometry
    discipline the witness construction relies on, so it is an error.
    """
    xs = [x for x, _ in pairs]
    ys = [y for _, y in pairs]
    if len(set(xs)) != len(xs):
        raise InputError("pair sum: repeated source point")
    if len(set(ys)) != len(ys):
        raise InputError("pair sum: repeated target point")
    return BandOperator.build(source, target, {(x, y): CX_ONE for x, y in pairs})


# ---------------------------------------------------------------------------
# support masks

@dataclass(frozen=True)
class SupportMask:
    """Pairs (source point, target point) an operator may occupy."""

    source: tuple
    target: tuple
    pairs: frozenset
    bound: Optional[Q] = None  # the propagation cut for metric-derived masks

    @staticmethod
    def build(source: Sequence, target: Sequence, pairs, bound=None) -> "SupportMask":
        source, target = tuple(source), tuple(target)
        src, tgt = set(source), set(target)
        pairs = frozenset(pairs)
        for x, y in pairs:
            if x not in src or y not in tgt:
                raise InputError(f"mask pair ({x!r},{y!r}) leaves the levels")
        return SupportMask(source, target, pairs, None if bound is None else as_q(bound))

    def sorted_pairs(self) -> list:
        return sorted(self.pairs, key=lambda xy: (point_sort_key(xy[0]), point_sort_key(xy[1])))

    def is_full(self) -> bool:
        return len(self.pairs) == len(self.source) * len(self.target)

    def to_json(self):
        return {
            "source": [json_point(p) for p in self.source],
            "target": [json_point(p) for p in self.target],
            "bound": None if self.bound is None else q_str(self.bound),
            "pairs": [[json_point(x), json_point(y)] for x, y in self.sorted_pairs()],
        }

    def to_pbm(self) -> str:
        """PBM P1 grid, rows = source points, columns = target points."""
        lines = ["P1", f"{len(self.target)} {len(self.source)}"]
        tset = self.pairs
        for x in self.source:
            lines.append(" ".join("1" if (x, y) in tset else "0" for y in self.target))
        return "\n".join(lines) + "\n"


def metric_mask(dm: DoubleMetric, L: Q, level: int = -1) -> SupportMask:
    """All copy-0 to copy-1 pairs with cross distance at most L."""
    L = as_q(L)
    pts = dm.base.points(level)
    table = dm.cross(level)
    pairs = {
        (pts[i], pts[j])
        for i in range(len(pts))
        for j in range(len(pts))
        if table[i][j] <= L
    }
    return SupportMask.build(pts, pts, pairs, bound=L)


def base_mask(tower: MetricTower, L: Q, level: int = -1) -> SupportMask:
    """Single-copy band mask: pairs within base distance L."""
    L = as_q(L)
    pts = tower.points(level)
    D = tower.dense(level)
    pairs = {
        (pts[i], pts[j])
        for i in range(len(pts))
        for j in range(len(pts))
        if D[i][j] <= L
    }
    return SupportMask.build(pts, pts, pairs, bound=L)


def mask_compose(m1: SupportMask, m2: SupportMask) -> SupportMask:
    """Relational composite, left to right: pairs (x, y) with some z bridging."""
    if m1.target != m2.source:
        raise InputError("mask compose: middle levels differ")
    by_left: dict = {}
    for z, y in m2.pairs:
        by_left.setdefault(z, []).append(y)
    pairs = {(x, y) for x, z in m1.pairs for y in by_left.get(z, ())}
    return SupportMask.build(m1.source, m2.target, pairs)


def mask_transpose(m: SupportMask) -> SupportMask:
    return SupportMask.build(m.target, m.source, {(y, x) for x, y in m.pairs}, bound=m.bound)


def mask_inclusion(m1: SupportMask, m2: SupportMask):
    """(included?, first counterexample pair or None), in point order."""
    if m1.source != m2.source or m1.target != m2.target:
        raise InputError("mask inclusion: levels differ")
    stray = m1.pairs - m2.pairs
    if not stray:
        return True, None
    first = min(stray, key=lambda xy: (point_sort_key(xy[0]), point_sort_key(xy[1])))
    return False, first


def operator_support(T: BandOperator, flip_to_mask_order: bool = False) -> SupportMask:
    """Support of an operator as a mask.

    Entry keys already use (source, target) order, the mask order; the flag
    exists only to document that operator products reverse relative to mask
    composition: support(compose(S, T)) is contained in
    mask_compose(support(T), support(S)).
    """
    del flip_to_mask_order
    return SupportMask.build(T.source, T.target, T.support)


def mask_contains_operator(mask: SupportMask, T: BandOperator) -> bool:
    """Membership of an operator in a mask class: every entry pair allowed."""
    return T.support <= mask.pairs


# ---------------------------------------------------------------------------
# ghost diagnostics

def ghost_profile(T: BandOperator, dist: Callable[[object, object], Q], basepoint, radii: Sequence[Q]) -> dict:
    """Per radius R: the largest entry modulus with either index outside the
    closed R-ball around the basepoint.  Nonincreasing in R; reaches 0 once
    the ball swallows the support.  A profile that stays near 0 while norm
    bounds stay large is ghost evidence; finite data cannot decide whether
    the ghost ideal exceeds the compacts, so this is a diagnostic only.
    """
    out = {}
    for radius in sorted(as_q(r) for r in radii):
        best = 0
        for (x, y), v in T.entries:
            if dist(basepoint, x) > radius or dist(basepoint, y) > radius:
                mag = v.abs_exact()
                if mag > best:
                    best = mag
        out[radius] = as_q(best)
    return out


def block_average_operator(points: Sequence, block: Sequence) -> BandOperator:
    """Entries 1/k on a k-point block: norm 1, entrywise small for large k."""
    block = list(block)
    k = len(block)
    if k == 0:
        raise InputError("empty block")
    w = Fraction(1, k)
    return BandOperator.build(points, points, {(x, y): Cx(w, Fraction(0)) for x in block for y in block})


# ---------------------------------------------------------------------------
# the concatenation homomorphism at mask level

def concat_mask_cover(d1: DoubleMetric, d2: DoubleMetric, L: Q, level: int = -1):
    """Check that the mask of the concatenation at L is covered by composites.

    For each pair in the concatenation's mask a minimizing middle point
    gives the split L = L1 + (L - L1); the pair must then actually appear in
    mask_compose(metric_mask(d1, L1), metric_mask(d2, L - L1)).  Meaningful
    on full finite levels, where the minimum is attained inside the level.
    Returns (ok, first counterexample or None).
    """
    from .doubles import minplus_argmin

    L = as_q(L)
    pts = d1.base.points(level)
    c1, c2 = d1.cross(level), d2.cross(level)
    vals, args = minplus_argmin(c1, c2)
    composed_cache: dict = {}
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            if vals[i][j] > L:
                continue
            z = args[i][j]
            l1 = as_q(c1[i][z])
            if l1 not in composed_cache:
                composed_cache[l1] = mask_compose(
                    metric_mask(d1, l1, level), metric_mask(d2, L - l1, level)
                )
            if (x, y) not in composed_cache[l1].pairs:
                return False, (x, y)
    return True, None
