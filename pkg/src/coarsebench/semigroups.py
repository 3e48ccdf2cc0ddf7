"""Partial bijections of {1..n}, multiplication-table axiom checkers, and
ideal products, all exact and exhaustive at desk scale.

Composition of partial bijections reads left to right (apply sigma, then
tau), the same orientation as mask composition in
:mod:`coarsebench.operators`; the graph correspondence
:func:`pb_support_correspondence` is then a semigroup homomorphism on the
nose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Optional, Sequence

from .operators import SupportMask, mask_compose
from .spaces import InputError


@dataclass(frozen=True)
class PartialBijection:
    """An injective partial map on {1..n}; the ground size is part of the value."""

    n: int
    pairs: tuple  # sorted (x, sigma(x)) with distinct x's and distinct images

    @staticmethod
    def of(n: int, mapping) -> "PartialBijection":
        items = sorted(mapping.items()) if hasattr(mapping, "items") else sorted(mapping)
        seen_x, seen_y = set(), set()
        for x, y in items:
            if not (1 <= x <= n and 1 <= y <= n):
                raise InputError(f"pair ({x},{y}) leaves the ground set of size {n}")
            if x in seen_x:
                raise InputError(f"domain point {x} repeated")
            if y in seen_y:
                raise InputError(f"image point {y} repeated; not injective")
            seen_x.add(x)
            seen_y.add(y)
        return PartialBijection(n, tuple(items))

    @property
    def mapping(self) -> dict:
        return dict(self.pairs)

    @property
    def domain(self) -> frozenset:
        return frozenset(x for x, _ in self.pairs)

    @property
    def image(self) -> frozenset:
        return frozenset(y for _, y in self.pairs)

    def is_idempotent(self) -> bool:
        return all(x == y for x, y in self.pairs)

    def to_json(self):
        return {"n": self.n, "pairs": [list(p) for p in self.pairs]}


def pb_identity(n: int, domain: Optional[Sequence[int]] = None) -> PartialBijection:
    pts = range(1, n + 1) if domain is None else domain
    return PartialBijection.of(n, {x: x for x in pts})


def pb_empty(n: int) -> PartialBijection:
    return PartialBijection.of(n, {})


def pb_compose(sigma: PartialBijection, tau: PartialBijection) -> PartialBijection:
    """sigma then tau, on the largest domain where both apply."""
    if sigma.n != tau.n:
        raise InputError("ground sizes differ")
    t = tau.mapping
    return PartialBijection.of(
        sigma.n, {x: t[y] for x, y in sigma.pairs if y in t}
    )


def pb_inverse(sigma: PartialBijection) -> PartialBijection:
    return PartialBijection.of(sigma.n, {y: x for x, y in sigma.pairs})


def pb_enumerate(n: int, max_n: int = 5) -> list[PartialBijection]:
    """Every partial bijection of {1..n}; count is sum over k of C(n,k)^2 k!."""
    if n > max_n:
        raise InputError(f"n = {n} above the enumeration bound {max_n}")
    ground = range(1, n + 1)
    out = []
    for k in range(n + 1):
        for dom in combinations(ground, k):
            for img in combinations(ground, k):
                for perm in permutations(img):
                    out.append(PartialBijection.of(n, dict(zip(dom, perm))))
    return out


def pb_count(n: int) -> int:
    return sum(math.comb(n, k) ** 2 * math.factorial(k) for k in range(n + 1))


def natural_partial_order(sigma: PartialBijection, tau: PartialBijection) -> bool:
    """sigma <= tau in the natural order; for partial bijections this is the
    restriction order (graph containment), which the table-level idempotent
    characterization reproduces."""
    if sigma.n != tau.n:
        raise InputError("ground sizes differ")
    return set(sigma.pairs) <= set(tau.pairs)


def pb_support_correspondence(sigma: PartialBijection) -> SupportMask:
    """The graph of sigma as a support mask on the ground set."""
    pts = tuple(range(1, sigma.n + 1))
    return SupportMask.build(pts, pts, set(sigma.pairs))


def pb_from_mask(mask: SupportMask) -> PartialBijection:
    """Inverse of the graph correspondence; fails on non-functional masks."""
    n = len(mask.source)
    return PartialBijection.of(n, {x: y for x, y in mask.pairs})


# ---------------------------------------------------------------------------
# multiplication tables

@dataclass(frozen=True)
class MulTable:
    """A finite total binary operation, checked exhaustively."""

    elements: tuple
    table: tuple  # table[i][j] = index of elements[i] * elements[j]

    @staticmethod
    def from_operation(elements: Sequence, op) -> "MulTable":
        elements = tuple(elements)
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise InputError("duplicate elements")
        rows = []
        for a in elements:
            row = []
            for b in elements:
                c = op(a, b)
                if c not in index:
                    raise InputError(f"not closed: {a!r} * {b!r} escapes the element list")
                row.append(index[c])
            rows.append(tuple(row))
        return MulTable(elements, tuple(rows))

    @staticmethod
    def from_rows(elements: Sequence, rows: Sequence[Sequence[int]]) -> "MulTable":
        elements = tuple(elements)
        n = len(elements)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise InputError("table shape must be square over the element list")
        for r in rows:
            for v in r:
                if not (0 <= v < n):
                    raise InputError("table entries must be element indices")
        return MulTable(elements, tuple(tuple(r) for r in rows))

    def associativity_witness(self):
        """First (i, j, k) with (ij)k != i(jk), or None.  Exhaustive O(n^3)."""
        t = self.table
        n = len(t)
        for i in range(n):
            row_i = t[i]
            for j in range(n):
                row_ij = t[row_i[j]]
                row_j = t[j]
                for k in range(n):
                    if row_ij[k] != row_i[row_j[k]]:
                        return (i, j, k)
        return None

    def idempotent_indices(self) -> list[int]:
        return [i for i in range(len(self.table)) if self.table[i][i] == i]

    def to_json(self):
        return {"elements": [repr(e) for e in self.elements], "table": [list(r) for r in self.table]}


def _ensure_associative(table: MulTable):
    witness = table.associativity_witness()
    if witness is not None:
        i, j, k = witness
        raise InputError(
            f"table not associative at ({table.elements[i]!r},{table.elements[j]!r},{table.elements[k]!r})"
        )


def check_regular(table: MulTable) -> bool:
    """Every element s has t with sts = s and tst = t."""
    _ensure_associative(table)
    t = table.table
    n = len(t)
    for s in range(n):
        if not any(t[t[s][u]][s] == s and t[t[u][s]][u] == u for u in range(n)):
            return False
    return True


def check_inverse(table: MulTable):
    """(is inverse semigroup?, first violating idempotent pair or None).

    Inverse = regular and all idempotents commute; a non-regular table
    returns (False, None).
    """
    if not check_regular(table):
        return False, None
    t = table.table
    idem = table.idempotent_indices()
    for a in idem:
        for b in idem:
            if t[a][b] != t[b][a]:
                return False, (table.elements[a], table.elements[b])
    return True, None


def table_natural_partial_order(table: MulTable, i: int, j: int, assume_inverse: bool = False) -> bool:
    """i <= j iff i = j * e for some idempotent e; requires an inverse table.

    Pass assume_inverse=True to skip revalidation when querying many pairs
    of a table already checked once.
    """
    if not assume_inverse:
        ok, _ = check_inverse(table)
        if not ok:
            raise InputError("natural partial order needs an inverse semigroup")
    t = table.table
    return any(t[j][e] == i for e in table.idempotent_indices())


# ---------------------------------------------------------------------------
# ideal products

def _diagonal_mask(subset: frozenset, n: int) -> SupportMask:
    pts = tuple(range(1, n + 1))
    return SupportMask.build(pts, pts, {(i, i) for i in subset})


def ideal_product(P, Q, n: int) -> frozenset:
    """Product of the ideals supported on P and Q inside an n-point space.

    The result is the intersection; the matrix-level route (composing the
    diagonal support masks) is recomputed every time and must agree, so the
    two derivations check each other.
    """
    P, Q = frozenset(P), frozenset(Q)
    ground = set(range(1, n + 1))
    if not (P <= ground and Q <= ground):
        raise InputError("subsets must live in {1..n}")
    expected = P & Q
    mask = mask_compose(_diagonal_mask(P, n), _diagonal_mask(Q, n))
    if mask.pairs != {(i, i) for i in expected}:
        raise AssertionError("mask-level ideal product disagrees with the intersection")
    return expected
