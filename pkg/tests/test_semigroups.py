"""Partial bijections, table checkers, ideal products: exhaustive at small n."""

import math
from itertools import chain, combinations

import pytest
from hypothesis import given, settings, strategies as st

from coarsebench import (
    InputError,
    MulTable,
    PartialBijection,
    check_inverse,
    check_regular,
    ideal_product,
    mask_compose,
    mask_transpose,
    natural_partial_order,
    pb_compose,
    pb_count,
    pb_empty,
    pb_enumerate,
    pb_from_mask,
    pb_identity,
    pb_inverse,
    pb_support_correspondence,
    table_natural_partial_order,
)


@st.composite
def partial_bijections(draw, n=4):
    k = draw(st.integers(min_value=0, max_value=n))
    dom = draw(st.permutations(range(1, n + 1)))[:k]
    img = draw(st.permutations(range(1, n + 1)))[:k]
    return PartialBijection.of(n, dict(zip(dom, img)))


def subsets(iterable):
    items = list(iterable)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


# -- basic algebra -------------------------------------------------------------

def test_counts_against_formula():
    for n in (0, 1, 2, 3, 4):
        count = len(pb_enumerate(n))
        assert count == pb_count(n) == sum(math.comb(n, k) ** 2 * math.factorial(k) for k in range(n + 1))
    assert pb_count(2) == 7 and pb_count(3) == 34 and pb_count(4) == 209


def test_enumeration_bound():
    with pytest.raises(InputError):
        pb_enumerate(6)


def test_injectivity_enforced():
    with pytest.raises(InputError):
        PartialBijection.of(3, {1: 2, 3: 2})


@given(partial_bijections())
@settings(max_examples=80, deadline=None)
def test_pseudo_inverse_laws(sigma):
    inv = pb_inverse(sigma)
    assert pb_compose(pb_compose(sigma, inv), sigma) == sigma
    assert pb_compose(pb_compose(inv, sigma), inv) == inv


def test_sts_exhaustive_small_n():
    for n in (2, 3):
        for sigma in pb_enumerate(n):
            inv = pb_inverse(sigma)
            assert pb_compose(pb_compose(sigma, inv), sigma) == sigma


def test_identity_and_zero():
    n = 4
    ident = pb_identity(n)
    zero = pb_empty(n)
    for sigma in pb_enumerate(n):
        assert pb_compose(ident, sigma) == sigma == pb_compose(sigma, ident)
        assert pb_compose(zero, sigma) == zero == pb_compose(sigma, zero)


def test_idempotents_are_subset_identities():
    for n in (2, 3):
        idem = [s for s in pb_enumerate(n) if pb_compose(s, s) == s]
        assert len(idem) == 2**n
        assert all(s.is_idempotent() for s in idem)
        assert {s.domain for s in idem} == {frozenset(sub) for sub in subsets(range(1, n + 1))}


# -- tables ---------------------------------------------------------------------

def test_symmetric_inverse_monoid_is_inverse():
    for n in (2, 3):
        table = MulTable.from_operation(pb_enumerate(n), pb_compose)
        ok, violation = check_inverse(table)
        assert ok and violation is None


def test_pseudoinverse_uniqueness_small_n():
    elems = pb_enumerate(3)
    table = MulTable.from_operation(elems, pb_compose)
    t = table.table
    n = len(t)
    for s in range(n):
        mates = [u for u in range(n) if t[t[s][u]][s] == s and t[t[u][s]][u] == u]
        assert len(mates) == 1
        assert elems[mates[0]] == pb_inverse(elems[s])


def test_left_zero_semigroup_regular_not_inverse():
    table = MulTable.from_rows(("a", "b"), [[0, 0], [1, 1]])
    assert check_regular(table)
    ok, violation = check_inverse(table)
    assert not ok and set(violation) == {"a", "b"}


def test_group_table_is_inverse():
    table = MulTable.from_operation(range(5), lambda a, b: (a + b) % 5)
    assert check_inverse(table) == (True, None)


def test_non_associative_rejected_with_witness():
    # subtraction mod 3 is not associative
    table = MulTable.from_operation(range(3), lambda a, b: (a - b) % 3)
    assert table.associativity_witness() is not None
    with pytest.raises(InputError, match="associative"):
        check_regular(table)


def test_table_from_rows_validation():
    with pytest.raises(InputError):
        MulTable.from_rows(("a",), [[0, 0]])
    with pytest.raises(InputError):
        MulTable.from_rows(("a", "b"), [[0, 2], [1, 0]])


# -- natural partial order -------------------------------------------------------

def test_empty_below_everything():
    zero = pb_empty(3)
    for sigma in pb_enumerate(3):
        assert natural_partial_order(zero, sigma)


def test_restriction_below_original():
    sigma = PartialBijection.of(3, {1: 2, 2: 3, 3: 1})
    restricted = PartialBijection.of(3, {1: 2})
    assert natural_partial_order(restricted, sigma)
    assert not natural_partial_order(sigma, restricted)


def test_incomparable_pair():
    a = PartialBijection.of(2, {1: 1})
    b = PartialBijection.of(2, {1: 2})
    assert not natural_partial_order(a, b)
    assert not natural_partial_order(b, a)


def test_order_matches_table_characterization():
    elems = pb_enumerate(3)
    table = MulTable.from_operation(elems, pb_compose)
    assert check_inverse(table)[0]
    index = {e: i for i, e in enumerate(elems)}
    for sigma in elems:
        for tau in elems:
            via_table = table_natural_partial_order(table, index[sigma], index[tau], assume_inverse=True)
            assert via_table == natural_partial_order(sigma, tau)


def test_idempotent_lattice_matches_subsets():
    n = 3
    idem = {s.domain: s for s in pb_enumerate(n) if s.is_idempotent()}
    for A, ea in idem.items():
        for B, eb in idem.items():
            assert natural_partial_order(ea, eb) == (A <= B)
            assert pb_compose(ea, eb) == idem[A & B]


# -- ideal products ---------------------------------------------------------------

def test_ideal_product_examples():
    assert ideal_product({1, 2}, {2, 3}, 5) == {2}
    assert ideal_product({1, 4}, {1, 4}, 5) == {1, 4}
    assert ideal_product(set(), {2, 3}, 5) == set()


def test_ideal_product_laws_exhaustive():
    ground = list(range(1, 6))
    all_subsets = [frozenset(s) for s in subsets(ground)]
    for P in all_subsets:
        for Q in all_subsets:
            assert ideal_product(P, Q, 5) == ideal_product(Q, P, 5)
            assert ideal_product(P, P, 5) == P
    for P in all_subsets[:8]:
        for Q in all_subsets[:8]:
            for R in all_subsets[:8]:
                left = ideal_product(ideal_product(P, Q, 5), R, 5)
                right = ideal_product(P, ideal_product(Q, R, 5), 5)
                assert left == right


def test_ideal_product_outside_ground():
    with pytest.raises(InputError):
        ideal_product({9}, {1}, 5)


# -- graph correspondence ----------------------------------------------------------

def test_graph_of_identity_subset():
    sigma = pb_identity(3, (1, 3))
    assert pb_support_correspondence(sigma).pairs == {(1, 1), (3, 3)}


def test_graph_homomorphism_exhaustive():
    elems = pb_enumerate(3)
    for sigma in elems:
        g = pb_support_correspondence(sigma)
        assert pb_from_mask(g) == sigma  # injective with explicit inverse
        assert mask_transpose(g).pairs == pb_support_correspondence(pb_inverse(sigma)).pairs
    for sigma in elems[:20]:
        for tau in elems[:20]:
            composed = mask_compose(pb_support_correspondence(sigma), pb_support_correspondence(tau))
            assert composed.pairs == pb_support_correspondence(pb_compose(sigma, tau)).pairs


def test_graph_homomorphism_is_injective():
    elems = pb_enumerate(3)
    masks = {pb_support_correspondence(s).pairs for s in elems}
    assert len(masks) == len(elems)
