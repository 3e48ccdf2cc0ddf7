"""Two-copy metrics: validity, concatenation laws, witnesses, probes."""

import pytest
from hypothesis import given, settings

from coarsebench import (
    EQUIVALENT,
    ComparisonConfig,
    InputError,
    NestedFamily,
    compare_doubles,
    concat,
    constant_double,
    flip,
    idempotent_from_family,
    matrix_double,
    portal_double,
    semigroup_probe,
    standard_double,
    tower_from_generator,
    translation_double,
    unit_double,
    validate_double,
    validate_family,
    witness_nonequivalence,
    zero_double,
)
from coarsebench.catalog import growing_family, integer_line_catalog, interval_family
from conftest import portal_doubles, seeded_doubles


def brute_double_triangle(dm, level):
    """Oracle: full triangle scan on the materialized doubled point set."""
    pts = dm.base.points(level)
    doubled = [(p, c) for c in (0, 1) for p in pts]

    def dist(a, b):
        (x, cx), (y, cy) = a, b
        if cx == cy:
            return dm.base.dist(x, y)
        return dm.cross_value(level, x, y) if cx == 0 else dm.cross_value(level, y, x)

    for a in doubled:
        for b in doubled:
            if a != b and dist(a, b) <= 0:
                return False
            if dist(a, b) != dist(b, a):
                return False
            for c in doubled:
                if dist(a, b) > dist(a, c) + dist(c, b):
                    return False
    return True


# -- validation ---------------------------------------------------------------

def test_unit_like_cross_valid(line_small):
    dm = unit_double(line_small)
    assert validate_double(dm).ok
    assert brute_double_triangle(dm, 0)


def test_cross_equal_to_base_touches(line_small):
    pts = line_small.points(-1)
    rows = [[line_small.dist(p, q) for q in pts] for p in pts]
    dm = matrix_double(line_small, rows, "touching")
    report = validate_double(dm)
    assert not report.ok
    assert report.violations[0].axiom == "separation"


def test_constant_cross_over_unit_space_valid(unit5):
    dm = constant_double(unit5, 1)
    assert validate_double(dm).ok
    assert brute_double_triangle(dm, 0)


def test_validator_catches_planted_lipschitz_break(line_small):
    pts = line_small.points(-1)
    rows = [[abs(p) + abs(q) + 1 for q in pts] for p in pts]
    i = pts.index(0)
    rows[i][i] = 50  # breaks |c(x,y) - c(x',y)| <= d(x,x')
    dm = matrix_double(line_small, rows, "broken")
    report = validate_double(dm)
    assert not report.ok
    assert not brute_double_triangle(dm, dm.base.num_levels - 1)


@given(portal_doubles(tower_from_generator("integer_line", {"radii": [5, 9]})))
@settings(max_examples=40, deadline=None)
def test_portal_doubles_always_valid(dm):
    assert validate_double(dm).ok
    assert brute_double_triangle(dm, 0)


# -- standard constructors ----------------------------------------------------

def test_family_whole_space_gives_unit_shift(line_small):
    top = line_small.points(-1)
    fam = NestedFamily.of([frozenset(top)])
    dm = idempotent_from_family(line_small, fam)
    d = line_small.dist
    for lvl in range(line_small.num_levels):
        pts = line_small.points(lvl)
        for x in pts:
            for y in pts:
                assert dm.cross_value(lvl, x, y) == d(x, y) + 1


def test_zero_family_formula(line6):
    dm = zero_double(line6, 0)
    for x, y in ((0, 0), (3, -2), (-7, 5)):
        assert dm.cross_value(-1, x, y) == abs(x) + abs(y) + 1


def test_interval_family_values(line6):
    dm = idempotent_from_family(line6, interval_family(line6, 1))
    assert dm.cross_value(-1, 0, 0) == 1
    # oracle from the defining double minimum, n up to 20
    def oracle(x, y):
        return min(
            abs(x - z) + n + abs(z - y)
            for n in range(1, 21)
            for z in range(-n, n + 1)
        )
    for x, y in ((5, 5), (-4, 7), (0, 9)):
        assert dm.cross_value(-1, x, y) == oracle(x, y)
    assert dm.cross_value(-1, 5, 5) == 5


def test_family_nesting_violation_is_error(line_small):
    fam = NestedFamily.of([frozenset({0, 1}), frozenset({1})])
    with pytest.raises(InputError, match="nesting"):
        idempotent_from_family(line_small, fam)


def test_family_growth_violation_cites_neighborhood(line_small):
    fam = NestedFamily.of([frozenset({0}), frozenset({0})])
    report = validate_family(line_small, fam)
    assert any(v.axiom == "one_neighborhood" for v in report.violations)
    with pytest.raises(InputError, match="1-neighborhood"):
        idempotent_from_family(line_small, fam)
    # the zero construction accepts the same bounded family deliberately
    dm = idempotent_from_family(line_small, fam, require_growth=False)
    assert dm.cross_value(-1, 2, -1) == 2 + 1 + 1


def test_standard_double_dispatch(line_small):
    assert standard_double(line_small, "unit").label == "unit"
    assert standard_double(line_small, "zero", basepoint=0).cross_value(0, 1, 1) == 3
    fam = growing_family(line_small)
    assert standard_double(line_small, "family", family=fam).portals is not None
    with pytest.raises(InputError):
        standard_double(line_small, "mystery")


def test_portal_compatibility_check(line_small):
    # crossing cheaply at 0 and also from 6 back to 0 shortcuts the copies
    with pytest.raises(InputError, match="distort"):
        portal_double(line_small, [(0, 0, 1), (6, 0, 1)], "bad")
    # the same endpoints are fine along one reflection
    dm = portal_double(line_small, [(0, 0, 1), (3, -3, 1)], "good")
    assert validate_double(dm).ok


# -- concatenation ------------------------------------------------------------

def test_unit_law_pointwise(line6):
    unit = unit_double(line6)
    for dm in (zero_double(line6, 0), idempotent_from_family(line6, interval_family(line6, 1)), translation_double(line6, 3)):
        left = concat(unit, dm)
        right = concat(dm, unit)
        for lvl in range(line6.num_levels):
            expected = [[v + 1 for v in row] for row in dm.cross(lvl)]
            assert left.cross(lvl) == expected
            assert right.cross(lvl) == expected


def test_zero_concat_zero_values(line6):
    z = zero_double(line6, 0)
    zz = concat(z, z)
    for x, y in ((0, 0), (4, -3), (-8, 8)):
        assert zz.cross_value(-1, x, y) == abs(x) + abs(y) + 2


def test_family_idempotent_up_to_equivalence():
    tower = tower_from_generator("integer_line", {"radii": [4, 10, 16, 22, 28, 34, 40]})
    dm = idempotent_from_family(tower, interval_family(tower, 1))
    verdict = compare_doubles(concat(dm, dm), dm, ComparisonConfig(window=3))
    assert verdict.tag == EQUIVALENT


def test_concat_base_mismatch(line6, line_small):
    with pytest.raises(InputError):
        concat(unit_double(line6), unit_double(line_small))


def test_separation_adds(line6):
    catalog = integer_line_catalog(line6)
    for d1 in catalog[:4]:
        for d2 in catalog[:4]:
            joined = concat(d1, d2, validate=False)
            for lvl in range(line6.num_levels):
                assert joined.separation(lvl) >= d1.separation(lvl) + d2.separation(lvl)


def test_concat_output_validates(line_small):
    for d1, d2 in zip(seeded_doubles(line_small, 3, 4), seeded_doubles(line_small, 4, 4)):
        joined = concat(d1, d2)  # validation on by default; raises if invalid
        assert brute_double_triangle(joined, 1)


def test_boundary_flags_on_truncated_levels(line_small):
    z = zero_double(line_small, 0)
    joined = concat(z, z)
    top = line_small.num_levels - 1
    assert joined.boundary_flags[0] == frozenset()
    # at the deepest level the evaluation set is the level itself; entries
    # whose only minimizers lie on the outer ring get flagged
    assert isinstance(joined.boundary_flags[top], frozenset)


def test_flip_involution_and_symmetric_fixed_points(line6):
    z = zero_double(line6, 0)  # symmetric cross
    assert flip(z).cross(-1) == z.cross(-1)
    u = unit_double(line6)
    assert flip(u).cross(-1) == u.cross(-1)
    t = translation_double(line6, 3)
    assert flip(flip(t)).cross(-1) == t.cross(-1)
    assert flip(t).cross(-1) != t.cross(-1)


def test_flip_antihomomorphism_on_full_level(flat40):
    from random import Random

    rng_doubles = seeded_doubles(flat40, 21, 4)
    for d1, d2 in zip(rng_doubles, rng_doubles[1:]):
        lhs = flip(concat(d1, d2, validate=False))
        rhs = concat(flip(d2), flip(d1), validate=False)
        assert lhs.cross(-1) == rhs.cross(-1)


def test_concat_with_flip_diagonal_bound(line6):
    t = translation_double(line6, 3)
    joined = concat(t, flip(t), validate=False)
    for lvl in range(line6.num_levels):
        pts = line6.points(lvl)
        for x in pts:
            least = min(t.cross_value(lvl, x, y) for y in pts)
            assert joined.cross_value(lvl, x, x) <= 2 * least


# -- witnesses ----------------------------------------------------------------

def test_witness_unit_vs_zero(line6):
    unit = unit_double(line6)
    zero = zero_double(line6, 0)
    witness = witness_nonequivalence(unit, zero, 1, 5)
    assert witness is not None
    grows = [w.value_b for w in witness]
    assert grows == sorted(set(grows)) and grows[-1] > 5
    for w in witness:
        assert unit.cross_value(w.level, w.p, w.q) == w.value_a <= 1
        assert zero.cross_value(w.level, w.p, w.q) == w.value_b


def test_witness_self_none(line6):
    unit = unit_double(line6)
    assert witness_nonequivalence(unit, unit, 1, 5) is None


def test_witness_reverse_direction_exhausts(line6):
    unit = unit_double(line6)
    zero = zero_double(line6, 0)
    assert witness_nonequivalence(zero, unit, 3, 20) is None


# -- law probes ---------------------------------------------------------------

def test_probe_associativity_exact(line_small):
    catalog = [unit_double(line_small), zero_double(line_small, 0), translation_double(line_small, 2)]
    results = semigroup_probe(catalog, "associativity")
    assert len(results) == 27
    assert all(r.exact for r in results)


def test_probe_regularity():
    tower = tower_from_generator("integer_line", {"radii": [4, 10, 16, 22, 28, 34, 40]})
    catalog = [unit_double(tower), zero_double(tower, 0), translation_double(tower, 3)]
    results = semigroup_probe(catalog, "regularity")
    assert all(r.verdict.tag == EQUIVALENT for r in results)


def test_probe_idempotent_commutation():
    tower = tower_from_generator("integer_line", {"radii": [4, 10, 16, 22, 28, 34, 40]})
    catalog = [
        zero_double(tower, 0),
        idempotent_from_family(tower, interval_family(tower, 1)),
        idempotent_from_family(tower, interval_family(tower, 2)),
    ]
    results = semigroup_probe(catalog, "idempotent_commutation")
    assert len(results) == 3
    assert all(r.verdict.tag == EQUIVALENT for r in results)


def test_probe_unknown_law(line_small):
    with pytest.raises(InputError):
        semigroup_probe([unit_double(line_small)], "distributivity")
