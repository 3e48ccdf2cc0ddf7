from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coarsebench.exact import Cx, as_q, exact_sqrt, q_str


def test_as_q_forms():
    assert as_q(5) == 5
    assert as_q("7") == 7
    assert as_q("3/2") == Fraction(3, 2)
    assert as_q(Fraction(4, 2)) == 2 and isinstance(as_q(Fraction(4, 2)), int)
    with pytest.raises(TypeError):
        as_q(1.5)
    with pytest.raises(TypeError):
        as_q(True)


@given(st.fractions(max_denominator=50))
def test_q_str_round_trip(q):
    assert as_q(q_str(q)) == q


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(0) == 0
    assert exact_sqrt(2) is None
    with pytest.raises(ValueError):
        exact_sqrt(-1)


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
def test_cx_conjugation_is_multiplicative(a, b, c, d):
    z, w = Cx.of((a, b)), Cx.of((c, d))
    assert (z * w).conj() == z.conj() * w.conj()
    assert (z * w).abs2() == z.abs2() * w.abs2()


def test_cx_abs():
    assert Cx.of((3, 4)).abs_exact() == 5
    assert Cx.of(Fraction(1, 3)).abs_exact() == Fraction(1, 3)
    with pytest.raises(ValueError):
        Cx.of((1, 1)).abs_exact()
