"""Exact scalar arithmetic: rationals, complex rationals, and JSON-friendly codecs.

Every distance and matrix entry in this package is an exact rational (or a
complex number with rational real/imaginary parts).  Floats never enter any
comparison, so set containments and equalities computed downstream are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Q = Union[int, Fraction]


def as_q(value) -> Q:
    """Coerce ints, Fractions, and 'p/q' strings to an exact rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return as_q(Fraction(int(num), int(den)))
        return int(text)
    raise TypeError(f"not an exact rational: {value!r}")


def q_str(value: Q) -> str:
    """Canonical string form: '5' for integers, '3/2' otherwise."""
    value = as_q(value)
    if isinstance(value, int):
        return str(value)
    return f"{value.numerator}/{value.denominator}"


def exact_sqrt(value: Q):
    """Exact square root of a nonnegative rational, or None if irrational."""
    value = Fraction(value)
    if value < 0:
        raise ValueError("negative value has no real square root")
    rn = math.isqrt(value.numerator)
    rd = math.isqrt(value.denominator)
    if rn * rn == value.numerator and rd * rd == value.denominator:
        return as_q(Fraction(rn, rd))
    return None


@dataclass(frozen=True)
class Cx:
    """A complex number with exact rational parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(value) -> "Cx":
        if isinstance(value, Cx):
            return value
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return Cx(Fraction(as_q(value[0])), Fraction(as_q(value[1])))
        return Cx(Fraction(as_q(value)), Fraction(0))

    def __add__(self, other: "Cx") -> "Cx":
        other = Cx.of(other)
        return Cx(self.re + other.re, self.im + other.im)

    def __mul__(self, other) -> "Cx":
        other = Cx.of(other)
        return Cx(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "Cx":
        return Cx(-self.re, -self.im)

    def conj(self) -> "Cx":
        return Cx(self.re, -self.im)

    def abs2(self) -> Q:
        return as_q(self.re * self.re + self.im * self.im)

    def abs_exact(self) -> Q:
        """Exact modulus; raises if the modulus is irrational."""
        root = exact_sqrt(self.abs2())
        if root is None:
            raise ValueError(f"modulus of {self} is irrational")
        return root

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self) -> str:
        if self.im == 0:
            return q_str(self.re)
        return f"{q_str(self.re)}{'+' if self.im >= 0 else '-'}{q_str(abs(self.im))}i"


CX_ZERO = Cx(Fraction(0), Fraction(0))
CX_ONE = Cx(Fraction(1), Fraction(0))
