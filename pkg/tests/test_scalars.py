"""Scalar arithmetic: rational values carrying a power of the sphere
area as a formal grade."""

import math
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from bosonic.scalars import ONE, ZERO, ScaledRational, sphere_area

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=40
)
grades = st.integers(min_value=-3, max_value=3)


def sr(q, g=0):
    return ScaledRational(mpq(q.numerator, q.denominator), g)


@given(rationals, rationals, grades)
def test_add_sub_same_grade(a, b, g):
    x, y = sr(a, g), sr(b, g)
    s = x + y
    assert s.value == mpq(a.numerator, a.denominator) + mpq(b.numerator, b.denominator)
    assert s - y == x


@given(rationals, rationals, grades, grades)
def test_mul_adds_grades(a, b, g1, g2):
    p = sr(a, g1) * sr(b, g2)
    if a == 0 or b == 0:
        assert p.is_zero()
    else:
        assert p.omega_pow == g1 + g2


@given(rationals, rationals, grades, grades)
def test_div_subtracts_grades(a, b, g1, g2):
    if b == 0:
        return
    q = sr(a, g1) / sr(b, g2)
    assert q * sr(b, g2) == sr(a, g1)
    if a != 0:
        assert q.omega_pow == g1 - g2


def test_mixed_grade_add_rejected():
    with pytest.raises(ValueError):
        ScaledRational(1, 1) + ScaledRational(1, 0)


def test_zero_absorbs_any_grade():
    # the zero scalar is grade-agnostic so sums against it always work
    assert ZERO + ScaledRational(mpq(1, 2), 2) == ScaledRational(mpq(1, 2), 2)
    assert ScaledRational(0, 5).is_zero()
    assert ONE * ZERO == ZERO


@given(rationals, grades)
def test_json_round_trip(a, g):
    x = sr(a, g)
    assert ScaledRational.from_json(x.to_json()) == x


def test_json_strings_are_exact():
    obj = ScaledRational(mpq(10**40 + 1, 3), -2).to_json()
    assert obj["num"] == str(10**40 + 1)
    assert obj["den"] == "3"
    assert obj["omega"] == -2


def test_sphere_area_values():
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi**2)
    assert sphere_area(5) == pytest.approx(8 * math.pi**2 / 3)


@given(rationals, grades)
def test_numeric_applies_grade(a, g):
    x = sr(a, g)
    expect = float(a) * sphere_area(3) ** g
    assert x.numeric(3) == pytest.approx(expect, abs=1e-300, rel=1e-12)


def test_numeric_without_m_requires_grade_zero():
    assert ScaledRational(mpq(3, 4)).numeric() == 0.75
    with pytest.raises(ValueError):
        ScaledRational(mpq(3, 4), 1).numeric()
