from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from riexact.enclosure import (
    Enclosure,
    asin_bounds,
    atan_bounds,
    exact_root,
    exp_bounds,
    fraction_str,
    iroot,
    log_bounds,
    parse_fraction,
    pi_bounds,
    power_bounds,
    sqrt_bounds,
)

mpmath.mp.prec = 200
pos = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000)


def _mp(x):
    return mpmath.mpf(x.numerator) / x.denominator


def _inside(enc, value):
    slack = abs(value) * mpmath.mpf(2) ** -190  # reference rounding
    return _mp(enc.lo) - slack <= value <= _mp(enc.hi) + slack


@given(pos)
@settings(max_examples=60, deadline=None)
def test_elementary_enclosures_contain_reference(x):
    assert _inside(exp_bounds(x / 100), mpmath.exp(_mp(x / 100)))
    assert _inside(log_bounds(x), mpmath.log(_mp(x)))
    assert _inside(sqrt_bounds(x), mpmath.sqrt(_mp(x)))
    assert _inside(atan_bounds(x), mpmath.atan(_mp(x)))
    assert _inside(power_bounds(x, Fraction(2, 3)), _mp(x) ** (mpmath.mpf(2) / 3))


def test_asin_and_pi():
    assert _inside(pi_bounds(), mpmath.pi)
    for y in (Fraction(0), Fraction(1, 2), Fraction(-3, 4), Fraction(1)):
        assert _inside(asin_bounds(y), mpmath.asin(_mp(y)))


def test_widths_follow_bits():
    assert sqrt_bounds(2, 80).width <= Fraction(1, 2 ** 78)
    assert log_bounds(3, 120).width <= Fraction(1, 2 ** 110)


def test_roots():
    assert iroot(10 ** 30 + 5, 3) == 10 ** 10
    assert exact_root(Fraction(9, 4), 2) == Fraction(3, 2)
    assert exact_root(Fraction(2), 2) is None
    assert sqrt_bounds(Fraction(9, 4)) == Enclosure.exact(Fraction(3, 2))


def test_interval_arithmetic_is_outward():
    a, b = Enclosure(Fraction(-1), Fraction(2)), Enclosure(Fraction(3), Fraction(4))
    assert a * b == Enclosure(Fraction(-4), Fraction(8))
    assert (a - b) == Enclosure(Fraction(-5), Fraction(-1))
    assert (b / b).contains(1)
    with pytest.raises(ZeroDivisionError):
        b / a


def test_fraction_strings_roundtrip():
    assert fraction_str(Fraction(3)) == "3/1"
    assert parse_fraction("7/3") == Fraction(7, 3)
    assert parse_fraction("0.25") == Fraction(1, 4)
