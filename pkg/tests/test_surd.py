from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from riexact.surd import Surd, factorize, smax

q = st.fractions(min_value=Fraction(1, 30), max_value=50, max_denominator=30)


def test_canonical_forms():
    assert Surd.sqrt(8) == 2 * Surd.sqrt(2)
    assert Surd.power(Fraction(9, 4), Fraction(1, 2)).rational_value() == Fraction(3, 2)
    assert Surd.sqrt(2) * Surd.sqrt(2) == Surd.rational(2)
    assert Surd.power(8, Fraction(2, 3)) == Surd.rational(4)
    assert (Surd.sqrt(3) - Surd.sqrt(3)).is_zero()


def test_sign_of_near_cancellation():
    # 99^2 = 9801 < 9802 = 2 * 4901
    s = Surd.sqrt(2 * 4901) - 99
    assert s.sign() == 1
    assert (Surd.sqrt(3) + Surd.sqrt(5)) > Surd.sqrt(15)
    assert smax([Surd.sqrt(2), Fraction(3, 2), Surd.sqrt(Fraction(9, 4))]) == Fraction(3, 2)


@given(q, q, st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(5, 2)]))
@settings(max_examples=50, deadline=None)
def test_enclosure_matches_float(a, b, e):
    s = Surd.power(a, e) + 3 * Surd.power(b, e) - Surd.sqrt(a * b)
    mpmath.mp.prec = 120
    ref = mpmath.mpf(a.numerator) / a.denominator
    refb = mpmath.mpf(b.numerator) / b.denominator
    val = ref ** (mpmath.mpf(e.numerator) / e.denominator) \
        + 3 * refb ** (mpmath.mpf(e.numerator) / e.denominator) - mpmath.sqrt(ref * refb)
    enc = s.enclosure(100)
    assert abs(float(enc.mid) - float(val)) <= 1e-12 * max(1.0, abs(float(val)))


def test_factorize():
    assert factorize(360) == ((2, 3), (3, 2), (5, 1))
    big = 1_000_003 * 999_983
    assert dict(factorize(big)) == {999_983: 1, 1_000_003: 1}


def test_errors():
    with pytest.raises(ValueError):
        Surd.power(-1, Fraction(1, 2))
    with pytest.raises(ValueError):
        Surd.sqrt(2).rational_value()
