"""Certified rational enclosures and outward-rounded elementary functions.

Every irrational quantity in the package is carried as an :class:`Enclosure`
``[lo, hi]`` with rational endpoints that provably contains the true value.
Roots use exact integer k-th roots; ``exp``/``log``/``atan`` use Taylor or
alternating series with explicit remainder bounds. No floating point is used.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

Number = Union[int, Fraction]

#: working precision (bits) for elementary functions; ~1e-24 absolute
DEFAULT_BITS = 80
#: default relative tolerance for refinement requests
DEFAULT_TOL = Fraction(1, 10**9)


def default_tol() -> Fraction:
    """Default tolerance, overridable through ``RIEXACT_TOL``."""
    env = os.environ.get("RIEXACT_TOL")
    if env:
        tol = Fraction(env)
        if tol <= 0:
            raise ValueError("RIEXACT_TOL must be positive")
        return tol
    return DEFAULT_TOL


def bits_for(tol: Fraction) -> int:
    """Number of bits whose dyadic grid resolves ``tol`` with margin."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return max(DEFAULT_BITS, (tol.denominator // tol.numerator).bit_length() + 24)


class NeedsEnclosure(ArithmeticError):
    """An exact rational answer is unavailable; use the certified variant."""


class Diverges:
    """Sentinel for an infinite norm or modular (not an Enclosure)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DIVERGES"

    def to_json(self) -> str:
        return "inf"


DIVERGES = Diverges()


def _floor_div(x: Fraction, bits: int) -> int:
    return (x.numerator << bits) // x.denominator


def round_down(x: Fraction, bits: int) -> Fraction:
    """Largest dyadic ``k / 2**bits`` not exceeding ``x``."""
    return Fraction(_floor_div(Fraction(x), bits), 1 << bits)


def round_up(x: Fraction, bits: int) -> Fraction:
    x = Fraction(x)
    return -round_down(-x, bits)


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval ``[lo, hi]`` containing a real quantity."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, x: Number) -> "Enclosure":
        return cls(Fraction(x), Fraction(x))

    @classmethod
    def coerce(cls, x) -> "Enclosure":
        return x if isinstance(x, Enclosure) else cls.exact(x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= Fraction(x) <= self.hi

    def certainly_le(self, other) -> bool:
        return self.hi <= Enclosure.coerce(other).lo

    def certainly_lt(self, other) -> bool:
        return self.hi < Enclosure.coerce(other).lo

    def hull(self, other) -> "Enclosure":
        other = Enclosure.coerce(other)
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def rounded(self, bits: int = DEFAULT_BITS) -> "Enclosure":
        """Outward rounding to a dyadic grid, keeping denominators small."""
        return Enclosure(round_down(self.lo, bits), round_up(self.hi, bits))

    # arithmetic ---------------------------------------------------------
    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __add__(self, other):
        other = Enclosure.coerce(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Enclosure.coerce(other))

    def __rsub__(self, other):
        return Enclosure.coerce(other) - self

    def __mul__(self, other):
        other = Enclosure.coerce(other)
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "Enclosure":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("enclosure contains zero")
        return Enclosure(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * Enclosure.coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return Enclosure.coerce(other) * self.reciprocal()

    # monotone elementary functions -------------------------------------
    def sqrt(self, bits: int = DEFAULT_BITS) -> "Enclosure":
        if self.lo < 0:
            raise ValueError("sqrt of an enclosure with negative part")
        return Enclosure(sqrt_bounds(self.lo, bits).lo, sqrt_bounds(self.hi, bits).hi)

    def power(self, e: Number, bits: int = DEFAULT_BITS) -> "Enclosure":
        """``x**e`` for rational ``e`` on a nonnegative enclosure."""
        e = Fraction(e)
        if self.lo < 0:
            raise ValueError("fractional power of negative enclosure")
        if e == 0:
            return Enclosure.exact(1)
        a, b = power_bounds(self.lo, e, bits), power_bounds(self.hi, e, bits)
        if e > 0:
            return Enclosure(a.lo, b.hi)
        return Enclosure(b.lo, a.hi)

    def exp(self, bits: int = DEFAULT_BITS) -> "Enclosure":
        return Enclosure(exp_bounds(self.lo, bits).lo, exp_bounds(self.hi, bits).hi)

    def log(self, bits: int = DEFAULT_BITS) -> "Enclosure":
        return Enclosure(log_bounds(self.lo, bits).lo, log_bounds(self.hi, bits).hi)

    def atan(self, bits: int = DEFAULT_BITS) -> "Enclosure":
        return Enclosure(atan_bounds(self.lo, bits).lo, atan_bounds(self.hi, bits).hi)

    def asin(self, bits: int = DEFAULT_BITS) -> "Enclosure":
        return Enclosure(asin_bounds(self.lo, bits).lo, asin_bounds(self.hi, bits).hi)

    def to_json(self) -> dict:
        return {"lo": fraction_str(self.lo), "hi": fraction_str(self.hi)}

    def __repr__(self) -> str:
        if self.is_exact:
            return f"Enclosure({self.lo})"
        return f"Enclosure([{float(self.lo):.12g}, {float(self.hi):.12g}])"


def fraction_str(x) -> str:
    """Canonical ``"p/q"`` string (integers as ``"p/1"``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


# ---------------------------------------------------------------------------
# roots


def iroot(n: int, k: int) -> int:
    """Floor of the real k-th root of a nonnegative integer."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return isqrt(n)
    x = 1 << -(-n.bit_length() // k)  # initial guess above the root
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def exact_root(x: Fraction, k: int):
    """Exact rational k-th root of ``x >= 0`` or ``None``."""
    x = Fraction(x)
    rn, rd = iroot(x.numerator, k), iroot(x.denominator, k)
    if rn ** k == x.numerator and rd ** k == x.denominator:
        return Fraction(rn, rd)
    return None


def root_bounds(x: Number, k: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of the k-th root of ``x >= 0`` with relative precision ~2^-bits."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    r = exact_root(x, k)
    if r is not None:
        return Enclosure.exact(r)
    # scale so the root has about `bits` significant bits
    mag = (x.denominator.bit_length() - x.numerator.bit_length()) // k + 2
    shift = bits + max(0, mag)
    n = (x.numerator << (k * shift)) // x.denominator
    s = iroot(n, k)
    return Enclosure(Fraction(s, 1 << shift), Fraction(s + 1, 1 << shift))


def sqrt_bounds(x: Number, bits: int = DEFAULT_BITS) -> Enclosure:
    return root_bounds(x, 2, bits)


def power_bounds(x: Number, e: Number, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of ``x**e`` for rational ``x >= 0`` and rational ``e``."""
    x, e = Fraction(x), Fraction(e)
    if x < 0:
        raise ValueError("negative base")
    if x == 0:
        if e <= 0:
            raise ZeroDivisionError("0 to a nonpositive power")
        return Enclosure.exact(0)
    m, k = e.numerator, e.denominator
    if m >= 0:
        return root_bounds(x ** m, k, bits)
    return root_bounds(x ** (-m), k, bits).reciprocal()


# ---------------------------------------------------------------------------
# transcendental functions


def _exp_small(y: Fraction, bits: int) -> Enclosure:
    # 0 <= y <= 1/2: remainder after N terms is at most 2 y^N / N!.
    # Terms are kept as outward-rounded dyadics so sizes stay bounded.
    prec = bits + 8
    eps = Fraction(1, 1 << prec)
    t_lo = t_hi = Fraction(1)
    s_lo = s_hi = Fraction(0)
    n = 0
    while True:
        s_lo += t_lo
        s_hi += t_hi
        n += 1
        t_lo = round_down(t_lo * y / n, prec + 8)
        t_hi = round_up(t_hi * y / n, prec + 8)
        if 2 * t_hi < eps:
            break
    return Enclosure(s_lo, s_hi + 2 * t_hi).rounded(prec)


def exp_bounds(x: Number, bits: int = DEFAULT_BITS) -> Enclosure:
    x = Fraction(x)
    if x == 0:
        return Enclosure.exact(1)
    if x < 0:
        return exp_bounds(-x, bits).reciprocal().rounded(bits + 4)
    j = 0
    y = x
    while y > Fraction(1, 2):
        y /= 2
        j += 1
    work = bits + 2 * j + int(x).bit_length() * 2 + 16
    enc = _exp_small(y, work)
    for _ in range(j):
        enc = Enclosure(enc.lo * enc.lo, enc.hi * enc.hi).rounded(work)
    return enc


def _atanh_series(z: Fraction, bits: int) -> Enclosure:
    # 0 <= z <= 1/3; tail after the last term <= next / (1 - z^2)
    prec = bits + 8
    z2 = z * z
    p_lo = p_hi = z
    s_lo = s_hi = Fraction(0)
    eps = Fraction(1, 1 << prec)
    k = 0
    while True:
        s_lo += round_down(p_lo / (2 * k + 1), prec + 8)
        s_hi += round_up(p_hi / (2 * k + 1), prec + 8)
        k += 1
        p_lo = round_down(p_lo * z2, prec + 8)
        p_hi = round_up(p_hi * z2, prec + 8)
        tail = p_hi / (2 * k + 1) / (1 - z2)
        if tail < eps:
            break
    return Enclosure(s_lo, s_hi + tail).rounded(prec)


def _ln2(bits: int) -> Enclosure:
    return 2 * _atanh_series(Fraction(1, 3), bits + 2)


def log_bounds(x: Number, bits: int = DEFAULT_BITS) -> Enclosure:
    """Natural logarithm of ``x > 0``."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of nonpositive number")
    if x == 1:
        return Enclosure.exact(0)
    e = x.numerator.bit_length() - x.denominator.bit_length()
    m = x / Fraction(2) ** e
    while m >= 2:
        m /= 2
        e += 1
    while m < 1:
        m *= 2
        e -= 1
    work = bits + abs(e).bit_length() + 8
    z = (m - 1) / (m + 1)
    enc = 2 * _atanh_series(z, work)
    if e:
        enc = enc + e * _ln2(work)
    return enc.rounded(bits + 4)


def _atan_small(x: Fraction, bits: int) -> Enclosure:
    # |x| <= 1/2: alternating series, consecutive partial sums bracket the value
    x2 = x * x
    power, total, k = x, Fraction(0), 0
    eps = Fraction(1, 1 << (bits + 8))
    while True:
        term = power / (2 * k + 1)
        new = total + term if k % 2 == 0 else total - term
        k += 1
        power *= x2
        if power / (2 * k + 1) < eps:
            nxt = power / (2 * k + 1)
            lo, hi = sorted((new, new + (nxt if k % 2 == 0 else -nxt)))
            return Enclosure(lo, hi).rounded(bits + 8)
        total = new


def pi_bounds(bits: int = DEFAULT_BITS) -> Enclosure:
    """pi = 4 (atan(1/2) + atan(1/3))."""
    return (4 * (_atan_small(Fraction(1, 2), bits + 4)
                 + _atan_small(Fraction(1, 3), bits + 4))).rounded(bits + 4)


def atan_bounds(x: Number, bits: int = DEFAULT_BITS) -> Enclosure:
    x = Fraction(x)
    if x < 0:
        return -atan_bounds(-x, bits)
    if x > 1:
        return (pi_bounds(bits + 2) / 2 - atan_bounds(1 / x, bits + 2)).rounded(bits + 4)
    if x <= Fraction(1, 2):
        return _atan_small(x, bits)
    # atan(x) = atan(1/2) + atan((x - 1/2) / (1 + x/2)), reduced argument <= 1/3
    y = (x - Fraction(1, 2)) / (1 + x / 2)
    return (_atan_small(Fraction(1, 2), bits + 2) + _atan_small(y, bits + 2)).rounded(bits + 4)


def asin_bounds(y: Number, bits: int = DEFAULT_BITS) -> Enclosure:
    """Arcsine of a rational ``y`` in ``[-1, 1]``."""
    y = Fraction(y)
    if abs(y) > 1:
        raise ValueError("asin argument outside [-1, 1]")
    if abs(y) == 1:
        half = pi_bounds(bits + 2) / 2
        return half if y > 0 else -half
    if y == 0:
        return Enclosure.exact(0)
    if y < 0:
        return -asin_bounds(-y, bits)
    # asin(y) = atan(y / sqrt(1 - y^2)); atan is increasing in the ratio
    work = bits + 16
    ratio = Enclosure.exact(y) / sqrt_bounds(1 - y * y, work)
    return Enclosure(atan_bounds(ratio.lo, work).lo, atan_bounds(ratio.hi, work).hi)


def bisect_increasing(fn, target: Fraction, lo: Fraction, hi: Fraction,
                      tol: Fraction) -> Enclosure:
    """Bracket the solution of ``fn(x) = target`` for increasing ``fn``.

    ``fn`` returns an :class:`Enclosure`; ``lo`` and ``hi`` must satisfy
    ``fn(lo) <= target <= fn(hi)``. Midpoints are decided only when the
    enclosure of ``fn`` is on one side of ``target``.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        val = fn(mid)
        if val.hi < target:
            lo = mid
        elif val.lo > target:
            hi = mid
        elif val.is_exact:
            return Enclosure.exact(mid)
        else:
            break
    return Enclosure(lo, hi)
