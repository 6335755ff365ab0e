"""Exact arithmetic in the rational span of real radicals of positive rationals.

A :class:`Surd` is a finite sum ``sum_i q_i * prod_p p**e_{i,p}`` with rational
``q_i`` and fractional exponents ``0 < e < 1``. Distinct radical monomials are
linearly independent over the rationals (Besicovitch), so the dictionary form
is canonical: equality is structural and the sign of a nonzero value can be
decided by refining enclosures.

Closed-form Lorentz integrals such as ``sum c_k^p (t_k^(p/P) - t_{k-1}^(p/P))``
live in this ring, which is what makes dilation identities checkable exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Dict, Tuple

from .enclosure import DEFAULT_BITS, Enclosure, power_bounds

Key = Tuple[Tuple[int, Fraction], ...]

_SMALL_PRIMES = []


def _primes_upto(n: int):
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(n + 1) if sieve[i]]


@lru_cache(maxsize=65536)
def factorize(n: int) -> Tuple[Tuple[int, int], ...]:
    """Prime factorization of a positive integer as ``((p, k), ...)``."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    global _SMALL_PRIMES
    if not _SMALL_PRIMES:
        _SMALL_PRIMES = _primes_upto(10000)
    out = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        if n < 10000 ** 2:
            out[n] = out.get(n, 0) + 1
        else:
            from sympy import factorint  # large cofactors only

            for p, k in factorint(n).items():
                out[int(p)] = out.get(int(p), 0) + int(k)
    return tuple(sorted(out.items()))


def _radical_of(base: Fraction, e: Fraction):
    """Split ``base**e`` into (rational coefficient, canonical key)."""
    coeff = Fraction(1)
    exps: Dict[int, Fraction] = {}
    for p, k in factorize(base.numerator):
        exps[p] = exps.get(p, Fraction(0)) + k * e
    for p, k in factorize(base.denominator):
        exps[p] = exps.get(p, Fraction(0)) - k * e
    return _normalize(coeff, exps)


def _normalize(coeff: Fraction, exps: Dict[int, Fraction]):
    key = []
    for p in sorted(exps):
        e = exps[p]
        whole = floor(e)
        frac = e - whole
        if whole:
            coeff *= Fraction(p) ** whole
        if frac:
            key.append((p, frac))
    return coeff, tuple(key)


def _mul_keys(k1: Key, k2: Key):
    exps: Dict[int, Fraction] = dict(k1)
    for p, e in k2:
        exps[p] = exps.get(p, Fraction(0)) + e
    return _normalize(Fraction(1), exps)


@lru_cache(maxsize=65536)
def _key_enclosure(key: Key, bits: int) -> Enclosure:
    enc = Enclosure.exact(1)
    for p, e in key:
        enc = enc * power_bounds(p, e, bits + 8)
    return enc


class Surd:
    """Immutable element of the radical ring; see module docstring."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, q in terms.items():
                q = Fraction(q)
                if q:
                    clean[key] = q
        self._terms = clean

    # constructors -------------------------------------------------------
    @classmethod
    def rational(cls, q) -> "Surd":
        return cls({(): Fraction(q)})

    @classmethod
    def power(cls, base, e) -> "Surd":
        """``base**e`` for rational ``base >= 0`` and rational ``e``."""
        base, e = Fraction(base), Fraction(e)
        if base < 0:
            raise ValueError("negative base")
        if base == 0:
            if e <= 0:
                raise ZeroDivisionError("0 to a nonpositive power")
            return cls()
        if e.denominator == 1:
            return cls.rational(base ** e.numerator)
        coeff, key = _radical_of(base, e)
        return cls({key: coeff})

    @classmethod
    def sqrt(cls, base) -> "Surd":
        return cls.power(base, Fraction(1, 2))

    @staticmethod
    def coerce(x) -> "Surd":
        return x if isinstance(x, Surd) else Surd.rational(x)

    # structure ----------------------------------------------------------
    @property
    def terms(self) -> Dict[Key, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(k == () for k in self._terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("surd is irrational")
        return self._terms.get((), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd.rational(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # ring operations ----------------------------------------------------
    def __add__(self, other):
        other = Surd.coerce(other)
        out = dict(self._terms)
        for k, q in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + q
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({k: -q for k, q in self._terms.items()})

    def __sub__(self, other):
        return self + (-Surd.coerce(other))

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return Surd({k: q * other for k, q in self._terms.items()})
        other = Surd.coerce(other)
        out: Dict[Key, Fraction] = {}
        for k1, q1 in self._terms.items():
            for k2, q2 in other._terms.items():
                c, k = _mul_keys(k1, k2)
                out[k] = out.get(k, Fraction(0)) + q1 * q2 * c
        return Surd(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = Surd.coerce(other)
        if len(other._terms) == 1:
            (key, q), = other._terms.items()
            inv_c, inv_k = _normalize(Fraction(1), {p: -e for p, e in key})
            return self * Surd({inv_k: inv_c / q})
        raise NotImplementedError("division by a multi-term surd")

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result, base = Surd.rational(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # numerics -----------------------------------------------------------
    def enclosure(self, bits: int = DEFAULT_BITS) -> Enclosure:
        total = Enclosure.exact(0)
        extra = len(self._terms).bit_length()
        for k, q in self._terms.items():
            total = total + q * _key_enclosure(k, bits + extra)
        return total

    def sign(self) -> int:
        if not self._terms:
            return 0
        if self.is_rational():
            q = self.rational_value()
            return (q > 0) - (q < 0)
        bits = 64
        while bits <= 1 << 16:
            enc = self.enclosure(bits)
            if enc.lo > 0:
                return 1
            if enc.hi < 0:
                return -1
            bits *= 2
        raise ArithmeticError("could not decide the sign of a nonzero surd")

    def __lt__(self, other):
        return (self - Surd.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - Surd.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - Surd.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - Surd.coerce(other)).sign() >= 0

    def __repr__(self):
        if not self._terms:
            return "Surd(0)"
        parts = []
        for k, q in sorted(self._terms.items(), key=lambda kv: kv[0]):
            rad = "*".join(f"{p}^({e})" for p, e in k)
            parts.append(f"{q}" + (f"*{rad}" if rad else ""))
        return "Surd(" + " + ".join(parts) + ")"


def smax(values):
    """Maximum of a nonempty iterable of surds (exact comparison)."""
    it = iter(values)
    best = Surd.coerce(next(it))
    for v in it:
        v = Surd.coerce(v)
        if v > best:
            best = v
    return best


def smin(values):
    it = iter(values)
    best = Surd.coerce(next(it))
    for v in it:
        v = Surd.coerce(v)
        if v < best:
            best = v
    return best
