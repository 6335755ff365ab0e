"""Exact piecewise-polynomial functions of one real variable.

A :class:`PiecewisePoly` is a finite sum of polynomials of degree at most two,
each living on a half-open interval ``[lo, hi)`` with rational endpoints, and
vanishing outside. Polynomial coefficients are stored in the absolute variable
``t`` as ``(a0, a1, a2)``. Everything here is exact rational arithmetic; the
only exits to :class:`~riexact.enclosure.Enclosure` are square roots
(:func:`geometric_mean`, :func:`sqrt_product_integral`).
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .enclosure import (
    DEFAULT_BITS,
    Enclosure,
    NeedsEnclosure,
    exact_root,
    fraction_str,
    log_bounds,
    parse_fraction,
    power_bounds,
    sqrt_bounds,
)
from .surd import Surd

MAX_DEGREE = 2

Coeffs = Tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# dense polynomials as coefficient tuples (a0, a1, ...)


def ptrim(c: Sequence) -> Coeffs:
    c = [Fraction(x) for x in c]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def peval(c: Sequence, t):
    """Horner evaluation; ``t`` may be a Fraction, Surd or Enclosure."""
    acc = 0
    for a in reversed(c):
        acc = acc * t + a
    return acc


def padd(p: Sequence, q: Sequence) -> Coeffs:
    n = max(len(p), len(q))
    return ptrim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                  for i in range(n)])


def pscale(p: Sequence, c) -> Coeffs:
    return ptrim([a * c for a in p])


def psub(p: Sequence, q: Sequence) -> Coeffs:
    return padd(p, pscale(q, -1))


def pmul(p: Sequence, q: Sequence) -> Coeffs:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return ptrim(out)


def ppow(p: Sequence, n: int) -> Coeffs:
    out: Coeffs = (Fraction(1),)
    for _ in range(n):
        out = pmul(out, p)
    return out


def pderiv(p: Sequence) -> Coeffs:
    return ptrim([i * p[i] for i in range(1, len(p))])


def pantideriv(p: Sequence) -> Coeffs:
    """Antiderivative vanishing at 0."""
    return ptrim([Fraction(0)] + [Fraction(a) / (i + 1) for i, a in enumerate(p)])


def pcompose_affine(p: Sequence, s, d) -> Coeffs:
    """Coefficients of ``t -> p(s*t + d)``."""
    out: Coeffs = ()
    base: Coeffs = (Fraction(1),)
    lin = ptrim([d, s])
    for a in p:
        out = padd(out, pscale(base, a))
        base = pmul(base, lin)
    return out


def pintegral(p: Sequence, a, b):
    P = pantideriv(p)
    return peval(P, b) - peval(P, a)


def quadratic_roots(c: Sequence):
    """Real roots of a polynomial of degree <= 2 as sorted Surds.

    Returns ``None`` for the zero polynomial.
    """
    c = ptrim(c)
    if not c:
        return None
    if len(c) == 1:
        return []
    if len(c) == 2:
        return [Surd.rational(-c[0] / c[1])]
    a0, a1, a2 = c
    disc = a1 * a1 - 4 * a2 * a0
    if disc < 0:
        return []
    centre = Surd.rational(-a1 / (2 * a2))
    if disc == 0:
        return [centre]
    half = Surd.sqrt(disc / (4 * a2 * a2))
    return [centre - half, centre + half]


def poly_min_max(c: Sequence, lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
    """Exact min and max of a degree <= 2 polynomial on the closed ``[lo, hi]``."""
    cands = [peval(c, lo), peval(c, hi)]
    if len(c) == 3 and c[2] != 0:
        v = -c[1] / (2 * c[2])
        if lo < v < hi:
            cands.append(peval(c, v))
    return min(cands), max(cands)


# ---------------------------------------------------------------------------
# piecewise polynomials


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    coeffs: Coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __call__(self, t):
        return peval(self.coeffs, t)


def _canonical(pieces: Iterable) -> Tuple[Piece, ...]:
    raw = []
    for p in pieces:
        if isinstance(p, Piece):
            lo, hi, c = p.lo, p.hi, p.coeffs
        else:
            lo, hi, c = p
        lo, hi, c = Fraction(lo), Fraction(hi), ptrim(c)
        if lo > hi:
            raise ValueError(f"reversed interval [{lo}, {hi})")
        if lo == hi or not c:
            continue
        raw.append(Piece(lo, hi, c))
    raw.sort(key=lambda p: p.lo)
    out: List[Piece] = []
    for p in raw:
        if out and p.lo < out[-1].hi:
            raise ValueError(f"overlapping pieces at {p.lo}")
        if out and out[-1].hi == p.lo and out[-1].coeffs == p.coeffs:
            out[-1] = Piece(out[-1].lo, p.hi, p.coeffs)
        else:
            out.append(p)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class PiecewisePoly:
    """Compactly supported piecewise polynomial of degree <= 2.

    Construction canonicalizes: zero pieces are dropped and touching pieces
    with identical polynomials are merged, so equality is structural.
    """

    pieces: Tuple[Piece, ...] = ()

    def __post_init__(self):
        pieces = _canonical(self.pieces)
        for p in pieces:
            if p.degree > MAX_DEGREE:
                raise ValueError(f"degree {p.degree} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "pieces", pieces)

    # constructors -------------------------------------------------------
    @classmethod
    def from_pieces(cls, pieces) -> "PiecewisePoly":
        return make(pieces)

    @classmethod
    def zero(cls) -> "PiecewisePoly":
        return StepFunction(())

    # basic structure ----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __call__(self, t):
        return evaluate(self, t)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, c):
        if isinstance(c, PiecewisePoly):
            return multiply(self, c)
        return scale(self, c)

    __rmul__ = __mul__

    @property
    def degree(self) -> int:
        return max((p.degree for p in self.pieces), default=-1)

    @property
    def breakpoints(self) -> Tuple[Fraction, ...]:
        pts = set()
        for p in self.pieces:
            pts.add(p.lo)
            pts.add(p.hi)
        return tuple(sorted(pts))

    @property
    def support_hull(self) -> Optional[Tuple[Fraction, Fraction]]:
        if not self.pieces:
            return None
        return self.pieces[0].lo, self.pieces[-1].hi

    @property
    def support_measure(self) -> Fraction:
        # a nonzero polynomial vanishes only on a null set
        return sum((p.length for p in self.pieces), Fraction(0))

    def is_zero(self) -> bool:
        return not self.pieces

    def smoothness(self) -> str:
        """``"C1"``, ``"C0"`` or ``"none"``, decided exactly at breakpoints."""
        pts = self.breakpoints
        c0 = all(left_limit(self, t) == evaluate(self, t) for t in pts)
        if not c0:
            return "none"
        d = differentiate(self)
        c1 = all(left_limit(d, t) == evaluate(d, t) for t in pts)
        return "C1" if c1 else "C0"

    def __repr__(self):
        body = ", ".join(f"[{p.lo},{p.hi}):{tuple(str(a) for a in p.coeffs)}"
                         for p in self.pieces)
        return f"{type(self).__name__}({body})"


class StepFunction(PiecewisePoly):
    """Piecewise-constant function; a :class:`PiecewisePoly` of degree 0."""

    def __post_init__(self):
        super().__post_init__()
        if any(p.degree > 0 for p in self.pieces):
            raise ValueError("step functions have constant pieces only")

    @classmethod
    def from_values(cls, breakpoints: Sequence, values: Sequence) -> "StepFunction":
        """``values[i]`` on ``[breakpoints[i], breakpoints[i+1])``."""
        if len(breakpoints) != len(values) + 1:
            raise ValueError("need one more breakpoint than values")
        bps = [Fraction(b) for b in breakpoints]
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        return cls(tuple((bps[i], bps[i + 1], (Fraction(v),))
                         for i, v in enumerate(values)))

    @classmethod
    def indicator(cls, lo, hi, value=1) -> "StepFunction":
        return cls(((Fraction(lo), Fraction(hi), (Fraction(value),)),))

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return tuple(p.coeffs[0] for p in self.pieces)

    def steps(self) -> List[Tuple[Fraction, Fraction, Fraction]]:
        return [(p.lo, p.hi, p.coeffs[0]) for p in self.pieces]


def make(pieces) -> PiecewisePoly:
    """Build the canonical function; degree-0 results come back as steps."""
    canon = _canonical(pieces)
    if all(p.degree <= 0 for p in canon):
        return StepFunction(canon)
    return PiecewisePoly(canon)


def as_step(f: PiecewisePoly) -> StepFunction:
    if isinstance(f, StepFunction):
        return f
    if f.degree > 0:
        raise ValueError("function is not piecewise constant")
    return StepFunction(f.pieces)


# ---------------------------------------------------------------------------
# evaluation and calculus


def _locate(f: PiecewisePoly, t) -> Optional[Piece]:
    i = bisect_right([p.lo for p in f.pieces], t) - 1
    if i >= 0 and f.pieces[i].lo <= t < f.pieces[i].hi:
        return f.pieces[i]
    return None


def evaluate(f: PiecewisePoly, t) -> Fraction:
    """Right-continuous value at ``t`` (0 outside the pieces)."""
    p = _locate(f, Fraction(t))
    return peval(p.coeffs, Fraction(t)) if p else Fraction(0)


def left_limit(f: PiecewisePoly, t) -> Fraction:
    t = Fraction(t)
    for p in f.pieces:
        if p.lo < t <= p.hi:
            return peval(p.coeffs, t)
    return Fraction(0)


def integrate(f: PiecewisePoly, a=None, b=None) -> Fraction:
    """Exact integral over ``[a, b]``; ``None`` means unbounded on that side."""
    if a is not None and b is not None and Fraction(a) > Fraction(b):
        raise ValueError("integrate requires a <= b")
    total = Fraction(0)
    for p in f.pieces:
        lo = p.lo if a is None else max(p.lo, Fraction(a))
        hi = p.hi if b is None else min(p.hi, Fraction(b))
        if lo < hi:
            total += pintegral(p.coeffs, lo, hi)
    return total


def differentiate(f: PiecewisePoly) -> PiecewisePoly:
    """Piecewise formal derivative (jumps are ignored)."""
    return make((p.lo, p.hi, pderiv(p.coeffs)) for p in f.pieces)


def antidifferentiate(f: PiecewisePoly, base=0) -> PiecewisePoly:
    """Continuous antiderivative ``F`` with ``F(base) = 0`` on the support hull.

    ``F`` is constant to the left and right of the support of ``f``; those
    constant tails are not representable with compact support and are
    dropped. They vanish when ``f`` closes (``F`` returns to zero), which is
    the case for every bump and witness in :mod:`riexact.witnesses`.
    """
    if f.degree > MAX_DEGREE - 1:
        raise ValueError("antiderivative of a quadratic leaves the degree-2 family")
    if f.is_zero():
        return f
    base = Fraction(base)
    s0 = f.pieces[0].lo
    offset = -integrate(f, s0, base) if base >= s0 else integrate(f, base, s0)
    pieces = []
    acc = offset  # value of F at the left end of the current piece
    cursor = s0
    for p in f.pieces:
        if p.lo > cursor:
            pieces.append((cursor, p.lo, (acc,)))
        P = pantideriv(p.coeffs)
        shift = acc - peval(P, p.lo)
        pieces.append((p.lo, p.hi, padd(P, (shift,))))
        acc = acc + pintegral(p.coeffs, p.lo, p.hi)
        cursor = p.hi
    return make(pieces)


def common_refinement(*fs: PiecewisePoly):
    """Cells ``(lo, hi, [coeffs of each f])`` over the union of breakpoints."""
    pts = sorted({t for f in fs for t in f.breakpoints})
    cells = []
    for lo, hi in zip(pts, pts[1:]):
        mid = (lo + hi) / 2
        polys = []
        for f in fs:
            p = _locate(f, mid)
            polys.append(p.coeffs if p else ())
        cells.append((lo, hi, polys))
    return cells


def add(f: PiecewisePoly, g: PiecewisePoly) -> PiecewisePoly:
    return make((lo, hi, padd(p, q)) for lo, hi, (p, q) in common_refinement(f, g))


def sub(f: PiecewisePoly, g: PiecewisePoly) -> PiecewisePoly:
    return make((lo, hi, psub(p, q)) for lo, hi, (p, q) in common_refinement(f, g))


def scale(f: PiecewisePoly, c) -> PiecewisePoly:
    c = Fraction(c)
    return make((p.lo, p.hi, pscale(p.coeffs, c)) for p in f.pieces)


def multiply(f: PiecewisePoly, g: PiecewisePoly) -> PiecewisePoly:
    """Pointwise product; the result must stay within degree 2."""
    pieces = [(lo, hi, pmul(p, q)) for lo, hi, (p, q) in common_refinement(f, g)]
    if any(len(c) - 1 > MAX_DEGREE for _, _, c in pieces):
        raise ValueError("product leaves the degree-2 family")
    return make(pieces)


def maximum(f: PiecewisePoly, g: PiecewisePoly) -> StepFunction:
    """Pointwise maximum of two step functions."""
    as_step(f), as_step(g)
    cells = common_refinement(f, g)
    return StepFunction(tuple(
        (lo, hi, (max(peval(p, lo), peval(q, lo)),)) for lo, hi, (p, q) in cells))


def dilate(f: PiecewisePoly, s) -> PiecewisePoly:
    """``D_s f(t) = f(s t)`` for ``s > 0``."""
    s = Fraction(s)
    if s <= 0:
        raise ValueError("dilation factor must be positive")
    return make((p.lo / s, p.hi / s, pcompose_affine(p.coeffs, s, 0)) for p in f.pieces)


def shift(f: PiecewisePoly, d) -> PiecewisePoly:
    """Translate: ``t -> f(t - d)``."""
    d = Fraction(d)
    return make((p.lo + d, p.hi + d, pcompose_affine(p.coeffs, 1, -d)) for p in f.pieces)


def absolute(f: PiecewisePoly) -> PiecewisePoly:
    """``|f|`` with breakpoints refined at sign changes.

    Raises :class:`NeedsEnclosure` if a quadratic piece changes sign at an
    irrational point.
    """
    out = []
    for p in f.pieces:
        cuts = [p.lo]
        roots = quadratic_roots(p.coeffs) or []
        for r in roots:
            if Surd.coerce(p.lo) < r < Surd.coerce(p.hi):
                if not r.is_rational():
                    raise NeedsEnclosure(
                        f"irrational sign change of {p.coeffs} inside [{p.lo}, {p.hi})")
                cuts.append(r.rational_value())
        cuts.append(p.hi)
        cuts = sorted(set(cuts))
        for lo, hi in zip(cuts, cuts[1:]):
            sign = peval(p.coeffs, (lo + hi) / 2)
            out.append((lo, hi, p.coeffs if sign >= 0 else pscale(p.coeffs, -1)))
    return make(out)


def is_nonnegative(f: PiecewisePoly) -> bool:
    """Exact check that ``f >= 0`` on the closure of every piece."""
    return all(poly_min_max(p.coeffs, p.lo, p.hi)[0] >= 0 for p in f.pieces)


def dominates(f: PiecewisePoly, g: PiecewisePoly) -> bool:
    """``f >= g`` almost everywhere (exact)."""
    return all(poly_min_max(psub(p, q), lo, hi)[0] >= 0
               for lo, hi, (p, q) in common_refinement(f, g))


def violation(f: PiecewisePoly, g: PiecewisePoly):
    """First cell where ``f >= g`` fails, or ``None``."""
    for lo, hi, (p, q) in common_refinement(f, g):
        if poly_min_max(psub(p, q), lo, hi)[0] < 0:
            return lo, hi
    return None


def sup_abs(f: PiecewisePoly) -> Fraction:
    """Essential supremum of ``|f|`` (exact; vertices are rational)."""
    best = Fraction(0)
    for p in f.pieces:
        lo, hi = poly_min_max(p.coeffs, p.lo, p.hi)
        best = max(best, -lo, hi)
    return best


# ---------------------------------------------------------------------------
# square roots: geometric means and integrals of sqrt(|g h|)


@dataclass(frozen=True)
class EnclosedStep:
    """Step function whose values are certified enclosures."""

    cells: Tuple[Tuple[Fraction, Fraction, Enclosure], ...]

    def lower(self) -> StepFunction:
        return StepFunction(tuple((lo, hi, (v.lo,)) for lo, hi, v in self.cells))

    def upper(self) -> StepFunction:
        return StepFunction(tuple((lo, hi, (v.hi,)) for lo, hi, v in self.cells))

    @property
    def is_exact(self) -> bool:
        return all(v.is_exact for _, _, v in self.cells)

    def as_step(self) -> StepFunction:
        if not self.is_exact:
            raise NeedsEnclosure("geometric mean has irrational values")
        return self.lower()

    @property
    def max_width(self) -> Fraction:
        return max((v.width for _, _, v in self.cells), default=Fraction(0))


def geometric_mean(g: PiecewisePoly, h: PiecewisePoly, bits: int = DEFAULT_BITS) -> EnclosedStep:
    """``sqrt(g h)`` for nonnegative step functions, exact on perfect squares."""
    g, h = as_step(g), as_step(h)
    if any(v < 0 for v in g.values + h.values):
        raise ValueError("geometric mean needs nonnegative inputs")
    cells = []
    for lo, hi, (p, q) in common_refinement(g, h):
        prod = peval(p, lo) * peval(q, lo)
        if prod == 0:
            continue
        r = exact_root(prod, 2)
        cells.append((lo, hi, Enclosure.exact(r) if r is not None else sqrt_bounds(prod, bits)))
    return EnclosedStep(tuple(cells))


def _sqrt_quadratic_integral(c: Sequence, a: Fraction, b: Fraction, bits: int) -> Enclosure:
    """Certified ``int_a^b sqrt(q(t)) dt`` for ``q >= 0`` of degree <= 2 on [a, b]."""
    c = ptrim(c) + (Fraction(0),) * 3
    C, B, A = c[0], c[1], c[2]
    w = bits + 16
    if A == 0:
        if B == 0:
            return sqrt_bounds(C, w) * (b - a)
        qa, qb = max(C + B * a, Fraction(0)), max(C + B * b, Fraction(0))
        return (power_bounds(qb, Fraction(3, 2), w) - power_bounds(qa, Fraction(3, 2), w)) \
            * Fraction(2, 3) / B
    # q = A x^2 + D with x = t + B/(2A)
    shift_ = B / (2 * A)
    xa, xb = a + shift_, b + shift_
    D = C - B * B / (4 * A)
    if A > 0:
        root_a = sqrt_bounds(A, w)
        if D == 0:
            return root_a * ((xb * abs(xb) - xa * abs(xa)) / 2)
        rho2 = D / A
        if D > 0:
            def prim(x):
                s = sqrt_bounds(x * x + rho2, w)
                return x * s / 2 + rho2 / 2 * (Enclosure.exact(x) + s).log(w)
        else:
            rho2 = -rho2

            def prim(x):
                s = sqrt_bounds(max(x * x - rho2, Fraction(0)), w)
                if x >= 0:
                    lg = (Enclosure.exact(x) + s).log(w)
                else:
                    lg = log_bounds(rho2, w) - (Enclosure.exact(-x) + s).log(w)
                return x * s / 2 - rho2 / 2 * lg
        return root_a * (prim(xb) - prim(xa))
    if D <= 0:
        return Enclosure.exact(0)
    rho2 = D / (-A)
    root_a = sqrt_bounds(-A, w)

    def prim(x):
        s = sqrt_bounds(max(rho2 - x * x, Fraction(0)), w)
        ratio = sqrt_bounds(min(x * x / rho2, Fraction(1)), w)
        ratio = Enclosure(ratio.lo, min(ratio.hi, Fraction(1)))
        angle = ratio.asin(w)
        if x < 0:
            angle = -angle
        return x * s / 2 + rho2 / 2 * angle
    return root_a * (prim(xb) - prim(xa))


def sqrt_product_integral(g: PiecewisePoly, h: PiecewisePoly, a=None, b=None,
                          bits: int = DEFAULT_BITS) -> Enclosure:
    """Certified enclosure of ``int_a^b sqrt(|g(t) h(t)|) dt``.

    The product ``g h`` must have degree <= 2 on every cell (e.g. a step
    function times a quadratic).
    """
    prod = absolute(multiply(g, h))
    total = Enclosure.exact(0)
    for p in prod.pieces:
        lo = p.lo if a is None else max(p.lo, Fraction(a))
        hi = p.hi if b is None else min(p.hi, Fraction(b))
        if lo < hi:
            total = total + _sqrt_quadratic_integral(p.coeffs, lo, hi, bits)
    return total.rounded(bits + 8)


# ---------------------------------------------------------------------------
# JSON


def to_json(f: PiecewisePoly) -> dict:
    return {"pieces": [
        {"lo": fraction_str(p.lo), "hi": fraction_str(p.hi),
         "coeffs": [fraction_str(a) for a in p.coeffs + (Fraction(0),) * (3 - len(p.coeffs))]}
        for p in f.pieces]}


def from_json(doc) -> PiecewisePoly:
    if isinstance(doc, str):
        doc = json.loads(doc)
    return make((parse_fraction(p["lo"]), parse_fraction(p["hi"]),
                 [parse_fraction(a) for a in p["coeffs"]]) for p in doc["pieces"])


def dumps(f: PiecewisePoly) -> str:
    return json.dumps(to_json(f), sort_keys=True)
