"""Rearrangements and the classical operators built on them (one dimension).

* :func:`distribution` and :func:`rearrangement` are exact whenever the level
  sets of ``|f|`` have rational endpoints, which covers step functions,
  piecewise-affine functions and the quadratic bumps of
  :mod:`riexact.witnesses`. Otherwise :class:`NeedsEnclosure` is raised and
  :func:`rearrangement_bounds` supplies certified step envelopes.
* :func:`maximal_1d` is the uncentred Hardy-Littlewood maximal operator over
  intervals; :func:`maximal_distribution` and :func:`maximal_rearranged` are
  exact for step functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Optional, Tuple, Union

from .enclosure import DEFAULT_BITS, Enclosure, NeedsEnclosure
from .exactfun import (
    PiecewisePoly,
    StepFunction,
    _sqrt_quadratic_integral,
    absolute,
    as_step,
    dilate,
    integrate,
    left_limit,
    make,
    multiply,
    padd,
    pantideriv,
    peval,
    poly_min_max,
    pderiv,
    psub,
    ptrim,
    quadratic_roots,
    sup_abs,
)
from .surd import Surd

Value = Union[Fraction, Enclosure]


# ---------------------------------------------------------------------------
# distribution function


def _superlevel_measure(c, lo: Fraction, hi: Fraction, lam: Fraction) -> Surd:
    """Measure of ``{t in [lo, hi) : p(t) > lam}`` as an exact surd."""
    m, M = poly_min_max(c, lo, hi)
    if m > lam:
        return Surd.rational(hi - lo)
    if M <= lam:
        return Surd()
    shifted = psub(c, (lam,))
    roots = quadratic_roots(shifted)
    if roots is None:  # p == lam identically
        return Surd()
    slo, shi = Surd.rational(lo), Surd.rational(hi)
    cuts = [slo] + [r for r in roots if slo < r < shi] + [shi]
    total = Surd()
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) * Fraction(1, 2)
        if peval(shifted, mid).sign() > 0:
            total = total + (b - a)
    return total


def distribution_surd(f: PiecewisePoly, lam, strict: bool = True) -> Surd:
    lam = Fraction(lam)
    if lam < 0:
        raise ValueError("level must be nonnegative")
    if lam == 0 and not strict:
        raise ValueError("{|f| >= 0} has infinite measure")
    total = Surd()
    for p in f.pieces:
        total = total + _superlevel_measure(p.coeffs, p.lo, p.hi, lam)
        total = total + _superlevel_measure(tuple(-a for a in p.coeffs), p.lo, p.hi, lam)
        if not strict and len(p.coeffs) == 1 and abs(p.coeffs[0]) == lam:
            total = total + p.length
    return total


def distribution(f: PiecewisePoly, lam, strict: bool = True,
                 bits: int = DEFAULT_BITS) -> Value:
    """Measure of ``{|f| > lam}`` (or ``>=`` when ``strict`` is false).

    Returns a Fraction when the measure is rational and a certified
    Enclosure otherwise (quadratic pieces crossing ``lam`` irrationally).
    """
    s = distribution_surd(f, lam, strict)
    if s.is_rational():
        return s.rational_value()
    return s.enclosure(bits)


# ---------------------------------------------------------------------------
# non-increasing rearrangement


@dataclass(frozen=True)
class RearrangedFunction:
    """A non-increasing, nonnegative, compactly supported function on (0, inf)."""

    func: PiecewisePoly

    def __post_init__(self):
        f = self.func
        if f.pieces and f.pieces[0].lo != 0:
            raise ValueError("rearrangement must start at 0")
        prev_end = Fraction(0)
        for p in f.pieces:
            if p.lo != prev_end:
                raise ValueError("rearrangement has an interior gap")
            prev_end = p.hi
            d = pderiv(p.coeffs)
            if peval(d, p.lo) > 0 or peval(d, p.hi) > 0:
                raise ValueError(f"increasing on [{p.lo}, {p.hi})")
            if peval(p.coeffs, p.hi) < 0:
                raise ValueError("negative rearrangement")
        for t in f.breakpoints[1:]:
            if left_limit(f, t) < f(t):
                raise ValueError(f"upward jump at {t}")

    def __call__(self, t) -> Fraction:
        return self.func(t)

    @property
    def measure(self) -> Fraction:
        return self.func.pieces[-1].hi if self.func.pieces else Fraction(0)

    def integral(self, t) -> Fraction:
        """``int_0^t f*``."""
        return integrate(self.func, 0, Fraction(t))

    def double_star(self, t) -> Fraction:
        t = Fraction(t)
        if t <= 0:
            raise ValueError("t must be positive")
        return self.integral(t) / t


def _sort_and_pack(f: StepFunction) -> StepFunction:
    mass: Dict[Fraction, Fraction] = {}
    for lo, hi, v in f.steps():
        v = abs(v)
        mass[v] = mass.get(v, Fraction(0)) + (hi - lo)
    pieces, s = [], Fraction(0)
    for v in sorted(mass, reverse=True):
        pieces.append((s, s + mass[v], (v,)))
        s += mass[v]
    return StepFunction(tuple(pieces))


def _monotone_pieces(g: PiecewisePoly):
    """Split a nonnegative function at interior vertices."""
    out = []
    for p in g.pieces:
        cuts = [p.lo, p.hi]
        if len(p.coeffs) == 3:
            v = -p.coeffs[1] / (2 * p.coeffs[2])
            if p.lo < v < p.hi:
                cuts.insert(1, v)
        for lo, hi in zip(cuts, cuts[1:]):
            out.append((lo, hi, p.coeffs))
    return out


def _band_formula(active, C_s_at_top: Fraction, top: Fraction):
    """Polynomial in ``s`` for f* on a band where only ``active`` pieces move.

    ``active`` holds monotone pieces ``(lo, hi, coeffs)``; the distribution
    restricted to the band is ``mu(lam)`` and f* is its inverse.
    """
    degs = {len(c) for _, _, c in active}
    if degs == {2}:
        # mu(lam) = const - S lam with S = sum 1/|a1|
        S = sum((1 / abs(c[1]) for _, _, c in active), Fraction(0))
        # const from mu(top) = C_s_at_top
        const = C_s_at_top + S * top
        return (const / S, -1 / S)
    if degs == {3}:
        levels = {peval(c, -c[1] / (2 * c[2])) for _, _, c in active}
        signs = {c[2] > 0 for _, _, c in active}
        if len(levels) == 1 and len(signs) == 1:
            K = levels.pop()
            sigma = Surd()
            for _, _, c in active:
                sigma = sigma + Surd.power(abs(c[2]), Fraction(-1, 2))
            sig2 = sigma * sigma
            if sig2.is_rational():
                sig2 = sig2.rational_value()
                if signs.pop():
                    # convex: mu = C' - sigma sqrt(lam - K); mu(top) known
                    C = C_s_at_top + (sigma * Surd.sqrt(top - K))
                    if C.is_rational():
                        C = C.rational_value()
                        # lam = K + (C - s)^2 / sigma^2
                        return ptrim([K + C * C / sig2, -2 * C / sig2, 1 / sig2])
                else:
                    # concave: mu = C' + sigma sqrt(K - lam)
                    C = C_s_at_top - (sigma * Surd.sqrt(K - top))
                    if C.is_rational():
                        C = C.rational_value()
                        return ptrim([K - C * C / sig2, 2 * C / sig2, -1 / sig2])
    raise NeedsEnclosure("level band mixes incompatible pieces")


def rearrangement(f: PiecewisePoly) -> RearrangedFunction:
    """Exact non-increasing rearrangement of ``|f|``.

    Step input is sorted and packed. Otherwise ``|f|`` is cut into monotone
    pieces and ``f*`` is rebuilt band by band between consecutive critical
    levels; a band is exact when its active pieces are all affine, or all
    quadratic with a common vertex value and rational combined width.
    """
    if f.degree <= 0:
        return RearrangedFunction(_sort_and_pack(as_step(f)))
    g = absolute(f)
    mono = _monotone_pieces(g)
    levels = {Fraction(0)}
    ranges = []
    for lo, hi, c in mono:
        a, b = peval(c, lo), peval(c, hi)
        levels.update((a, b))
        ranges.append((min(a, b), max(a, b)))
    levels = sorted(levels, reverse=True)
    pieces = []

    def meas(lam, strict=True):
        s = distribution_surd(g, lam, strict)
        if not s.is_rational():
            raise NeedsEnclosure(f"irrational level-set measure at {lam}")
        return s.rational_value()

    for j, top in enumerate(levels):
        if top == 0:
            break
        bottom = levels[j + 1]
        s_top, s_flat_end = meas(top), meas(top, strict=False)
        if s_flat_end > s_top:
            pieces.append((s_top, s_flat_end, (top,)))
        s_bottom = meas(bottom)
        if s_bottom == s_flat_end:
            continue
        active = [(lo, hi, c) for (lo, hi, c), (m, M) in zip(mono, ranges)
                  if m <= bottom and M >= top and m < M]
        coeffs = _band_formula(active, s_flat_end, top)
        if peval(coeffs, s_flat_end) != top or peval(coeffs, s_bottom) != bottom:
            raise NeedsEnclosure("band formula failed its endpoint check")
        pieces.append((s_flat_end, s_bottom, coeffs))
    return RearrangedFunction(make(pieces))


def rearrangement_bounds(f: PiecewisePoly, levels: int = 256,
                         bits: int = DEFAULT_BITS) -> Tuple[StepFunction, StepFunction]:
    """Certified step envelopes ``lower <= f* <= upper``.

    Uses ``levels`` equally spaced levels in ``(0, sup|f|]`` and enclosures of
    the distribution at each; both envelopes converge to f* as the grid
    is refined.
    """
    top = sup_abs(f)
    if top == 0:
        return StepFunction(()), StepFunction(())
    lams = [top * k / levels for k in range(1, levels + 1)]
    encs = [Enclosure.coerce(distribution(f, lam, bits=bits)) for lam in lams]
    total = f.support_measure
    # lower: f* > lam_k on [0, mu(lam_k))
    low_pieces, prev = [], Fraction(0)
    for lam, enc in sorted(zip(lams, encs), key=lambda x: -x[0]):
        end = min(enc.lo, total)
        if end > prev:
            low_pieces.append((prev, end, (lam,)))
            prev = end
    # upper: f* <= lam_k once s >= mu(lam_k); above the first level use top
    up_pieces, prev = [], Fraction(0)
    bounds = [(top, Fraction(0))] + [(lam, enc.hi) for lam, enc in zip(lams, encs)]
    bounds.sort(key=lambda x: -x[0])
    for k in range(len(bounds) - 1):
        lam_hi = bounds[k][0]
        end = min(bounds[k + 1][1], total)
        if end > prev:
            up_pieces.append((prev, end, (lam_hi,)))
            prev = end
    first_level = lams[0]
    if total > prev:
        up_pieces.append((prev, total, (first_level,)))
    return StepFunction(tuple(low_pieces)), StepFunction(tuple(up_pieces))


# ---------------------------------------------------------------------------
# Hardy operator and HLP


def double_star(f: PiecewisePoly, t) -> Fraction:
    """Exact ``f**(t) = (1/t) int_0^t f*``."""
    return rearrangement(f).double_star(t)


def double_star_bounds(f: PiecewisePoly, t, levels: int = 256) -> Enclosure:
    """Certified ``f**(t)``; exact when the rearrangement is."""
    t = Fraction(t)
    if t <= 0:
        raise ValueError("t must be positive")
    try:
        return Enclosure.exact(double_star(f, t))
    except NeedsEnclosure:
        lo, hi = rearrangement_bounds(f, levels)
        return Enclosure(integrate(lo, 0, t) / t, integrate(hi, 0, t) / t)


def double_star_sqrt_product(g: PiecewisePoly, h: PiecewisePoly, t,
                             bits: int = DEFAULT_BITS) -> Enclosure:
    """Certified ``F**(t)`` for ``F = sqrt(|g h|)``.

    Uses ``F* = sqrt((g h)*)`` (the square root is increasing), so the
    rearrangement is done on the degree-2 product and the square root is
    integrated in closed form.
    """
    t = Fraction(t)
    if t <= 0:
        raise ValueError("t must be positive")
    star = rearrangement(multiply(g, h)).func
    total = Enclosure.exact(0)
    for p in star.pieces:
        hi = min(p.hi, t)
        if p.lo < hi:
            total = total + _sqrt_quadratic_integral(p.coeffs, p.lo, hi, bits)
    return (total / t).rounded(bits + 8)


def _cubic_nonneg(c, lo: Fraction, hi: Fraction) -> bool:
    """Exact test of ``p >= 0`` on ``[lo, hi]`` for degree <= 3."""
    c = ptrim(c)
    if peval(c, lo) < 0 or peval(c, hi) < 0:
        return False
    crit = quadratic_roots(pderiv(c)) or []
    slo, shi = Surd.rational(lo), Surd.rational(hi)
    for r in crit:
        if slo < r < shi and peval(c, r).sign() < 0:
            return False
    return True


def hlp_compare(f: PiecewisePoly, g: PiecewisePoly) -> bool:
    """``f**(t) <= g**(t)`` for every ``t > 0`` (decided exactly)."""
    fs, gs = rearrangement(f).func, rearrangement(g).func

    def cumulative(star):
        out, acc = [], Fraction(0)
        for p in star.pieces:
            P = pantideriv(p.coeffs)
            out.append((p.lo, p.hi, padd(P, (acc - peval(P, p.lo),))))
            acc += integrate(star, p.lo, p.hi)
        return out, acc

    F, f_total = cumulative(fs)
    G, g_total = cumulative(gs)
    pts = sorted({Fraction(0)} | {x for lo, hi, _ in F + G for x in (lo, hi)})

    def on(cum, total, lo):
        for a, b, c in cum:
            if a <= lo < b:
                return c
        return (total,)

    for lo, hi in zip(pts, pts[1:]):
        diff = psub(on(G, g_total, lo), on(F, f_total, lo))
        if not _cubic_nonneg(diff, lo, hi):
            return False
    return g_total >= f_total


# ---------------------------------------------------------------------------
# averaging operator T


def condexp_T(f: PiecewisePoly) -> StepFunction:
    """Unit-grid averages ``sum_k (int_{k-1}^k f) chi_[k-1,k)``."""
    hull = f.support_hull
    if hull is None:
        return StepFunction(())
    start, stop = floor(hull[0]), ceil(hull[1])
    return StepFunction(tuple((Fraction(k), Fraction(k + 1), (integrate(f, k, k + 1),))
                              for k in range(start, stop)))


def condexp_T_grid(f: PiecewisePoly, width) -> StepFunction:
    """Averages over the grid ``width * Z`` (``D_{1/w} T D_w``)."""
    width = Fraction(width)
    return as_step(dilate(condexp_T(dilate(f, width)), 1 / width))


# ---------------------------------------------------------------------------
# maximal operator


def _cumulative(g: PiecewisePoly, pts: List[Fraction]) -> List[Fraction]:
    """``int_{-inf}^t g`` at each sorted point ``t``."""
    out, acc, i = [], Fraction(0), 0
    pieces = g.pieces
    for t in pts:
        while i < len(pieces) and pieces[i].hi <= t:
            acc += integrate_piece(pieces[i], pieces[i].lo, pieces[i].hi)
            i += 1
        extra = Fraction(0)
        if i < len(pieces) and pieces[i].lo < t:
            extra = integrate_piece(pieces[i], pieces[i].lo, t)
        out.append(acc + extra)
    return out


def integrate_piece(piece, a: Fraction, b: Fraction) -> Fraction:
    P = pantideriv(piece.coeffs)
    return peval(P, b) - peval(P, a)


@lru_cache(maxsize=256)
def _maximal_grid(g: PiecewisePoly, refine: int):
    pts = set(g.breakpoints)
    if g.degree > 0:
        for p in g.pieces:
            if len(p.coeffs) == 3:
                v = -p.coeffs[1] / (2 * p.coeffs[2])
                if p.lo < v < p.hi:
                    pts.add(v)
            step = p.length / refine
            pts.update(p.lo + k * step for k in range(1, refine))
    pts = sorted(pts)
    return pts, _cumulative(g, pts)


def maximal_1d(f: PiecewisePoly, x, refine: int = 8) -> Fraction:
    """Uncentred maximal function ``Mf(x)`` over intervals containing ``x``.

    For step ``f`` the supremum is attained on intervals with endpoints in
    ``breakpoints + {x}`` (the average is monotone in each endpoint inside a
    cell) and the result is exact. For polynomial pieces the same search is
    run over breakpoints, vertices and ``refine`` subdivisions per piece, so
    the value is a certified lower bound for ``Mf(x)``.
    """
    x = Fraction(x)
    g = absolute(f)
    pts, cum = _maximal_grid(g, refine)
    fx = _cumulative(g, [x])[0]
    lefts = [(p, c) for p, c in zip(pts, cum) if p < x] + [(x, fx)]
    rights = [(x, fx)] + [(p, c) for p, c in zip(pts, cum) if p > x]
    best = max(g(x), left_limit(g, x))
    for a, ca in lefts:
        for b, cb in rights:
            if a < b:
                avg = (cb - ca) / (b - a)
                if avg > best:
                    best = avg
    return best


def _mf_cells(f: PiecewisePoly):
    g = absolute(as_step(f))
    pts = g.breakpoints
    return pts, [g(lo) for lo in pts[:-1]]


def _mf_terms(pts, vals, lam: Fraction):
    """Measure of ``{Mf > lam}`` in partial-fraction form around ``lam``.

    Potentials are linear in the level: ``Phi_i = A_i - lam B_i``. All
    branch decisions are made at the given ``lam``; they only change at
    cell values and interval averages, so the returned ``(const, residues)``
    describe the measure on the whole open interval between consecutive
    such critical levels.
    """
    n = len(vals)
    phi = [(Fraction(0), Fraction(0))]
    for i in range(n):
        w = pts[i + 1] - pts[i]
        A, B = phi[-1]
        phi.append((A + vals[i] * w, B + w))

    def at(v):
        return v[0] - lam * v[1]

    R = [None] * (n + 1)
    R[n] = phi[n]
    for i in range(n - 1, -1, -1):
        R[i] = phi[i] if at(phi[i]) >= at(R[i + 1]) else R[i + 1]
    L = [phi[0]]
    for i in range(1, n + 1):
        L.append(phi[i] if at(phi[i]) <= at(L[-1]) else L[-1])

    const = Fraction(0)
    residues: Dict[Fraction, Fraction] = {}

    def add_pole(p, num):
        # num = alpha + beta * lam over (lam - p)
        alpha, beta = num
        nonlocal const
        const += beta
        r = alpha + beta * p
        if r:
            residues[p] = residues.get(p, Fraction(0)) + r

    # tails: R_0 / lam and (Phi_N - L_N) / lam
    add_pole(Fraction(0), (R[0][0], -R[0][1]))
    add_pole(Fraction(0), (phi[n][0] - L[n][0], -(phi[n][1] - L[n][1])))
    for i in range(1, n + 1):
        w = pts[i] - pts[i - 1]
        c = vals[i - 1]
        if c - lam > 0:
            const += w
        elif c - lam == 0:
            if at(R[i]) - at(L[i - 1]) > 0:
                const += w
        else:
            const += w
            gap = (L[i - 1][0] - R[i][0], -(L[i - 1][1] - R[i][1]))
            if gap[0] + lam * gap[1] > 0:
                # subtract gap / (lam - c)
                add_pole(c, (-gap[0], -gap[1]))
    return const, residues


def _mf_eval(const, residues, lam) -> Fraction:
    return const + sum((r / (lam - p) for p, r in residues.items()), Fraction(0))


def maximal_distribution(f: StepFunction, lam) -> Fraction:
    """Exact measure of ``{Mf > lam}`` for a step function and ``lam > 0``."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("level must be positive")
    pts, vals = _mf_cells(f)
    if not vals:
        return Fraction(0)
    const, residues = _mf_terms(pts, vals, lam)
    if lam in residues:
        raise AssertionError("pole at evaluation level")
    return _mf_eval(const, residues, lam)


def _critical_levels(pts, vals) -> List[Fraction]:
    prefix = [Fraction(0)]
    for i, v in enumerate(vals):
        prefix.append(prefix[-1] + v * (pts[i + 1] - pts[i]))
    out = set(vals)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            out.add((prefix[j] - prefix[i]) / (pts[j] - pts[i]))
    return sorted(v for v in out if v > 0)


def _solve_partial_fraction(const, residues, t, lo, hi, bits) -> Optional[Value]:
    """Root of ``const - t + sum r/(lam - p) = 0`` in ``(lo, hi]``."""
    poles = sorted(residues)
    num = (const - t,)
    for p in poles:
        num = _pmul(num, (-p, Fraction(1)))
    for p in poles:
        term = (residues[p],)
        for q in poles:
            if q != p:
                term = _pmul(term, (-q, Fraction(1)))
        num = padd(num, term)
    num = ptrim(num)
    if not num or len(num) == 1:
        return None
    if len(num) == 2:
        r = -num[0] / num[1]
        return r if lo < r <= hi else None
    if len(num) == 3:
        for r in quadratic_roots(num):
            if Surd.rational(lo) < r <= Surd.rational(hi):
                return r.rational_value() if r.is_rational() else r.enclosure(bits)
        return None
    from sympy import Poly, Rational as SR, symbols

    x = symbols("x")
    poly = Poly([SR(a.numerator, a.denominator) for a in reversed(num)], x)
    for factor, _ in poly.factor_list()[1]:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(factor.all_coeffs())]
        if len(coeffs) == 2:
            r = -coeffs[0] / coeffs[1]
            if lo < r <= hi:
                return r
        elif len(coeffs) == 3:
            for r in quadratic_roots(coeffs):
                if Surd.rational(lo) < r <= Surd.rational(hi):
                    return r.enclosure(bits)
        else:
            for (a, b), _ in factor.intervals(eps=SR(1, 2 ** bits)):
                a, b = Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))
                if lo < b and a <= hi:
                    return Enclosure(a, b)
    return None


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)


def maximal_rearranged(f: StepFunction, t, bits: int = DEFAULT_BITS) -> Value:
    """``(Mf)*(t)`` for a step function, exact when the root is rational.

    The distribution of ``Mf`` is a sum of Moebius functions of the level
    whose shape only changes at cell values and interval averages, so the
    level is located by binary search over those critical values and then
    solved in closed form.
    """
    t = Fraction(t)
    if t <= 0:
        raise ValueError("t must be positive")
    pts, vals = _mf_cells(f)
    crit = _critical_levels(pts, vals) if vals else []
    if not crit:
        return Fraction(0)

    def mu(lam):
        const, res = _mf_terms(pts, vals, lam)
        return _mf_eval(const, res, lam)

    # smallest critical level with mu <= t
    lo_i, hi_i = 0, len(crit) - 1
    if mu(crit[-1]) > t:
        raise AssertionError("distribution of Mf must vanish at its maximum")
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if mu(crit[mid]) <= t:
            hi_i = mid
        else:
            lo_i = mid + 1
    k = lo_i
    upper = crit[k]
    lower = crit[k - 1] if k > 0 else Fraction(0)
    const, res = _mf_terms(pts, vals, (lower + upper) / 2)
    root = _solve_partial_fraction(const, res, t, lower, upper, bits)
    return upper if root is None else root


# ---------------------------------------------------------------------------
# convenience for proofs working on rearranged steps


def step_rearrangement(f: PiecewisePoly) -> StepFunction:
    return as_step(rearrangement(f).func)
