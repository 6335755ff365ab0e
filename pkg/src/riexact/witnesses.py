"""Explicit function families: bumps, the Mount-Filip sequence, factorizations
and the optimality witnesses.

Every constructor checks its advertised inequalities exactly before
returning, so a returned object is already a certificate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor
from typing import Dict, List, Optional, Sequence, Tuple

from .enclosure import Enclosure, exact_root, fraction_str, sqrt_bounds
from .exactfun import (
    PiecewisePoly,
    StepFunction,
    absolute,
    add,
    antidifferentiate,
    as_step,
    common_refinement,
    differentiate,
    dilate,
    dominates,
    left_limit,
    make,
    maximum,
    scale,
    shift,
    sup_abs,
    to_json,
    violation,
)
from .rearrange import condexp_T, distribution, maximal_1d, rearrangement


# ---------------------------------------------------------------------------
# bumps


@dataclass(frozen=True)
class BumpTriple:
    """``u`` with its first and second derivatives."""

    u: PiecewisePoly
    u1: PiecewisePoly
    u2: PiecewisePoly
    alpha: Fraction
    family: str = "lan"

    def consistent(self) -> bool:
        return differentiate(self.u) == self.u1 and differentiate(self.u1) == self.u2

    def claims(self) -> Dict[str, bool]:
        """The three bump inequalities, decided exactly."""
        return {
            "level_set": distribution(self.u1, self.alpha, strict=False) >= Fraction(1, 6),
            "sup_u": sup_abs(self.u) <= Fraction(1, 3),
            "sup_u2": sup_abs(self.u2) <= 6 * self.alpha ** 2,
        }

    def to_json(self) -> dict:
        params = {"alpha": fraction_str(self.alpha)} if self.family == "lan" \
            else {"n": str(self.alpha.numerator)}
        return {"family": self.family, "params": params,
                "u": to_json(self.u), "u1": to_json(self.u1), "u2": to_json(self.u2)}


def _bump_period_derivative(alpha: Fraction):
    """``u'`` on one period ``[0, 1/alpha)`` on the grid ``j/(6 alpha)``."""
    h = 1 / (6 * alpha)
    a2 = 6 * alpha * alpha
    return [
        (0, h, (0, a2)),
        (h, 2 * h, (alpha,)),
        (2 * h, 4 * h, (3 * alpha, -a2)),
        (4 * h, 5 * h, (-alpha,)),
        (5 * h, 6 * h, (-6 * alpha, a2)),
    ]


def lan_bump(alpha) -> BumpTriple:
    """``C^1`` bump with ``|u| <= 1/3``, ``|u''| <= 6 alpha^2`` and
    ``|{|u'| >= alpha}| = floor(alpha)/(3 alpha) >= 1/6``.

    One period lives on ``[0, 1/alpha)``; ``floor(alpha)`` periods are laid
    side by side and the function is zero afterwards.
    """
    alpha = Fraction(alpha)
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    period = make(_bump_period_derivative(alpha))
    u1 = make(())
    for k in range(floor(alpha)):
        u1 = add(u1, shift(period, k / alpha))
    u = antidifferentiate(u1, 0)
    u2 = differentiate(u1)
    bump = BumpTriple(u, u1, u2, alpha)
    if not all(bump.claims().values()):
        raise AssertionError(f"bump inequalities fail for alpha={alpha}")
    return bump


def mount_filip(n: int) -> BumpTriple:
    """``u_n`` on ``[0, 2]`` with ``u_n'' = n(chi_(0,1/n) - chi_(1-1/n,1+1/n) + chi_(2-1/n,2))``."""
    if int(n) != n or n < 4:
        raise ValueError("n must be an integer >= 4")
    n = int(n)
    r = Fraction(1, n)
    u2 = StepFunction(((0, r, (n,)), (1 - r, 1 + r, (-n,)), (2 - r, 2, (n,))))
    u1 = antidifferentiate(u2, 0)
    u = antidifferentiate(u1, 0)
    if u(2) != 0 or left_limit(u, 2) != 0 or left_limit(u1, 2) != 0:
        raise AssertionError("mount_filip must close at 2")
    return BumpTriple(u, u1, u2, Fraction(n), family="mount_filip")


# ---------------------------------------------------------------------------
# monotone factorization


def _nonincreasing(f: StepFunction) -> bool:
    vals = [v for _, _, v in f.steps()]
    contiguous = all(a[1] == b[0] for a, b in zip(f.steps(), f.steps()[1:]))
    starts_at_zero = not f.pieces or f.pieces[0].lo == 0
    return contiguous and starts_at_zero and all(x >= y >= 0 for x, y in zip(vals, vals[1:])) \
        and all(v >= 0 for v in vals)


def monotone_factorization(f: StepFunction, u: PiecewisePoly, v: PiecewisePoly):
    """Unit-grid step majorants ``(g, h)`` with ``h <= g`` and ``Tf <= sqrt(g h)``.

    Follows the three moves: ``eta = D_{1/2} u*``, ``gamma = D_{1/2} v*``,
    ``r = T eta``, ``h = T gamma``, ``g = max(r, h)``. The hypothesis
    ``f <= sqrt(eta gamma)`` is checked on every cell of the common
    refinement (products of non-increasing functions are smallest at the
    right end of a cell).
    """
    f = as_step(f)
    if not _nonincreasing(f):
        raise ValueError("f must be a nonnegative non-increasing step function from 0")
    eta = dilate(rearrangement(u).func, Fraction(1, 2))
    gamma = dilate(rearrangement(v).func, Fraction(1, 2))
    for lo, hi, _ in common_refinement(f, eta, gamma):
        c = f(lo)
        if c * c > left_limit(eta, hi) * left_limit(gamma, hi):
            raise ValueError(f"hypothesis f <= sqrt(u* v*) fails on [{lo}, {hi})")
    r, h = condexp_T(eta), condexp_T(gamma)
    g = maximum(r, h)
    tf = condexp_T(f)
    for lo, hi, (cf, cg, ch) in common_refinement(tf, g, h):
        c, a, b = (x[0] if x else Fraction(0) for x in (cf, cg, ch))
        if c * c > a * b:
            raise AssertionError(f"Holder step fails on [{lo}, {hi})")
    return g, h


# ---------------------------------------------------------------------------
# optimality witnesses


@dataclass(frozen=True)
class OptimalityWitness:
    """``eta`` (or ``eta_n``) with its coefficient data and step envelopes."""

    eta: PiecewisePoly
    eta1: PiecewisePoly
    eta2: PiecewisePoly
    a: Tuple[Fraction, ...]
    b: Tuple[Fraction, ...]
    c: Tuple[Fraction, ...]
    g: StepFunction
    h: StepFunction
    f: StepFunction
    n: int = 1
    family: str = "bounded"
    params: Dict[str, str] = field(default_factory=dict)

    @property
    def f_target(self) -> StepFunction:
        """``n D_6 f*``: the certified lower envelope of ``(eta')*``."""
        star = rearrangement(self.f).func
        return as_step(scale(dilate(star, 6), self.n))

    def check(self) -> Dict[str, bool]:
        """The three witness inequalities, each decided exactly."""
        return dict(self._checks)

    @cached_property
    def _checks(self) -> Dict[str, bool]:
        n2 = self.n * self.n
        return {
            "eta_le_h": dominates(self.h, absolute(self.eta)),
            "second_derivative": dominates(scale(self.g, 6 * n2), absolute(self.eta2)),
            "rearranged_derivative": dominates(rearrangement(self.eta1).func, self.f_target),
        }

    def failures(self) -> List[str]:
        return [k for k, ok in self.check().items() if not ok]

    def to_json(self) -> dict:
        seq = {k: [fraction_str(x) for x in getattr(self, k)] for k in "abc"}
        return {"family": self.family, "params": dict(self.params), "n": self.n,
                "eta": to_json(self.eta), **seq}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _steps_on_grid(values: Sequence[Fraction], width: Fraction) -> StepFunction:
    return StepFunction(tuple((k * width, (k + 1) * width, (v,)) for k, v in enumerate(values)))


def admissible(a, b, c) -> Optional[str]:
    """Reason the triple is not admissible, or ``None``."""
    if not (len(a) == len(b) == len(c)) or not a:
        return "sequences must be nonempty and of equal length"
    for k, (ak, bk, ck) in enumerate(zip(a, b, c), 1):
        if min(ak, bk, ck) <= 0:
            return f"entry {k} is not positive"
        if not bk <= ck <= ak:
            return f"ordering b <= c <= a fails at k={k}"
        if ck * ck > ak * bk:
            return f"c^2 <= a b fails at k={k}"
    return None


def bounded_witness(a: Sequence, b: Sequence, c: Sequence) -> OptimalityWitness:
    """``eta = sum_k b_k u_k(t - k + 1)`` with ``u_k = lan_bump(c_k / b_k)``.

    Needs ``b_k <= c_k <= a_k`` and ``c_k^2 <= a_k b_k`` (the second keeps
    ``b_k (c_k/b_k)^2 <= a_k``, which is what bounds ``eta''`` by ``6 g``).
    """
    a, b, c = (tuple(Fraction(x) for x in s) for s in (a, b, c))
    reason = admissible(a, b, c)
    if reason:
        raise ValueError(reason)
    eta1 = make(())
    for k, (bk, ck) in enumerate(zip(b, c)):
        bump = lan_bump(ck / bk)
        eta1 = add(eta1, scale(shift(bump.u1, k), bk))
    eta = antidifferentiate(eta1, 0)
    eta2 = differentiate(eta1)
    w = OptimalityWitness(eta, eta1, eta2, a, b, c,
                          _steps_on_grid(a, Fraction(1)), _steps_on_grid(b, Fraction(1)),
                          _steps_on_grid(c, Fraction(1)), 1, "bounded",
                          {"K": str(len(a))})
    bad = w.failures()
    if bad:
        raise AssertionError(f"bounded witness postconditions fail: {bad}")
    return w


def refined_witness(g: StepFunction, h: StepFunction, n: int) -> OptimalityWitness:
    """``eta_n = sum_k b_k u_k(n t - k + 1)`` on the grid ``k/n``.

    ``a_k``, ``b_k`` are the left limits of ``g``, ``h`` at ``k/n`` (the
    value just inside cell ``k``), ``c_k = sqrt(a_k b_k)`` must be rational
    and ``u_k = lan_bump(c_k / b_k)``. Cells with ``b_k = 0`` carry no bump.
    """
    g, h = as_step(g), as_step(h)
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    for name, fn in (("g", g), ("h", h)):
        if not _nonincreasing(fn):
            raise ValueError(f"{name} must be nonnegative and non-increasing")
        if fn.pieces and fn.pieces[-1].hi > 1:
            raise ValueError(f"{name} must be supported in [0, 1]")
    bad = violation(g, h)
    if bad:
        raise ValueError(f"h <= g fails on {bad}")
    width = Fraction(1, n)
    a = tuple(left_limit(g, k * width) for k in range(1, n + 1))
    b = tuple(left_limit(h, k * width) for k in range(1, n + 1))
    c = []
    eta1 = make(())
    for k, (ak, bk) in enumerate(zip(a, b)):
        if bk == 0:
            c.append(Fraction(0))
            continue
        ck = exact_root(ak * bk, 2)
        if ck is None:
            raise ValueError(f"a_k b_k = {ak * bk} is not a rational square (k={k + 1})")
        c.append(ck)
        bump = lan_bump(ck / bk)
        eta1 = add(eta1, scale(shift(dilate(bump.u1, n), k * width), bk * n))
    eta = antidifferentiate(eta1, 0)
    eta2 = differentiate(eta1)
    w = OptimalityWitness(eta, eta1, eta2, a, b, tuple(c),
                          _steps_on_grid(a, width), _steps_on_grid(b, width),
                          _steps_on_grid(c, width), n, "refined", {"n": str(n)})
    bad = w.failures()
    if bad:
        raise AssertionError(f"refined witness postconditions fail: {bad}")
    return w


# ---------------------------------------------------------------------------
# pointwise interpolation check


def kalamajska_constant(bump: BumpTriple, samples: int = 64, refine: int = 8) -> Enclosure:
    """Upper bound on ``max_x |u'(x)| / sqrt(M u''(x) M u(x))`` over sample points.

    ``M u''`` is exact (step input); ``M u`` is a certified lower bound, so the
    reported constant can only be overestimated. Samples are cell midpoints
    of the support of ``u``.
    """
    lo, hi = bump.u.support_hull
    worst = Fraction(0)
    for j in range(samples):
        x = lo + (hi - lo) * (2 * j + 1) / (2 * samples)
        num = bump.u1(x) ** 2
        if num == 0:
            continue
        den = maximal_1d(bump.u2, x) * maximal_1d(bump.u, x, refine)
        if den == 0:
            raise AssertionError(f"maximal functions vanish at {x} while u' does not")
        worst = max(worst, num / den)
    return sqrt_bounds(worst)
