"""Rearrangement-invariant norms evaluated exactly or with certified enclosures.

Lorentz norms of step rearrangements are closed-form sums of rational powers
and are computed in the radical ring :class:`~riexact.surd.Surd`, so two
Lorentz values can be compared for exact equality. Orlicz (Luxemburg) norms
are bracketed by bisection on a certified modular. Calderon-Lozanovskii
product norms get a certified upper bound from an explicit factorization.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from .enclosure import (
    DEFAULT_BITS,
    Diverges,
    Enclosure,
    NeedsEnclosure,
    default_tol,
    exact_root,
    exp_bounds,
    fraction_str,
    log_bounds,
    parse_fraction,
    power_bounds,
    round_down,
    round_up,
)
from .exactfun import (
    PiecewisePoly,
    StepFunction,
    absolute,
    as_step,
    make,
    pantideriv,
    peval,
    ppow,
    quadratic_roots,
    sup_abs,
)
from .rearrange import _monotone_pieces, rearrangement, rearrangement_bounds
from .surd import Surd, smax

INF = math.inf
Extended = Union[Fraction, float]
NormValue = Union[Enclosure, Diverges]


def _ext(x) -> Extended:
    if isinstance(x, float) and math.isinf(x):
        return INF
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return parse_fraction(x)


def _ext_str(x: Extended) -> str:
    return "inf" if x == INF else fraction_str(x)


def _inv(x: Extended) -> Fraction:
    return Fraction(0) if x == INF else 1 / Fraction(x)


# ---------------------------------------------------------------------------
# Lorentz


@dataclass(frozen=True)
class LorentzParams:
    """Indices of ``L^{P,p}``; ``p`` may be ``math.inf``."""

    P: Extended
    p: Extended

    def __post_init__(self):
        P, p = _ext(self.P), _ext(self.p)
        if P == INF or P < 1:
            raise ValueError(f"primary index P={P} must lie in [1, inf)")
        if p != INF and p < 1:
            raise ValueError(f"fine index p={p} must lie in [1, inf]")
        if P == 1 and p != 1:
            raise ValueError("P = 1 is only allowed with p = 1")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "p", p)

    def to_json(self) -> dict:
        return {"P": _ext_str(self.P), "p": _ext_str(self.p)}


def lorentz_power(f: PiecewisePoly, params: LorentzParams) -> Surd:
    """Exact ``||f||_{P,p}^p`` (finite ``p``) as a surd.

    Step pieces use ``c^p (P/p)(b^{p/P} - a^{p/P})``; polynomial pieces need
    an integer ``p`` and are integrated termwise against ``t^{p/P - 1}``.
    """
    P, p = params.P, params.p
    if p == INF:
        raise ValueError("use lorentz_norm for p = inf")
    star = rearrangement(f).func
    gamma = p / P
    total = Surd()
    for piece in star.pieces:
        a, b = piece.lo, piece.hi
        if len(piece.coeffs) == 1:
            c = piece.coeffs[0]
            total = total + Surd.power(c, p) * (Surd.power(b, gamma) - Surd.power(a, gamma)) * (P / p)
            continue
        if p.denominator != 1:
            raise NeedsEnclosure("fractional p with a non-constant rearrangement")
        for j, e in enumerate(ppow(piece.coeffs, int(p))):
            if e:
                k = gamma + j
                total = total + (Surd.power(b, k) - Surd.power(a, k)) * (e / k)
    return total


def _lorentz_sup(star: PiecewisePoly, P: Fraction, bits: int) -> Enclosure:
    """``sup_t t^{1/P} f*(t)`` for a non-increasing piecewise polynomial."""
    inv = 1 / P
    exact: List[Surd] = []
    loose: List[Enclosure] = []
    for piece in star.pieces:
        c = piece.coeffs
        cands = [piece.lo, piece.hi]
        if len(c) == 2:
            tc = -c[0] / (c[1] * (1 + P))
            if piece.lo < tc < piece.hi:
                cands.append(tc)
        elif len(c) == 3:
            # d/dt [t^{1/P} q(t)] = 0  <=>  q/P + t q' = 0
            crit = quadratic_roots((c[0] * inv, c[1] * (inv + 1), c[2] * (inv + 2))) or []
            for r in crit:
                if Surd.rational(piece.lo) < r < Surd.rational(piece.hi):
                    if r.is_rational():
                        cands.append(r.rational_value())
                    else:
                        t = r.enclosure(bits)
                        q = peval(c, t)
                        loose.append(t.power(inv, bits) * q)
                        if piece.lo <= t.lo:
                            exact.append(Surd.power(t.lo, inv) * peval(c, t.lo))
        for t in cands:
            # left limit at the right end
            exact.append(Surd.power(t, inv) * peval(c, t))
    if not exact:
        return Enclosure.exact(0)
    best = smax(exact).enclosure(bits)
    hi = max([best.hi] + [e.hi for e in loose])
    return Enclosure(best.lo, hi)


def _lorentz_exact(f: PiecewisePoly, params: LorentzParams, bits: int) -> Enclosure:
    P, p = params.P, params.p
    if p == INF:
        return _lorentz_sup(rearrangement(f).func, P, bits)
    power = lorentz_power(f, params)
    if power.is_rational():
        v = power.rational_value()
        r = exact_root(v, p.numerator) if p.denominator == 1 else None
        if r is not None:
            return Enclosure.exact(r)
        return power_bounds(v, 1 / p, bits)
    return power.enclosure(bits + 8).power(1 / p, bits)


#: finest envelope resolution tried before giving up on ``tol``
MAX_ENVELOPE_CELLS = 1 << 14


def _step_lorentz(step: PiecewisePoly, params: LorentzParams, bits: int) -> Enclosure:
    """Lorentz norm of a non-increasing step function with plain enclosures."""
    P, p = params.P, params.p
    if p == INF:
        vals = [power_bounds(q.hi, 1 / P, bits) * q.coeffs[0] for q in step.pieces]
        return Enclosure(max((v.lo for v in vals), default=Fraction(0)),
                         max((v.hi for v in vals), default=Fraction(0)))
    gamma = p / P
    total = Enclosure.exact(0)
    for q in step.pieces:
        w = power_bounds(q.hi, gamma, bits) - power_bounds(q.lo, gamma, bits)
        total = total + power_bounds(q.coeffs[0], p, bits) * w
    total = (total * (P / p)).rounded(bits)
    return Enclosure(max(total.lo, Fraction(0)), total.hi).power(1 / p, bits)


def _star_envelopes(star: PiecewisePoly, cells: int):
    """Step functions below and above a non-increasing ``f*``."""
    low, high = [], []
    for q in star.pieces:
        w = q.length / cells
        for k in range(cells):
            a, b = q.lo + k * w, q.lo + (k + 1) * w
            low.append((a, b, (peval(q.coeffs, b),)))
            high.append((a, b, (peval(q.coeffs, a),)))
    return make(low), make(high)


def lorentz_norm(f: PiecewisePoly, params: LorentzParams, tol=None) -> NormValue:
    """Certified ``||f||_{P,p}``; width at most ``tol`` (exact when possible).

    Exact closed forms are used whenever they exist. Otherwise ``f*`` is
    bracketed between step envelopes (on the ``s`` axis when ``f*`` itself
    is exact, on a level grid when it is not) that are refined until the
    width fits ``tol`` or :data:`MAX_ENVELOPE_CELLS` is reached.
    """
    tol = default_tol() if tol is None else Fraction(tol)
    bits = DEFAULT_BITS
    try:
        while True:
            enc = _lorentz_exact(f, params, bits)
            if enc.width <= tol or bits > 4096:
                return enc
            bits *= 2
    except NeedsEnclosure:
        pass
    try:
        star = rearrangement(f).func
    except NeedsEnclosure:
        star = None
    cells = 16
    while True:
        if star is not None:
            lo_f, hi_f = _star_envelopes(star, cells)
        else:
            lo_f, hi_f = rearrangement_bounds(f, cells * 4)
        lo = _step_lorentz(lo_f, params, bits).lo
        hi = _step_lorentz(hi_f, params, bits).hi
        if hi - lo <= tol or cells >= MAX_ENVELOPE_CELLS:
            return Enclosure(lo, hi)
        cells *= 4


# ---------------------------------------------------------------------------
# Orlicz


@dataclass(frozen=True)
class YoungFunction:
    """Parametric Young function.

    ``power``: ``t^alpha``; ``power-log``: ``t^alpha log(1+t)^beta``;
    ``exp-power``: ``exp(t^alpha) - 1``. All need ``alpha >= 1``.
    """

    family: str
    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.family not in ("power", "power-log", "exp-power"):
            raise ValueError(f"unknown Young family {self.family!r}")
        if self.alpha < 1 or self.beta < 0:
            raise ValueError("need alpha >= 1 and beta >= 0")

    @classmethod
    def power(cls, alpha) -> "YoungFunction":
        return cls("power", alpha)

    def __call__(self, x, bits: int = DEFAULT_BITS) -> Enclosure:
        x = Fraction(x)
        if x < 0:
            raise ValueError("Young functions act on [0, inf)")
        if x == 0:
            return Enclosure.exact(0)
        base = power_bounds(x, self.alpha, bits)
        if self.family == "power":
            return base
        if self.family == "power-log":
            if self.beta == 0:
                return base
            return base * log_bounds(1 + x, bits).power(self.beta, bits)
        lo, hi = exp_bounds(base.lo, bits), exp_bounds(base.hi, bits)
        return Enclosure(lo.lo - 1, hi.hi - 1)

    def to_json(self) -> dict:
        return {"family": self.family, "alpha": fraction_str(self.alpha),
                "beta": fraction_str(self.beta)}


def modular(f: PiecewisePoly, phi: YoungFunction, lam, resolution: int = 64,
            bits: int = DEFAULT_BITS) -> Enclosure:
    """Certified ``int phi(|f| / lam)``.

    Constant pieces are exact. On affine pieces ``phi(|f|)`` is convex, so the
    midpoint rule is a lower and the trapezoid rule an upper bound; other
    monotone pieces get lower and upper Riemann sums. Both use
    ``resolution`` cells.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    # phi is increasing: evaluate on outward dyadic roundings to keep sizes small
    def low_phi(x):
        return phi(round_down(x, bits), bits).lo

    def high_phi(x):
        return phi(round_up(x, bits), bits).hi

    total = Enclosure.exact(0)
    for lo, hi, c in _monotone_pieces(absolute(f)):
        if len(c) == 1:
            total = total + phi(abs(c[0]) / lam, bits) * (hi - lo)
            continue
        w = (hi - lo) / resolution
        vals = [abs(peval(c, lo + k * w)) / lam for k in range(resolution + 1)]
        if len(c) == 2:
            mids = (abs(peval(c, lo + (k + Fraction(1, 2)) * w)) / lam for k in range(resolution))
            low = sum((low_phi(v) for v in mids), Fraction(0))
            ends = [high_phi(v) for v in vals]
            high = (sum(ends, Fraction(0)) * 2 - ends[0] - ends[-1]) / 2
        else:
            low = sum((low_phi(min(a, b)) for a, b in zip(vals, vals[1:])), Fraction(0))
            high = sum((high_phi(max(a, b)) for a, b in zip(vals, vals[1:])), Fraction(0))
        total = total + Enclosure(low * w, high * w)
    return total


def orlicz_norm(f: PiecewisePoly, phi: YoungFunction, tol=None) -> NormValue:
    """Certified Luxemburg norm ``inf{lam : int phi(|f|/lam) <= 1}``.

    The returned ``[lo, hi]`` satisfies ``modular(hi) <= 1 < modular(lo)``
    (certified), so it brackets the norm.
    """
    tol = default_tol() if tol is None else Fraction(tol)
    if f.is_zero():
        return Enclosure.exact(0)
    if phi.family == "power" or (phi.family == "power-log" and phi.beta == 0):
        return _lp_norm(f, phi.alpha, tol)
    top = sup_abs(f)
    res, bits = 64, DEFAULT_BITS
    hi = top
    while modular(f, phi, hi, res, bits).hi > 1:
        hi *= 2
    lo = hi / 2
    while modular(f, phi, lo, res, bits).lo <= 1:
        lo /= 2
    stalls = 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        m = modular(f, phi, mid, res, bits)
        if m.hi <= 1:
            hi = mid
        elif m.lo > 1:
            lo = mid
        else:
            stalls += 1
            if stalls > 3:
                break
            res *= 4
            bits += 32
            continue
    return Enclosure(lo, hi)


def _lp_norm(f: PiecewisePoly, alpha: Fraction, tol: Fraction) -> Enclosure:
    """``(int |f|^alpha)^(1/alpha)``, exact whenever the root is rational."""
    return lorentz_norm(f, LorentzParams(alpha, alpha), tol)


# ---------------------------------------------------------------------------
# L1 / Linf


def _abs_integral_surd(f: PiecewisePoly) -> Surd:
    total = Surd()
    for p in f.pieces:
        roots = quadratic_roots(p.coeffs) or []
        slo, shi = Surd.rational(p.lo), Surd.rational(p.hi)
        cuts = [slo] + [r for r in roots if slo < r < shi] + [shi]
        P = pantideriv(p.coeffs)
        for a, b in zip(cuts, cuts[1:]):
            piece = peval(P, b) - peval(P, a)
            sign = peval(p.coeffs, (a + b) * Fraction(1, 2)).sign()
            total = total + (piece if sign >= 0 else -piece)
    return total


def lp_limit_norm(f: PiecewisePoly, which: str) -> Union[Fraction, Enclosure]:
    """Exact ``||f||_1`` or ``||f||_inf``."""
    if which == "L1":
        s = _abs_integral_surd(f)
        return s.rational_value() if s.is_rational() else s.enclosure()
    if which == "Linf":
        return sup_abs(f)
    raise ValueError(f"unknown limit norm {which!r}")


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class NormDescriptor:
    """Tagged r.i. norm: ``L1``, ``Linf``, ``lorentz``, ``orlicz`` or ``cl``."""

    kind: str
    lorentz: Optional[LorentzParams] = None
    young: Optional[YoungFunction] = None
    X: Optional["NormDescriptor"] = None
    Y: Optional["NormDescriptor"] = None
    theta: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in ("L1", "Linf", "lorentz", "orlicz", "cl"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lorentz" and self.lorentz is None:
            raise ValueError("lorentz descriptor needs parameters")
        if self.kind == "orlicz" and self.young is None:
            raise ValueError("orlicz descriptor needs a Young function")
        if self.kind == "cl":
            if self.X is None or self.Y is None or self.theta is None:
                raise ValueError("cl descriptor needs X, Y and theta")
            if self.X.kind == "cl" or self.Y.kind == "cl":
                raise ValueError("nested Calderon-Lozanovskii products are not supported")
            theta = Fraction(self.theta)
            if not 0 < theta < 1:
                raise ValueError("theta must lie in (0, 1)")
            object.__setattr__(self, "theta", theta)

    @classmethod
    def L1(cls) -> "NormDescriptor":
        return cls("L1")

    @classmethod
    def Linf(cls) -> "NormDescriptor":
        return cls("Linf")

    @classmethod
    def lorentz_of(cls, P, p) -> "NormDescriptor":
        return cls("lorentz", lorentz=LorentzParams(P, p))

    @classmethod
    def orlicz_of(cls, phi: YoungFunction) -> "NormDescriptor":
        return cls("orlicz", young=phi)

    @classmethod
    def cl_of(cls, X, Y, theta) -> "NormDescriptor":
        return cls("cl", X=X, Y=Y, theta=Fraction(theta))

    def to_json(self) -> dict:
        if self.kind == "lorentz":
            return {"kind": "lorentz", **self.lorentz.to_json()}
        if self.kind == "orlicz":
            return {"kind": "orlicz", **self.young.to_json()}
        if self.kind == "cl":
            return {"kind": "cl", "X": self.X.to_json(), "Y": self.Y.to_json(),
                    "theta": fraction_str(self.theta)}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, doc) -> "NormDescriptor":
        if isinstance(doc, str):
            doc = json.loads(doc)
        kind = doc["kind"]
        if kind == "lorentz":
            return cls.lorentz_of(_ext(doc["P"]), _ext(doc["p"]))
        if kind == "orlicz":
            return cls.orlicz_of(YoungFunction(doc["family"], parse_fraction(doc.get("alpha", 1)),
                                               parse_fraction(doc.get("beta", 0))))
        if kind == "cl":
            return cls.cl_of(cls.from_json(doc["X"]), cls.from_json(doc["Y"]),
                             parse_fraction(doc["theta"]))
        return cls(kind)

    def label(self) -> str:
        if self.kind == "lorentz":
            return f"L^({_ext_str(self.lorentz.P)},{_ext_str(self.lorentz.p)})"
        if self.kind == "orlicz":
            return f"L^phi[{self.young.family},{self.young.alpha},{self.young.beta}]"
        if self.kind == "cl":
            return f"({self.X.label()})^{self.theta}({self.Y.label()})^{1 - self.theta}"
        return self.kind


def norm(f: PiecewisePoly, desc: NormDescriptor, tol=None) -> NormValue:
    """Evaluate ``||f||`` for any descriptor (a certified upper bound for ``cl``)."""
    if desc.kind in ("L1", "Linf"):
        return Enclosure.coerce(lp_limit_norm(f, desc.kind))
    if desc.kind == "lorentz":
        return lorentz_norm(f, desc.lorentz, tol)
    if desc.kind == "orlicz":
        return orlicz_norm(f, desc.young, tol)
    upper, _, _ = cl_norm_estimate(as_step(rearrangement(f).func), desc.X, desc.Y, desc.theta)
    return upper


# ---------------------------------------------------------------------------
# Calderon-Lozanovskii


def cl_upper(g: PiecewisePoly, h: PiecewisePoly, theta, X: NormDescriptor,
             Y: NormDescriptor, tol=None) -> Enclosure:
    """``||g||_X^theta ||h||_Y^(1-theta)``, an upper bound for ``|g|^theta |h|^(1-theta)``."""
    theta = Fraction(theta)
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    gx, hy = norm(g, X, tol), norm(h, Y, tol)
    if isinstance(gx, Diverges) or isinstance(hy, Diverges):
        raise ValueError("factor norm diverges")
    return gx.power(theta) * hy.power(1 - theta)


@dataclass
class CLSearch:
    """Settings for the coordinate-descent factorization search."""

    iterations: int = 8
    first_step: Fraction = Fraction(1)
    min_step: Fraction = Fraction(1, 64)
    bits: int = DEFAULT_BITS
    tol: Fraction = field(default_factory=default_tol)


def _factor(cells, sig, a: int, b: int):
    g = make((lo, hi, (v * s ** (b - a),)) for (lo, hi, v), s in zip(cells, sig))
    h = make((lo, hi, (v / s ** a,)) for (lo, hi, v), s in zip(cells, sig))
    return g, h


def cl_norm_estimate(f: StepFunction, X: NormDescriptor, Y: NormDescriptor, theta,
                     iterations: int = 8, start: Optional[Sequence[Fraction]] = None,
                     settings: Optional[CLSearch] = None):
    """Upper bound for ``||f||_{X^theta Y^(1-theta)}`` with its factorization.

    Writing ``theta = a/b``, each cell of ``f`` carries a rational weight
    ``sigma`` and the factorization ``g = f sigma^(b-a)``, ``h = f sigma^(-a)``
    keeps ``g^theta h^(1-theta) = f`` exact. Coordinate descent lowers the
    scale-invariant objective ``||g||^theta ||h||^(1-theta)`` (the value of
    the best global rescaling ``(c^(b-a) g, c^(-a) h)``), starting from
    ``sigma = 1`` and, if given, from ``start``. Returns the certified bound
    and a rationally balanced witness pair.
    """
    settings = settings or CLSearch(iterations=iterations)
    theta = Fraction(theta)
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    f = as_step(f)
    if any(v < 0 for v in f.values):
        raise ValueError("f must be nonnegative")
    if f.is_zero():
        return Enclosure.exact(0), f, f
    a, b = theta.numerator, theta.denominator
    cells = f.steps()

    def objective(sig):
        g, h = _factor(cells, sig, a, b)
        gx, hy = norm(g, X, settings.tol), norm(h, Y, settings.tol)
        return gx.power(theta, settings.bits) * hy.power(1 - theta, settings.bits)

    starts = [[Fraction(1)] * len(cells)]
    if start is not None:
        starts.append([Fraction(s) for s in start])
    best_sig, best = None, None
    for sig in starts:
        val = objective(sig)
        if best is None or val.hi < best.hi:
            best_sig, best = list(sig), val
    step = settings.first_step
    for _ in range(settings.iterations):
        improved = False
        for i in range(len(cells)):
            for factor in (1 + step, 1 / (1 + step)):
                trial = list(best_sig)
                trial[i] = trial[i] * factor
                val = objective(trial)
                if val.hi < best.hi:
                    best_sig, best, improved = trial, val, True
        if not improved:
            step /= 2
            if step < settings.min_step:
                break
    g, h = _factor(cells, best_sig, a, b)
    gx, hy = norm(g, X, settings.tol), norm(h, Y, settings.tol)
    # balance: c^b = ||h|| / ||g||, rounded to a rational c
    ratio = hy / gx
    c = exact_root(ratio.lo, b) if ratio.is_exact else None
    if c is None:
        c = power_bounds(ratio.mid, Fraction(1, b), 40).mid
    g_bal = make((p.lo, p.hi, (p.coeffs[0] * c ** (b - a),)) for p in g.pieces)
    h_bal = make((p.lo, p.hi, (p.coeffs[0] / c ** a,)) for p in h.pieces)
    return best, g_bal, h_bal


# ---------------------------------------------------------------------------
# parameter law


def derive_lorentz_target(Q, q, R, r) -> LorentzParams:
    """Harmonic means ``1/P = 1/(2Q) + 1/(2R)``, ``1/p = 1/(2q) + 1/(2r)``."""
    Q, q, R, r = _ext(Q), _ext(q), _ext(R), _ext(r)
    for name, v in (("Q", Q), ("R", R)):
        if v == INF or v <= 1:
            raise ValueError(f"{name} must lie in (1, inf)")
    for name, v in (("q", q), ("r", r)):
        if v != INF and v < 1:
            raise ValueError(f"{name} must lie in [1, inf]")
    inv_P = (_inv(Q) + _inv(R)) / 2
    inv_p = (_inv(q) + _inv(r)) / 2
    return LorentzParams(1 / inv_P, INF if inv_p == 0 else 1 / inv_p)


def dilation_exponent(params: LorentzParams) -> Fraction:
    """``||D_lam f||_{P,p} = lam^(-1/P) ||f||_{P,p}``."""
    return -1 / params.P
