"""Reproducible experiments: scaling checks, the counterexample table, the
optimality divergence sweep and randomized operator-property suites.

Every ``cmd_*`` function returns a plain dict (rationals as ``"p/q"``,
enclosures as ``{"lo", "hi"}``) with an ``"ok"`` flag; the CLI serializes it
with sorted keys so identical invocations give identical bytes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .enclosure import Enclosure, default_tol, fraction_str, sqrt_bounds
from .exactfun import (
    PiecewisePoly,
    StepFunction,
    absolute,
    add,
    dilate,
    integrate,
    scale,
    sup_abs,
    to_json,
)
from .norms import (
    INF,
    _ext_str,
    LorentzParams,
    NormDescriptor,
    cl_norm_estimate,
    cl_upper,
    derive_lorentz_target,
    lorentz_power,
    norm,
)
from .rearrange import (
    condexp_T,
    condexp_T_grid,
    distribution,
    double_star,
    double_star_sqrt_product,
    hlp_compare,
    maximal_1d,
    maximal_rearranged,
    rearrangement,
)
from .surd import Surd
from .witnesses import BumpTriple, bounded_witness, lan_bump, mount_filip, refined_witness


def _enc(x) -> dict:
    e = Enclosure.coerce(x)
    if e.lo.denominator.bit_length() > 96 or e.hi.denominator.bit_length() > 96:
        e = e.rounded()
    return e.to_json()


# ---------------------------------------------------------------------------
# witness specs


def resolve_witness(witness_id: str) -> BumpTriple:
    """``"lan:<alpha>"`` or ``"mount_filip:<n>"``."""
    family, _, arg = witness_id.partition(":")
    if family == "lan":
        return lan_bump(Fraction(arg or "1"))
    if family in ("mount_filip", "mf"):
        return mount_filip(int(arg or "10"))
    raise ValueError(f"unknown witness {witness_id!r}")


def dilate_triple(w: BumpTriple, lam: Fraction) -> Tuple[PiecewisePoly, PiecewisePoly, PiecewisePoly]:
    """``(D_lam u, (D_lam u)', (D_lam u)'')``."""
    return (dilate(w.u, lam), scale(dilate(w.u1, lam), lam), scale(dilate(w.u2, lam), lam * lam))


# ---------------------------------------------------------------------------
# Gagliardo-Nirenberg ratio


@dataclass
class GNRatioReport:
    witness: str
    B: NormDescriptor
    Y: NormDescriptor
    Z: NormDescriptor
    numerator: Enclosure
    denominator: Enclosure
    lam: Fraction

    @property
    def ratio(self) -> Enclosure:
        return self.numerator / self.denominator

    def to_json(self) -> dict:
        return {"witness": self.witness, "B": self.B.to_json(), "Y": self.Y.to_json(),
                "Z": self.Z.to_json(), "numerator": _enc(self.numerator),
                "denominator": _enc(self.denominator), "ratio": _enc(self.ratio),
                "lambda": fraction_str(self.lam)}


def gn_ratio(w: BumpTriple, witness_id: str, lam, B: NormDescriptor, Y: NormDescriptor,
             Z: NormDescriptor, tol) -> GNRatioReport:
    u, u1, u2 = dilate_triple(w, Fraction(lam))
    num = norm(u1, B, tol)
    den = norm(u2, Y, tol).sqrt() * norm(u, Z, tol).sqrt()
    return GNRatioReport(witness_id, B, Y, Z, num, den, Fraction(lam))


def _lorentz_surd_power(f, params: LorentzParams, L: int) -> Surd:
    """``||f||^L`` as a surd; ``L`` must be a multiple of the numerator of ``p``."""
    p = params.p
    k = Fraction(L) / p
    if k.denominator != 1:
        raise ValueError("exponent not integral")
    return lorentz_power(f, params) ** int(k)


def _gn_power(w: BumpTriple, lam: Fraction, num_params, Yp, Zp, L: int):
    """``(N^L, (Y Z)^(L/2))`` as surds for the dilated witness."""
    u, u1, u2 = dilate_triple(w, lam)
    N = _lorentz_surd_power(u1, num_params, L)
    D = _lorentz_surd_power(u2, Yp, L // 2) * _lorentz_surd_power(u, Zp, L // 2)
    return N, D


def cmd_gn_check(Q, q, R, r, witness: str = "lan:1", dilations: Sequence = (Fraction(1, 8), 1, 8),
                 Pprime=None, pprime=None, tol=None) -> dict:
    """Ratios ``||u'||_{P,p} / (||u''||_{Q,q} ||u||_{R,r})^(1/2)`` across dilations.

    With every fine index finite the invariance at the derived ``P`` is
    checked as an exact identity in the radical ring, and so is the drift
    ``ratio'(lam) = lam^(1/P - 1/P') ratio'(1)`` for a user-supplied ``P'``.
    """
    tol = default_tol() if tol is None else Fraction(tol)
    target = derive_lorentz_target(Q, q, R, r)
    Yp, Zp = LorentzParams(Q, q), LorentzParams(R, r)
    Y, Z = NormDescriptor("lorentz", lorentz=Yp), NormDescriptor("lorentz", lorentz=Zp)
    B = NormDescriptor("lorentz", lorentz=target)
    w = resolve_witness(witness)
    lams = [Fraction(x) for x in dilations]
    rows = [gn_ratio(w, witness, lam, B, Y, Z, tol) for lam in lams]
    out = {"command": "gn-check", "witness": witness,
           "target": {"P": _ext_str(target.P), "p": _ext_str(target.p)},
           "rows": [r_.to_json() for r_ in rows], "checks": {}}
    ok = True
    finite = all(x != INF for x in (target.p, Yp.p, Zp.p))
    ref = lams.index(1) if 1 in lams else 0
    if finite:
        L = lcm(target.p.numerator, (2 * Yp.p).numerator, (2 * Zp.p).numerator)
        L += L % 2  # L/2 must be integral too
        base_N, base_D = _gn_power(w, lams[ref], target, Yp, Zp, L)
        exact = []
        for lam in lams:
            N, D = _gn_power(w, lam, target, Yp, Zp, L)
            exact.append(N * base_D == base_N * D)
        out["checks"]["invariance_exact"] = exact
        out["checks"]["invariance_power"] = L
        ok &= all(exact)
    else:
        hull = rows[ref].ratio
        overlap = [not (r_.ratio.hi < hull.lo or r_.ratio.lo > hull.hi) for r_ in rows]
        out["checks"]["invariance_enclosures_overlap"] = overlap
        ok &= all(overlap)
    if Pprime is not None:
        pp = target.p if pprime is None else pprime
        Bp = LorentzParams(Pprime, pp)
        Bd = NormDescriptor("lorentz", lorentz=Bp)
        drift_rows = [gn_ratio(w, witness, lam, Bd, Y, Z, tol) for lam in lams]
        expo = 1 / target.P - 1 / Bp.P
        drift = {"P_prime": _ext_str(Bp.P), "p_prime": _ext_str(Bp.p),
                 "exponent": fraction_str(expo),
                 "rows": [r_.to_json() for r_ in drift_rows]}
        if all(x != INF for x in (Bp.p, Yp.p, Zp.p)):
            L = lcm(Bp.p.numerator, (2 * Yp.p).numerator, (2 * Zp.p).numerator)
            L += L % 2
            base_N, base_D = _gn_power(w, lams[ref], Bp, Yp, Zp, L)
            lam_ref = lams[ref]
            exact = []
            for lam in lams:
                N, D = _gn_power(w, lam, Bp, Yp, Zp, L)
                # ratio(lam)^L = (lam/lam_ref)^(L expo) ratio(ref)^L
                factor = Surd.power(lam / lam_ref, L * expo)
                exact.append(N * base_D == factor * base_N * D)
            drift["drift_exact"] = exact
            ok &= all(exact)
        out["drift"] = drift
    out["ok"] = bool(ok)
    return out


# ---------------------------------------------------------------------------
# counterexample table


def counterexample_row(n: int, bits: int = 80) -> dict:
    w = mount_filip(n)
    exact = double_star(w.u1, 2)
    lower = 1 - Fraction(2, n)
    prod = double_star_sqrt_product(w.u2, w.u, 2, bits)
    bound = sqrt_bounds(Fraction(4, n), bits)
    checks = {
        "exact_value": exact == 1 - Fraction(1, n),
        "exact_ge_lower_bound": exact >= lower,
        "product_le_bound": prod.hi <= bound.lo,
        "width_ok": prod.width <= Fraction(1, 10 ** 9),
    }
    return {"n": n, "u1_double_star": fraction_str(exact),
            "lower_bound": fraction_str(lower),
            "sqrt_product_double_star": _enc(prod),
            "bound_2_over_sqrt_n": _enc(bound), "checks": checks, "ok": all(checks.values())}


def cmd_counterexample(n_list: Sequence[int]) -> dict:
    """Per-``n`` rows for the Mount-Filip sequence at ``t = 2``."""
    for n in n_list:
        if int(n) != n or n < 4:
            raise ValueError("every n must be an integer >= 4")
    rows = [counterexample_row(int(n)) for n in n_list]
    return {"command": "counterexample", "rows": rows, "ok": all(r["ok"] for r in rows)}


# ---------------------------------------------------------------------------
# optimality divergence


def default_profile(cells: int = 64) -> StepFunction:
    """Artifact-chosen profile ``g = h`` on ``[0, 1]``.

    A rational staircase approximating ``t^(-1/2)`` on the grid ``k/cells``;
    it is non-increasing, so every ``refined_witness`` built from it is
    admissible with ``a = b = c``.
    """
    vals = [Fraction(round(1000 * (cells / k) ** 0.5), 1000) for k in range(1, cells + 1)]
    vals = [max(v, vals[-1]) for v in vals]
    return StepFunction.from_values([Fraction(k, cells) for k in range(cells + 1)], vals)


def optimality_row(w, B: NormDescriptor, Y: NormDescriptor, Z: NormDescriptor, tol) -> dict:
    target = w.f_target
    num = norm(target, B, tol)
    y = norm(w.eta2, Y, tol)
    z = norm(w.h, Z, tol)
    ratio = num / (y.sqrt() * z.sqrt())
    proof_y = norm(scale(w.g, 6 * w.n * w.n), Y, tol)
    proof_ratio = num / (proof_y.sqrt() * z.sqrt())
    return {"n": w.n, "numerator_lower": _enc(num), "eta2_norm": _enc(y), "h_norm": _enc(z),
            "ratio": _enc(ratio), "proof_bound_ratio": _enc(proof_ratio),
            "witness_checks": w.check()}


def cmd_optimality(Q=2, q=2, R=2, r=2, Pprime=None, pprime=1, n_list=(4, 8, 16, 32, 64),
                   g: Optional[StepFunction] = None, h: Optional[StepFunction] = None,
                   tol=None) -> dict:
    """Ratio sequence for ``eta_n`` with target space ``L^{P',p'}``.

    The numerator is the certified lower bound ``||n D_6 f_n*||_{B}`` (the
    rearranged derivative dominates it), the denominator uses the exact
    ``||eta_n''||_Y`` and ``||h_n||_Z`` (which dominates ``||eta_n||_Z``).
    """
    tol = default_tol() if tol is None else Fraction(tol)
    target = derive_lorentz_target(Q, q, R, r)
    Bp = LorentzParams(target.P if Pprime is None else Pprime, pprime)
    B = NormDescriptor("lorentz", lorentz=Bp)
    Y = NormDescriptor("lorentz", lorentz=LorentzParams(Q, q))
    Z = NormDescriptor("lorentz", lorentz=LorentzParams(R, r))
    builtin = g is None and h is None
    if builtin:
        g = h = default_profile()
    elif g is None or h is None:
        raise ValueError("supply both g and h or neither")
    rows = [optimality_row(refined_witness(g, h, n), B, Y, Z, tol) for n in n_list]
    ratios = [Enclosure(Fraction(r_["ratio"]["lo"]), Fraction(r_["ratio"]["hi"])) for r_ in rows]
    growth = [_enc(b / a) for a, b in zip(ratios, ratios[1:])]
    increasing = all(b.lo > a.hi for a, b in zip(ratios, ratios[1:]))
    total_growth = ratios[-1] / ratios[0]
    out = {"command": "optimality", "target": {"P": _ext_str(target.P), "p": _ext_str(target.p)},
           "B": B.to_json(), "profile": "builtin" if builtin else "user",
           "rows": rows, "growth": growth, "total_growth": _enc(total_growth),
           "strictly_increasing": increasing,
           "witness_ok": all(all(r_["witness_checks"].values()) for r_ in rows)}
    out["ok"] = out["witness_ok"]
    return out


def n1_consistency(g: StepFunction, h: StepFunction, Q=2, q=2, R=2, r=2, pprime=1) -> bool:
    """The ``n = 1`` refined row equals the bounded-witness row."""
    target = derive_lorentz_target(Q, q, R, r)
    B = NormDescriptor("lorentz", lorentz=LorentzParams(target.P, pprime))
    Y = NormDescriptor("lorentz", lorentz=LorentzParams(Q, q))
    Z = NormDescriptor("lorentz", lorentz=LorentzParams(R, r))
    w1 = refined_witness(g, h, 1)
    wb = bounded_witness(w1.a, w1.b, w1.c)
    tol = default_tol()
    return optimality_row(w1, B, Y, Z, tol)["ratio"] == optimality_row(wb, B, Y, Z, tol)["ratio"]


# ---------------------------------------------------------------------------
# randomized property suite


GRID = 4          # breakpoints on multiples of 1/GRID
SPAN = 12         # ... inside [0, SPAN]
MAX_PIECES = 12


def random_step(rng: random.Random, nonneg: bool = False) -> StepFunction:
    m = rng.randint(1, MAX_PIECES)
    pts = sorted(rng.sample(range(SPAN * GRID + 1), m + 1))
    lo_v = 0 if nonneg else -8
    vals = []
    for _ in range(m):
        v = 0
        while v == 0:
            v = rng.randint(lo_v, 8)
        vals.append(Fraction(v, rng.choice((1, 2, 3))))
    return StepFunction.from_values([Fraction(p, GRID) for p in pts], vals)


def _random_rational(rng: random.Random, top: Fraction) -> Fraction:
    return top * Fraction(rng.randint(0, 1000), 1000)


@dataclass
class Tally:
    passed: int = 0
    failed: int = 0
    failures: List[dict] = field(default_factory=list)

    def record(self, ok: bool, witness) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 5:
                self.failures.append(witness)

    def to_json(self) -> dict:
        return {"pass": self.passed, "fail": self.failed, "failures": self.failures}


def _sample_times(star: PiecewisePoly) -> List[Fraction]:
    pts = [p for p in star.breakpoints if p > 0]
    mids = [(a + b) / 2 for a, b in zip([Fraction(0)] + pts, pts)]
    return sorted(set(pts + mids + [pts[-1] * 2] if pts else [Fraction(1)]))


def _descriptor_pool() -> List[NormDescriptor]:
    return [NormDescriptor.L1(), NormDescriptor.Linf(),
            NormDescriptor.lorentz_of(2, 1), NormDescriptor.lorentz_of(3, 2)]


def check_one(rng: random.Random, tallies: Dict[str, Tally], rh: List[Fraction]) -> None:
    f = random_step(rng)
    g = random_step(rng)
    fj = to_json(f)
    star = rearrangement(f).func
    # equimeasurability on breakpoint levels and random levels
    top = sup_abs(f)
    levels = sorted({abs(v) for v in f.values} | {Fraction(0)})
    levels += [(a + b) / 2 for a, b in zip(levels, levels[1:])]
    levels += [_random_rational(rng, top + 1) for _ in range(100)]
    tallies["equimeasurability"].record(
        all(distribution(star, lam) == distribution(f, lam) for lam in levels), fj)
    tallies["mass"].record(integrate(star) == integrate(absolute(f)), fj)
    times = _sample_times(star)
    ds = [double_star(f, t) for t in times]
    tallies["double_star_dominates"].record(
        all(d >= star(t) for d, t in zip(ds, times)) and all(a >= b for a, b in zip(ds, ds[1:])), fj)
    fg = add(f, g)
    tallies["subadditive_double_star"].record(
        all(double_star(fg, t) <= double_star(f, t) + double_star(g, t) for t in times), fj)
    tf = condexp_T(f)
    tallies["T_nonexpansive"].record(
        integrate(absolute(tf)) <= integrate(absolute(f)) and sup_abs(tf) <= sup_abs(f), fj)
    coarse, fine = condexp_T_grid(f, 2), tf
    chain = hlp_compare(coarse, fine) and hlp_compare(fine, f)
    tallies["hlp_transitivity"].record(chain and hlp_compare(coarse, f), fj)
    # complex interpolation domination with theta = 1/2
    fp = absolute(f)
    rho = [Fraction(rng.randint(1, 6), rng.randint(1, 6)) for _ in fp.pieces]
    gg = StepFunction(tuple((p.lo, p.hi, (p.coeffs[0] * s,)) for p, s in zip(fp.pieces, rho)))
    hh = StepFunction(tuple((p.lo, p.hi, (p.coeffs[0] / s,)) for p, s in zip(fp.pieces, rho)))
    pool = _descriptor_pool()
    X, Yd = rng.choice(pool), rng.choice(pool)
    upper = cl_upper(gg, hh, Fraction(1, 2), X, Yd)
    est, _, _ = cl_norm_estimate(fp, X, Yd, Fraction(1, 2), iterations=1, start=rho)
    tallies["complex_domination"].record(est.hi <= upper.hi + upper.width + est.width, fj)
    # maximal operator: domination and Riesz-Herz
    xs = [(p.lo + p.hi) / 2 for p in f.pieces][:4]
    tallies["maximal_dominates"].record(all(maximal_1d(f, x) >= abs(f(x)) for x in xs), fj)
    ok = True
    for t in times[:4]:
        mstar = Enclosure.coerce(maximal_rearranged(f, t))
        ratio = mstar / double_star(f, t)
        rh.append(ratio.lo)
        rh.append(ratio.hi)
        ok &= ratio.lo >= 1 and ratio.hi <= 4
    tallies["riesz_herz"].record(ok, fj)


def cmd_property_suite(seed: int = 1, count: int = 100) -> dict:
    """Randomized invariants on seeded random step functions."""
    if count < 1:
        raise ValueError("count must be positive")
    names = ["equimeasurability", "mass", "double_star_dominates", "subadditive_double_star",
             "T_nonexpansive", "hlp_transitivity", "complex_domination", "maximal_dominates",
             "riesz_herz"]
    tallies = {k: Tally() for k in names}
    rh: List[Fraction] = []
    for i in range(count):
        # one generator per task, derived from (seed, index) only
        check_one(random.Random(seed * 1_000_003 + i), tallies, rh)
    out = {"command": "properties", "seed": seed, "count": count,
           "invariants": {k: t.to_json() for k, t in tallies.items()},
           "riesz_herz_ratio": {"min": fraction_str(min(rh)), "max": fraction_str(max(rh)),
                                "max_float": float(max(rh))}}
    out["ok"] = all(t.failed == 0 for t in tallies.values())
    return out


def cmd_kalamajska(alphas: Sequence = (1, 2, 4), samples: int = 64, bound: int = 10) -> dict:
    from .witnesses import kalamajska_constant

    rows = []
    for a in alphas:
        c = kalamajska_constant(lan_bump(a), samples)
        rows.append({"alpha": fraction_str(Fraction(a)), "constant": _enc(c),
                     "ok": c.hi <= bound})
    return {"command": "kalamajska", "bound": bound, "rows": rows,
            "ok": all(r["ok"] for r in rows)}


