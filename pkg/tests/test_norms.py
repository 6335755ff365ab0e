import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from riexact.enclosure import Enclosure, log_bounds
from riexact.exactfun import StepFunction, dilate, make, scale
from riexact.norms import (
    INF,
    LorentzParams,
    NormDescriptor,
    YoungFunction,
    cl_norm_estimate,
    cl_upper,
    derive_lorentz_target,
    lorentz_norm,
    lorentz_power,
    lp_limit_norm,
    modular,
    norm,
    orlicz_norm,
)
from riexact.surd import Surd
from riexact.witnesses import lan_bump
from strategies import steps

F = Fraction
chi = StepFunction.indicator(0, 1)
two_one = StepFunction.from_values([0, 1, 4], [2, 1])


def _val(x):
    return Enclosure.coerce(x)


def _overlap(a, b):
    a, b = _val(a), _val(b)
    return not (a.hi < b.lo or a.lo > b.hi)


def exact(x):
    return Enclosure.exact(F(x))


def test_lorentz_examples():
    assert lorentz_norm(chi, LorentzParams(2, 2)) == exact(1)
    assert lorentz_norm(two_one, LorentzParams(2, 1)) == exact(6)
    assert lorentz_norm(two_one, LorentzParams(2, INF)) == exact(2)


def test_lorentz_params_validate():
    with pytest.raises(ValueError):
        LorentzParams(1, 2)
    with pytest.raises(ValueError):
        LorentzParams(2, F(1, 2))
    assert LorentzParams(1, 1).P == 1


def test_lorentz_diagonal_matches_lebesgue():
    f = make([(0, 1, (0, 1)), (1, 3, (1,))])
    # ||f||_2^2 = 1/3 + 2
    assert lorentz_power(f, LorentzParams(2, 2)) == Surd.rational(F(7, 3))


def test_lorentz_quadratic_envelope_brackets():
    u = lan_bump(1).u
    enc = _val(lorentz_norm(u, LorentzParams(F(3, 2), F(3, 2)), tol=F(1, 10 ** 4)))
    assert enc.width <= F(1, 10 ** 4)
    # independent quadrature of (int |u|^(3/2))^(2/3): 0.1885035771...
    assert enc.contains(F(1885035771, 10 ** 10))


@given(steps(), st.fractions(min_value=F(1, 4), max_value=8, max_denominator=4),
       st.sampled_from([(2, 1), (3, 2), (F(3, 2), 4), (2, INF)]))
@settings(max_examples=40, deadline=None)
def test_lorentz_dilation_and_homogeneity(f, lam, pp):
    params = LorentzParams(*pp)
    base = _val(lorentz_norm(f, params))
    dil = _val(lorentz_norm(dilate(f, lam), params))
    factor = Enclosure.exact(lam).power(-1 / params.P)
    assert _overlap(dil, base * factor)
    assert _overlap(lorentz_norm(scale(f, -3), params), base * 3)


def test_orlicz_examples():
    assert orlicz_norm(StepFunction.indicator(0, 1, 2), YoungFunction.power(2)) == exact(2)
    assert orlicz_norm(StepFunction.indicator(0, 3), YoungFunction.power(1)) == exact(3)
    enc = orlicz_norm(chi, YoungFunction("exp-power", 1), tol=F(1, 10 ** 9))
    target = log_bounds(2).reciprocal()
    assert enc.width <= F(1, 10 ** 9)
    assert not (enc.hi < target.lo or enc.lo > target.hi)


def test_orlicz_bracketing_on_affine():
    f = make([(0, 1, (1, 1))])
    phi = YoungFunction("power-log", 1, 1)
    enc = orlicz_norm(f, phi, tol=F(1, 10 ** 4))
    fine = 64 * 4 ** 3  # finest resolution the solver may reach
    assert modular(f, phi, enc.hi, fine).hi <= 1
    assert modular(f, phi, enc.lo, fine).lo > 1


def test_limit_norms():
    assert lp_limit_norm(lan_bump(1).u, "Linf") == F(1, 3)
    assert lp_limit_norm(lan_bump(2).u2, "Linf") == 24
    assert lp_limit_norm(StepFunction.from_values([0, 1, 3], [2, 1]), "L1") == 4


def test_cl_examples():
    L1, Linf = NormDescriptor.L1(), NormDescriptor.Linf()
    est, g, h = cl_norm_estimate(StepFunction.indicator(0, 4), L1, Linf, F(1, 2))
    assert est == Enclosure.exact(2)
    assert g == StepFunction.indicator(0, 4, F(1, 2)) and h == StepFunction.indicator(0, 4, 2)
    est, _, _ = cl_norm_estimate(StepFunction.from_values([0, 1, 2], [2, 1]), L1, L1, F(1, 2))
    assert est.lo <= 3 <= est.hi <= 3 + F(1, 10 ** 20)
    assert cl_upper(StepFunction.indicator(0, 1, 4), chi, F(1, 2), L1, L1).contains(2)
    X = NormDescriptor.lorentz_of(2, 1)
    est, _, _ = cl_norm_estimate(chi, X, X, F(1, 3))
    assert est.contains(2)


@given(steps(nonneg=True), st.sampled_from([F(1, 2), F(1, 3), F(2, 3)]))
@settings(max_examples=15, deadline=None)
def test_cl_diagonal_consistency(f, theta):
    X = NormDescriptor.lorentz_of(3, 2)
    est, _, _ = cl_norm_estimate(f, X, X, theta, iterations=2)
    direct = _val(norm(f, X))
    assert est.lo <= direct.hi + direct.width and direct.lo <= est.hi + est.width


def test_derive_target():
    assert derive_lorentz_target(2, 1, 2, "inf") == LorentzParams(2, 2)
    assert derive_lorentz_target(2, 2, 2, 2) == LorentzParams(2, 2)
    assert derive_lorentz_target(2, 2, 6, 2) == LorentzParams(3, 2)
    with pytest.raises(ValueError):
        derive_lorentz_target(1, 1, 2, 2)


def test_descriptor_json_round_trip():
    descs = [NormDescriptor.L1(), NormDescriptor.lorentz_of(F(3, 2), "inf"),
             NormDescriptor.orlicz_of(YoungFunction("power-log", 2, F(1, 2))),
             NormDescriptor.cl_of(NormDescriptor.L1(), NormDescriptor.Linf(), F(1, 3))]
    for d in descs:
        doc = json.loads(json.dumps(d.to_json()))
        assert NormDescriptor.from_json(doc) == d
    with pytest.raises(ValueError):
        NormDescriptor.cl_of(descs[3], descs[0], F(1, 2))
