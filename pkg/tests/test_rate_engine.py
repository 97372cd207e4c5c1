import math

import numpy as np
import pytest

from relaylab import fading, numerics, rate_engine
from relaylab.numerics import exp_integral_e1 as E1

# Oracle values computed from the closed forms below (frozen):
#   single-user broadcasting rate at Ps = 1:
#     2 (E1(s0) - E1(1)) - (e^-s0 - e^-1), s0 = 2/(1+sqrt 5)
SU_BROADCAST_PS1 = 0.2666526093256564
#   cumulative layered rate of the single-user allocation at s = 1, Ps = 1:
#     2 log(1/s0) - (1 - s0)
SU_LAYERED_AT_1 = 0.5804576388691017


def su_broadcast_analytic(ps):
    s0 = 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * ps))
    return 2.0 * (E1(s0) - E1(1.0)) - (math.exp(-s0) - math.exp(-1.0))


def test_frozen_su_constant_matches_analytic():
    assert su_broadcast_analytic(1.0) == pytest.approx(SU_BROADCAST_PS1, abs=1e-13)


def test_optimal_allocation_rayleigh_reduction():
    alloc = rate_engine.optimal_allocation(fading.rayleigh_model(), 1.0)
    assert alloc.x0 == pytest.approx(0.618034, abs=1e-6)
    assert alloc.x1 == pytest.approx(1.0, abs=1e-9)
    s = np.linspace(alloc.x0 + 1e-6, alloc.x1 - 1e-6, 100)
    assert np.allclose(alloc.I(s), (1.0 - s) / s ** 2, atol=1e-9)


def test_optimal_allocation_joint_reduction():
    for ps in (1.0, 10.0):
        alloc = rate_engine.optimal_allocation(fading.joint_ub_model(), ps)
        ref = fading.alloc_joint_opt(ps)
        assert alloc.x0 == pytest.approx(ref.x0, abs=1e-9)
        assert alloc.x1 == pytest.approx(ref.x1, abs=1e-9)
        s = np.linspace(alloc.x0 + 1e-6, alloc.x1 - 1e-6, 100)
        assert np.allclose(alloc.I(s), ref.I(s), atol=1e-8)


def test_optimal_allocation_support_collapses():
    tiny = rate_engine.optimal_allocation(fading.rayleigh_model(), 1e-6)
    assert tiny.x1 - tiny.x0 == pytest.approx(0.0, abs=1e-3)
    assert tiny.x1 == pytest.approx(1.0, abs=1e-5)


def test_broadcast_rate_matches_analytic():
    dist = fading.rayleigh_model()
    alloc = fading.alloc_single_user_opt(1.0)
    rate = rate_engine.broadcast_rate(dist, alloc)
    assert rate == pytest.approx(SU_BROADCAST_PS1, abs=1e-9)


def test_broadcast_rate_zero_alloc():
    assert rate_engine.broadcast_rate(fading.rayleigh_model(), fading.alloc_zero()) == 0.0


def test_closed_and_direct_routes_agree():
    cases = [
        (fading.rayleigh_model(), 1.0),
        (fading.rayleigh_model(), 10.0),
        (fading.joint_ub_model(), 1.0),
        (fading.joint_ub_model(), 100.0),
        (fading.strongest_model(), 10.0),
    ]
    for dist, ps in cases:
        alloc = rate_engine.optimal_allocation(dist, ps)
        direct = rate_engine.broadcast_rate(dist, alloc)
        closed = rate_engine.broadcast_rate_closed(dist, ps)
        assert direct == pytest.approx(closed, abs=1e-6)


def test_broadcast_rate_closed_rayleigh():
    for ps in (0.5, 1.0, 10.0):
        assert rate_engine.broadcast_rate_closed(fading.rayleigh_model(), ps) == \
            pytest.approx(su_broadcast_analytic(ps), abs=1e-8)


def test_broadcast_rate_closed_joint_ps1():
    # g(s) = s e^-s - e^-s - 3 E1(s), bound = g(phi) - g(1)
    phi = fading.GOLDEN_RATIO
    g = lambda s: s * math.exp(-s) - math.exp(-s) - 3.0 * E1(s)
    expected = g(phi) - g(1.0)
    assert expected == pytest.approx(0.5285036, abs=2e-7)
    got = rate_engine.broadcast_rate_closed(fading.joint_ub_model(), 1.0)
    assert got == pytest.approx(expected, abs=1e-3)


def test_outage_rate_closed_form_thresholds():
    dist = fading.rayleigh_model()
    for ps in (0.5, 1.0, 10.0, 100.0):
        res = rate_engine.outage_rate(dist, ps)
        w = numerics.lambert_w0(ps)
        u_star = (ps - w) / (w * ps)
        assert res.threshold == pytest.approx(u_star, rel=1e-8)
        assert res.rate == pytest.approx(math.exp(-u_star) * math.log1p(u_star * ps),
                                         rel=1e-10)


def test_outage_rate_examples():
    res = rate_engine.outage_rate(fading.rayleigh_model(), 1.0)
    assert res.threshold == pytest.approx(0.7632228, abs=1e-6)
    assert res.rate == pytest.approx(0.2643804, abs=1e-6)
    tiny = rate_engine.outage_rate(fading.rayleigh_model(), 1e-6)
    assert tiny.rate < 1e-5


def test_outage_rate_vs_brute_force_grid():
    dist = fading.joint_ub_model()
    ps = 100.0
    res = rate_engine.outage_rate(dist, ps)
    grid = np.geomspace(1e-6, 1e3, 10 ** 6)
    vals = dist.sf(grid) * np.log1p(grid * ps)
    assert res.rate == pytest.approx(float(vals.max()), abs=1e-6)
    assert res.rate >= float(vals.max()) - 1e-12


def test_layered_rate_examples():
    alloc = fading.alloc_single_user_opt(1.0)
    assert rate_engine.layered_rate(alloc, alloc.x0) == pytest.approx(0.0, abs=1e-12)
    assert rate_engine.layered_rate(alloc, 0.1) == 0.0
    assert rate_engine.layered_rate(alloc, 1.0) == pytest.approx(SU_LAYERED_AT_1, abs=1e-7)
    # saturation beyond the support
    joint = fading.alloc_joint_opt(1.0)
    top = rate_engine.layered_rate(joint, joint.x1)
    assert rate_engine.layered_rate(joint, 1e9) == pytest.approx(top, abs=1e-12)


def test_layered_rate_monotone():
    alloc = fading.alloc_joint_opt(10.0)
    s = np.linspace(0.0, alloc.x1 * 1.5, 500)
    r = rate_engine.layered_rate_fn(alloc)(s)
    assert np.all(np.diff(r) >= -1e-12)
    assert r[0] == 0.0


def test_layered_rate_table_matches_quadrature():
    alloc = fading.alloc_joint_opt(10.0)
    for s in (alloc.x0 + 0.05, 1.0, alloc.x1):
        direct = numerics.integrate(
            lambda u: u * float(alloc.rho(u)) / (1.0 + u * float(alloc.I(u))),
            alloc.x0, s, abs_tol=1e-11)
        assert rate_engine.layered_rate(alloc, s) == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("dist_fn,ps", [
    (fading.rayleigh_model, 1.0),
    (fading.rayleigh_model, 10.0),
    (fading.joint_ub_model, 10.0),
    (fading.strongest_model, 10.0),
])
def test_expected_layered_rate_equals_broadcast_rate(dist_fn, ps):
    # E_F[R(s)] computed against the density equals int (1 - F) dR
    dist = dist_fn()
    alloc = rate_engine.optimal_allocation(dist, ps)
    rate_fn = rate_engine.layered_rate_fn(alloc)
    expect = numerics.integrate(
        lambda s: float(dist.pdf(s)) * float(rate_fn(s)), 0.0, math.inf,
        abs_tol=1e-10)
    direct = rate_engine.broadcast_rate(dist, alloc)
    assert expect == pytest.approx(direct, abs=1e-6)


def test_layering_dominates_single_level():
    for dist_fn in (fading.rayleigh_model, fading.joint_ub_model,
                    fading.strongest_model):
        for ps in (1.0, 10.0, 100.0):
            dist = dist_fn()
            assert rate_engine.broadcast_rate_closed(dist, ps) >= \
                rate_engine.outage_rate(dist, ps).rate - 1e-9
