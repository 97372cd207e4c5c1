import math

import numpy as np
import pytest
from scipy.optimize import brentq

from relaylab import af, bounds, cf, fading, oracle, rate_engine
from relaylab.af import SessionSchedule
from relaylab.fading import FadingPair, PowerConfig


def cfg_nb(ps, pr):
    return PowerConfig(ps, pr, "narrow_band")


def cfg_wb(ps, pr):
    return PowerConfig(ps, pr, "wide_band")


# ---------------------------------------------------------------------------
# naive CF
# ---------------------------------------------------------------------------

def test_naive_sigma2_examples():
    pair = FadingPair(1.0, 1.0)
    assert cf.naive_sigma2(pair, cfg_nb(1.0, 1.0)) == pytest.approx(1.5, rel=1e-12)
    wb = cf.naive_sigma2(pair, cfg_wb(1.0, 1.0))
    assert wb == pytest.approx(3.0 / (2.0 * (math.e - 1.0)), rel=1e-12)
    assert wb == pytest.approx(0.8729650603, abs=1e-9)
    assert cf.naive_sigma2(pair, cfg_nb(1.0, 1e9)) < 1e-8
    assert cf.naive_sigma2(pair, cfg_wb(1.0, 50.0)) < 1e-20
    with pytest.raises(ValueError):
        cf.naive_sigma2(pair, cfg_nb(1.0, 0.0))


def test_naive_gain_examples():
    pair = FadingPair(1.0, 1.0)
    nb = cf.naive_gain(pair, cfg_nb(1.0, 1.0))
    assert nb == pytest.approx(1.0 + 1.0 / 2.5, rel=1e-12)
    wb = cf.naive_gain(pair, cfg_wb(1.0, 1.0))
    assert wb == pytest.approx(1.5339127895, abs=1e-9)
    assert wb >= nb
    # Pr -> inf gives coherent combining
    assert cf.naive_gain(pair, cfg_nb(1.0, 1e12)) == pytest.approx(2.0, abs=1e-9)


def test_naive_gain_rational_form_identity():
    # the sigma-based gain equals the rational closed form
    rng = np.random.default_rng(17)
    for _ in range(1000):
        s1, s2 = rng.exponential(size=2)
        ps, pr = rng.uniform(0.2, 30.0, size=2)
        cfg = cfg_nb(ps, pr)
        direct = cf.naive_gain(FadingPair(s1, s2), cfg)
        rational = s2 + s1 * (1 + s2 * ps) * pr / ((1 + pr) * (1 + s2 * ps) + s1 * ps)
        assert direct == pytest.approx(rational, rel=1e-10)


def test_naive_gain_wb_dominates_nb():
    rng = np.random.default_rng(4)
    s1 = rng.exponential(size=200)
    s2 = rng.exponential(size=200)
    for pr in (0.2, 1.0, 5.0):
        nb = cf.naive_gains(s1, s2, cfg_nb(10.0, pr))
        wb = cf.naive_gains(s1, s2, cfg_wb(10.0, pr))
        assert np.all(wb >= nb - 1e-12)
        assert np.all(wb <= s1 + s2 + 1e-12)
        assert np.all(nb >= np.minimum(s1, s2) - 1e-12)


@pytest.mark.parametrize("mode,pr", [("narrow_band", 10.0),
                                     ("narrow_band", 2.5),
                                     ("wide_band", 2.0)])
def test_naive_distribution_against_quadrature(mode, pr):
    cfg = PowerConfig(10.0, pr, mode)
    dist = cf.naive_distribution(cfg)
    budget = pr if mode == "narrow_band" else math.expm1(pr)
    for u in (0.05, 0.2, budget / 10.0 - 1e-9, budget / 10.0 + 1e-9, 1.0, 3.0, 8.0):
        if u <= 0:
            continue
        assert float(dist.cdf(u)) == pytest.approx(
            cf._cdf_by_quadrature(u, 10.0, budget), abs=1e-9)


def test_naive_distribution_branch_continuity():
    cfg = cfg_nb(10.0, 10.0)
    dist = cf.naive_distribution(cfg)
    b = cfg.pr / cfg.ps
    assert float(dist.cdf(b - 1e-10)) == pytest.approx(float(dist.cdf(b + 1e-10)),
                                                       abs=1e-8)
    assert float(dist.cdf(0.0)) == 0.0
    u = np.geomspace(1e-3, 40.0, 300)
    c = dist.cdf(u)
    assert np.all(np.diff(c) >= -1e-10)
    assert float(dist.cdf(80.0)) == pytest.approx(1.0, abs=1e-12)


def test_naive_distribution_pdf_consistency():
    from relaylab import numerics
    dist = cf.naive_distribution(cfg_nb(10.0, 10.0))
    for a, b in [(0.1, 0.6), (0.6, 1.01), (1.2, 4.0)]:
        mass = numerics.integrate(lambda x: float(dist.pdf(x)), a, b,
                                  abs_tol=1e-10)
        assert mass == pytest.approx(float(dist.cdf(b) - dist.cdf(a)), abs=1e-6)


def test_naive_distribution_ks():
    cfg = cfg_nb(10.0, 10.0)
    dist = cf.naive_distribution(cfg)
    emp = oracle.empirical_distribution(cf.naive_gains,
                                        oracle.SampleConfig(20000, 29), cfg)
    assert emp.ks_distance(dist) < 0.015
    wb = cfg_wb(10.0, 2.0)
    emp2 = oracle.empirical_distribution(cf.naive_gains,
                                         oracle.SampleConfig(20000, 30), wb)
    assert emp2.ks_distance(cf.naive_distribution(wb)) < 0.015


def test_naive_rates_ordering():
    cfg = cfg_nb(10.0, 10.0)
    rates = cf.naive_rates(cfg)
    assert rates.broadcast >= rates.outage - 1e-9
    assert rates.broadcast <= bounds.broadcast_ub(10.0) + 1e-6
    # CF beats naive AF at matched configuration
    assert rates.broadcast >= af.naive_rates(cfg).broadcast - 1e-9
    # Pr -> 0 recovers the no-cooperation broadcasting rate
    low = cf.naive_rates(cfg_nb(1.0, 1e-5))
    assert low.broadcast == pytest.approx(bounds.broadcast_lb(1.0), abs=1e-3)


# ---------------------------------------------------------------------------
# separate preprocessing
# ---------------------------------------------------------------------------

def test_sep_gain_reductions():
    cfg = cfg_nb(10.0, 3.0)
    pair = FadingPair(1.5, 0.7)
    full = fading.alloc_full_interference(cfg.ps)
    # with I = Ps nothing is stripped: same as a naive session toward the
    # stronger user
    naive_equllyiv = cf.naive_gain(FadingPair(pair.s_min, pair.s_max), cfg)
    assert cf.sep_gain(pair, full, cfg) == pytest.approx(naive_equllyiv, rel=1e-12)
    zero = fading.alloc_zero()
    assert cf.sep_gain(pair, zero, cfg) == pytest.approx(
        pair.s_max + pair.s_min * cfg.pr / (1.0 + cfg.pr), rel=1e-12)


def test_sep_gain_example():
    alloc = fading.alloc_joint_opt(1.0)
    got = cf.sep_gain(FadingPair(2.0, 1.0), alloc, cfg_nb(1.0, 1.0))
    assert got == pytest.approx(2.0 + 3.0 / 7.0, rel=1e-12)
    assert got == pytest.approx(2.428571, abs=1e-6)
    # symmetric in the pair (roles are decided by ordering)
    assert cf.sep_gain(FadingPair(1.0, 2.0), alloc, cfg_nb(1.0, 1.0)) == got


# ---------------------------------------------------------------------------
# multi-session successive refinement
# ---------------------------------------------------------------------------

def test_step_reduces_to_single_session():
    rng = np.random.default_rng(23)
    alloc = fading.alloc_joint_opt(10.0)
    for _ in range(200):
        s1, s2 = rng.exponential(size=2)
        pr = rng.uniform(0.1, 10.0)
        pair = FadingPair(s1, s2)
        state0 = cf.CompressionState(sigma2_1=1e12, sigma2_2=1e12, k=0,
                                     s_common=pair.s_min)
        state1 = cf.multisession_step(state0, pair, alloc, pr, pr)
        i_c = float(alloc.I(pair.s_min))
        # fresh-description variance of the weaker user's forwarding
        s_mx, s_mn = pair.s_max, pair.s_min
        sigma_expected = (1 + s_mn * i_c + s_mx * i_c) / (pr * (1 + s_mx * i_c))
        got = state1.sigma2_2 if s1 >= s2 else state1.sigma2_1
        assert got == pytest.approx(sigma_expected, rel=1e-6)
        # and the stronger user's gain matches the one-shot formula
        strong_gain = state1.s_a if s1 >= s2 else state1.s_b
        assert strong_gain == pytest.approx(cf.sep_gain(pair, alloc, cfg_nb(10.0, pr)),
                                            rel=1e-6)


def test_step_zero_power_is_fixed_point():
    pair = FadingPair(1.2, 0.8)
    alloc = fading.alloc_joint_opt(10.0)
    state0 = cf.CompressionState(sigma2_1=2.0, sigma2_2=3.0, k=1,
                                 s_common=0.8, s_a=1.4, s_b=1.1)
    state1 = cf.multisession_step(state0, pair, alloc, 0.0, 0.0)
    assert state1.sigma2_1 == pytest.approx(2.0, rel=1e-12)
    assert state1.sigma2_2 == pytest.approx(3.0, rel=1e-12)
    assert state1.k == 2


def test_two_half_steps_inside_one_step_envelope():
    # with the interference level frozen, splitting a session's power in
    # two leaves the variance between the single-step values at the half
    # and at the full power
    pair = FadingPair(1.4, 0.9)
    alloc = fading.alloc_full_interference(10.0)  # I constant: level frozen
    delta = 2.0

    def one_shot(d):
        state = cf.CompressionState.initial(pair)
        return cf.multisession_step(state, pair, alloc, d, d)

    half = cf.multisession_step(one_shot(delta / 2), pair, alloc,
                                delta / 2, delta / 2)
    lo = one_shot(2.0 * delta)
    hi = one_shot(delta)
    for attr in ("sigma2_1", "sigma2_2"):
        split = getattr(half, attr)
        assert getattr(lo, attr) - 1e-12 <= split <= getattr(hi, attr) + 1e-12


def test_sigma_monotone_nonincreasing():
    pair = FadingPair(1.5, 0.5)
    alloc = fading.alloc_joint_opt(10.0)
    state = cf.CompressionState.initial(pair)
    sched = SessionSchedule.geometric(6, 10.0)
    prev1, prev2 = math.inf, math.inf
    for d1, d2 in sched.deltas:
        state = cf.multisession_step(state, pair, alloc, float(d1), float(d2))
        assert state.sigma2_1 <= prev1
        assert state.sigma2_2 <= prev2
        prev1, prev2 = state.sigma2_1, state.sigma2_2


def test_run_gains_nondecreasing_and_k1_matches_sep():
    alloc = fading.alloc_joint_opt(10.0)
    cfg = cfg_wb(10.0, 10.0)
    pair = FadingPair(2.0, 1.0)
    points = cf.multisession_run(pair, alloc, SessionSchedule.uniform(8, cfg.pr), cfg)
    sa = [p.s_a for p in points]
    sb = [p.s_b for p in points]
    assert all(b >= a - 1e-12 for a, b in zip(sa, sa[1:]))
    assert all(b >= a - 1e-12 for a, b in zip(sb, sb[1:]))
    assert all(p.rate_1 == pytest.approx(math.log1p(p.s_a * cfg.ps)) for p in points)

    single = cf.multisession_run(pair, alloc, SessionSchedule.uniform(1, cfg.pr), cfg)
    assert single[0].s_a == pytest.approx(
        cf.sep_gain(pair, alloc, PowerConfig(cfg.ps, cfg.pr, "narrow_band")),
        rel=1e-9)


def test_run_rejects_over_budget():
    alloc = fading.alloc_joint_opt(10.0)
    cfg = cfg_wb(10.0, 1.0)
    with pytest.raises(ValueError):
        cf.multisession_run(FadingPair(1.0, 1.0), alloc,
                            SessionSchedule.uniform(2, 3.0), cfg)


def test_run_k8_against_independent_recursion():
    """Dual-implementation oracle: re-derive the variance refinement by
    numerically solving the session-capacity ratio equation
        (1 + q / sigma_new^2) / (1 + q / sigma_old^2) = 1 + delta,
        q = (1 + s_own I + s_other I) / (1 + s_other I),
    instead of using the closed-form update."""
    ps, pr = 10.0, 10.0
    alloc = fading.alloc_joint_opt(ps)
    pair = FadingPair(2.0, 1.0)
    cfg = cfg_wb(ps, pr)
    k = 8
    sched = SessionSchedule.uniform(k, pr)

    sig = [math.inf, math.inf]
    s_common = pair.s_min
    s_pair = [pair.s1, pair.s2]
    for d1, d2 in sched.deltas:
        deltas = [float(d1), float(d2)]
        new_sig = []
        i_c = float(alloc.I(s_common))
        for j in (0, 1):
            q = (1 + s_pair[j] * i_c + s_pair[1 - j] * i_c) / (1 + s_pair[1 - j] * i_c)
            if math.isinf(sig[j]):
                lhs_prev = 1.0
            else:
                lhs_prev = 1.0 + q / sig[j]
            target = (1.0 + deltas[j]) * lhs_prev

            def ratio(s2_new):
                return (1.0 + q / s2_new) - target

            new_sig.append(brentq(ratio, 1e-12, 1e15, xtol=1e-15, rtol=1e-14))
        sig = new_sig
        s_a = s_pair[0] + s_pair[1] / (1.0 + sig[1])
        s_b = s_pair[1] + s_pair[0] / (1.0 + sig[0])
        s_common = min(s_a, s_b)

    points = cf.multisession_run(pair, alloc, sched, cfg)
    assert points[-1].s_a == pytest.approx(s_a, rel=1e-8)
    assert points[-1].s_b == pytest.approx(s_b, rel=1e-8)
    # frozen from the two implementations above
    assert points[-1].s_a == pytest.approx(2.9982320065, abs=1e-8)
    assert points[-1].s_b == pytest.approx(2.9957840155, abs=1e-8)


def test_multisession_avg_rate_limits():
    ps = 10.0
    alloc = fading.alloc_joint_opt(ps)
    est1 = cf.multisession_avg_rate(alloc, SessionSchedule.uniform(1, 10.0),
                                    cfg_wb(ps, 10.0), n_samples=20000)
    est4 = cf.multisession_avg_rate(alloc, SessionSchedule.uniform(4, 10.0),
                                    cfg_wb(ps, 10.0), n_samples=20000)
    assert est1.rate <= bounds.broadcast_ub(ps) + 3 * est1.stderr
    assert est4.rate <= bounds.broadcast_ub(ps) + 3 * est4.stderr
    # Pr -> 0 returns to no cooperation with this layering
    low = cf.multisession_avg_rate(alloc, SessionSchedule.uniform(2, 1e-6),
                                   cfg_wb(ps, 1e-6), n_samples=20000)
    no_coop = rate_engine.broadcast_rate(fading.rayleigh_model(), alloc)
    assert low.rate == pytest.approx(no_coop, abs=3 * low.stderr + 1e-3)
    with pytest.raises(ValueError):
        cf.multisession_avg_rate(alloc, SessionSchedule.uniform(1, 1.0),
                                 cfg_nb(ps, 1.0))
