import math

import numpy as np
import pytest

from relaylab import bounds, df, fading, numerics, rate_engine
from relaylab.fading import FadingPair, PowerConfig


def test_rate_pair_branches():
    alloc = fading.alloc_joint_opt(10.0)
    rate_fn = rate_engine.layered_rate_fn(alloc)
    # destination at least as strong: own rate only
    assert df.df_rate_pair(FadingPair(1.5, 0.5), alloc, 2.0) == \
        pytest.approx(float(rate_fn(1.5)), rel=1e-12)
    # zero-capacity link never helps
    assert df.df_rate_pair(FadingPair(0.5, 1.5), alloc, 0.0) == \
        pytest.approx(float(rate_fn(0.5)), rel=1e-12)
    # unlimited link hands over the stronger user's rate
    assert df.df_rate_pair(FadingPair(0.5, 1.5), alloc, 1e9) == \
        pytest.approx(float(rate_fn(1.5)), rel=1e-12)
    # binding link caps at own rate plus capacity
    capped = df.df_rate_pair(FadingPair(0.3, 1.6), alloc, 0.05)
    assert capped == pytest.approx(float(rate_fn(0.3)) + 0.05, rel=1e-9)
    with pytest.raises(ValueError):
        df.df_rate_pair(FadingPair(1.0, 1.0), alloc, -1.0)


def mc_oracle(alloc, c, n=200000, seed=99):
    rng = np.random.default_rng(seed)
    s1 = rng.exponential(size=n)
    s2 = rng.exponential(size=n)
    rate_fn = rate_engine.layered_rate_fn(alloc)
    r1 = rate_fn(s1)
    r2 = rate_fn(s2)
    vals = np.where(s2 > s1, np.minimum(r1 + c, r2), r1)
    return float(vals.mean()), float(vals.std() / math.sqrt(n))


@pytest.mark.parametrize("alloc_fn,pr,mode", [
    (lambda: fading.alloc_single_user_opt(10.0), 2.5, "narrow_band"),
    (lambda: fading.alloc_joint_opt(10.0), 10.0, "narrow_band"),
    (lambda: fading.alloc_selection_opt(10.0), 10.0, "wide_band"),
])
def test_avg_rate_against_mc(alloc_fn, pr, mode):
    alloc = alloc_fn()
    cfg = PowerConfig(10.0, pr, mode)
    got = df.df_avg_rate(alloc, cfg)
    mc, se = mc_oracle(alloc, cfg.c_coop)
    assert got == pytest.approx(mc, abs=4 * se)


def test_avg_rate_no_cooperation_limit():
    alloc = fading.alloc_single_user_opt(1.0)
    cfg = PowerConfig(1.0, 0.0, "narrow_band")
    got = df.df_avg_rate(alloc, cfg)
    no_coop = rate_engine.broadcast_rate(fading.rayleigh_model(), alloc)
    assert got == pytest.approx(no_coop, abs=1e-6)
    assert no_coop == pytest.approx(bounds.broadcast_lb(1.0), abs=1e-9)


def test_avg_rate_unlimited_selection_limit():
    ps = 10.0
    alloc = fading.alloc_selection_opt(ps)
    cfg = PowerConfig(ps, 1e9, "wide_band")
    got = df.df_avg_rate(alloc, cfg)
    sel_bound = rate_engine.broadcast_rate_closed(fading.strongest_model(), ps)
    assert got == pytest.approx(sel_bound, abs=1e-4)


def test_avg_rate_monotone_in_pr_and_mode():
    ps = 10.0
    alloc = fading.alloc_selection_opt(ps)
    rates = [df.df_avg_rate(alloc, PowerConfig(ps, pr, "narrow_band"))
             for pr in (0.0, 1.0, 5.0, 20.0)]
    assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))
    for pr in (1.0, 10.0):
        nb = df.df_avg_rate(alloc, PowerConfig(ps, pr, "narrow_band"))
        wb = df.df_avg_rate(alloc, PowerConfig(ps, pr, "wide_band"))
        assert wb >= nb - 1e-9


def test_avg_rate_bounded_by_selection():
    ps = 10.0
    sel_bound = rate_engine.broadcast_rate_closed(fading.strongest_model(), ps)
    for alloc in (fading.alloc_single_user_opt(ps), fading.alloc_joint_opt(ps),
                  fading.alloc_selection_opt(ps)):
        for pr in (1.0, 10.0, 100.0):
            got = df.df_avg_rate(alloc, PowerConfig(ps, pr, "wide_band"))
            assert got <= sel_bound + 1e-6
            no_coop = rate_engine.broadcast_rate(fading.rayleigh_model(), alloc)
            assert got >= no_coop - 1e-6
