import math

import numpy as np
import pytest

from relaylab import af, bounds, fading, oracle, strategies
from relaylab.fading import FadingPair, PowerConfig
from relaylab.strategies import (ConfigurationError, evaluate, gain_samples,
                                 parse_strategy, registered_names, rte_gain)

SC = oracle.SampleConfig(20000, 71)


def test_parse_strategy():
    spec = parse_strategy("af:naive")
    assert spec.family == "af" and spec.variant == "naive" and not spec.rte
    spec = parse_strategy("cf:multisession:rte")
    assert spec.rte
    with pytest.raises(ConfigurationError):
        parse_strategy("af:turbo")
    with pytest.raises(ConfigurationError):
        parse_strategy("df:nb:rte")  # no common-information variant for DF
    with pytest.raises(ConfigurationError):
        parse_strategy("af:naive", alloc_name="best_opt")


def test_expand_aliases():
    out = strategies.expand_strategy_names(["bounds", "af:naive"])
    assert out[:4] == ["bound:outage_lb", "bound:broadcast_lb",
                       "bound:outage_ub", "bound:broadcast_ub"]
    assert out[-1] == "af:naive"


def test_rte_gain_example():
    cfg = PowerConfig(10.0, 10.0)
    got = rte_gain(af.naive_gain, FadingPair(2.0, 1.0), cfg)
    first = 2.0 + 10.0 / 21.0
    second = 1.0 + 20.0 / 31.0
    assert first == pytest.approx(2.47619, abs=1e-5)
    assert second == pytest.approx(1.645161, abs=1e-6)
    assert got == pytest.approx(min(first, second), rel=1e-12)
    # symmetric pair: rte equals the base gain
    sym = rte_gain(af.naive_gain, FadingPair(1.3, 1.3), cfg)
    assert sym == pytest.approx(af.naive_gain(FadingPair(1.3, 1.3), cfg), rel=1e-12)


def test_rte_never_exceeds_base():
    cfg = PowerConfig(10.0, 5.0)
    rng = np.random.default_rng(31)
    for _ in range(100):
        pair = FadingPair(*rng.exponential(size=2))
        assert rte_gain(af.naive_gain, pair, cfg) <= af.naive_gain(pair, cfg) + 1e-12


def test_rte_symmetric_under_swap():
    cfg = PowerConfig(10.0, 5.0)
    rng = np.random.default_rng(32)
    for _ in range(50):
        s1, s2 = rng.exponential(size=2)
        fwd = rte_gain(af.naive_gain, FadingPair(s1, s2), cfg)
        rev = rte_gain(af.naive_gain, FadingPair(s2, s1), cfg)
        assert fwd == pytest.approx(rev, rel=1e-14)


def test_multisession_af_dominates_one_step_at_matched_budget():
    # wide-band multi-session with the joint-optimal layering beats the
    # single-session separate scheme at a matched total budget
    cfg = PowerConfig.from_db(20.0, 20.0, "wide_band")
    est = af.multisession_rate(fading.alloc_joint_opt(cfg.ps), cfg,
                               n_samples=40000)
    one = af.sep_rate(cfg.with_mode("narrow_band"), "one_step")
    assert est.rate >= one.rate - 3.0 * est.stderr


def test_bound_evaluation():
    cfg = PowerConfig(1.0, 1.0)
    pt = evaluate(parse_strategy("bound:broadcast_lb"), cfg)
    assert pt.rate == pytest.approx(0.2666526093, abs=1e-9)
    assert pt.rate_in("bits") == pytest.approx(pt.rate / math.log(2.0), rel=1e-12)
    assert pt.coop_mode == "narrow_band"
    pt2 = evaluate(parse_strategy("bound:outage_lb"), cfg)
    assert pt2.threshold == pytest.approx(0.7632228, abs=1e-6)
    with pytest.raises(ConfigurationError):
        pt.rate_in("furlongs")


def test_strategy_modes_pinned():
    cfg = PowerConfig(10.0, 10.0, "narrow_band")
    pt = evaluate(parse_strategy("af:multisession"), cfg, SC)
    assert pt.coop_mode == "wide_band"
    assert pt.stderr is not None and pt.n_samples == SC.n_samples
    pt2 = evaluate(parse_strategy("cf:naive_nb"), cfg.with_mode("wide_band"), SC)
    assert pt2.coop_mode == "narrow_band"


def test_af_naive_evaluation_matches_module():
    cfg = PowerConfig(10.0, 10.0)
    pt = evaluate(parse_strategy("af:naive"), cfg)
    assert pt.rate == pytest.approx(af.naive_rates(cfg).broadcast, rel=1e-12)
    assert pt.alloc == "naf_opt"
    out = evaluate(parse_strategy("af:naive_outage"), cfg)
    assert out.threshold is not None


def test_gain_samples_agree_with_scalar_maps():
    cfg = PowerConfig(10.0, 2.5)
    spec = parse_strategy("af:naive")
    gains, alloc = gain_samples(spec, cfg, oracle.SampleConfig(50, 3))
    s1, s2 = oracle.sample_pair_arrays(oracle.SampleConfig(50, 3))
    for i in range(50):
        want = af.naive_gain(FadingPair(float(s1[i]), float(s2[i])), cfg)
        assert float(gains[i]) == pytest.approx(want, rel=1e-12)


def test_mc_agrees_with_analytic_for_naive_af():
    cfg = PowerConfig(10.0, 10.0)
    analytic = evaluate(parse_strategy("af:naive"), cfg)
    rate, stderr = oracle.empirical_avg_rate(parse_strategy("af:naive"), SC, cfg)
    assert rate == pytest.approx(analytic.rate, abs=3.5 * stderr)


def test_registry_closed_and_ordered():
    cfg = PowerConfig(10.0, 10.0)
    sc = oracle.SampleConfig(20000, 7)
    olb = bounds.outage_lb(cfg.ps)
    bub = bounds.broadcast_ub(cfg.ps)
    broadcast_like = []
    for name in registered_names():
        spec = parse_strategy(name)
        pt = evaluate(spec, cfg, sc)
        assert np.isfinite(pt.rate) and pt.rate >= 0.0
        if spec.family in ("af", "cf") and "outage" not in spec.variant \
                and not spec.rte:
            broadcast_like.append((name, pt))
    assert broadcast_like
    for name, pt in broadcast_like:
        slack = 3.0 * pt.stderr if pt.stderr else 1e-6
        assert pt.rate >= olb - slack, name
        assert pt.rate <= bub + slack, name


def test_rte_rate_below_base():
    cfg = PowerConfig(10.0, 10.0)
    sc = oracle.SampleConfig(20000, 7)
    for base_name in ("af:naive", "af:multisession", "cf:naive_nb",
                      "cf:multisession"):
        base_gains, alloc = gain_samples(parse_strategy(base_name), cfg, sc)
        rte_gains, _ = gain_samples(parse_strategy(base_name + ":rte"), cfg, sc)
        # identical seeds: domination holds pointwise
        assert np.all(rte_gains <= base_gains + 1e-9), base_name
