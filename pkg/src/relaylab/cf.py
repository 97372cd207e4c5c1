"""Wyner-Ziv compress-and-forward cooperation: naive narrow/wide band,
separate preprocessing, and the multi-session successive-refinement
recursion.

The forwarding user compresses its observation with the decoder's signal
as side information; meeting the cooperation-link capacity with equality
fixes the compression noise variance.  With the link budget b (b = Pr for
a narrow-band session, b = e^Pr - 1 for the wide-band power-limited link)
and Appendix-style letters (s1 forwarded, s2 at the decoder):

    sigma^2 = (1 + s1 Ps + s2 Ps) / (b (1 + s2 Ps))
    gain    = s2 + s1 / (1 + sigma^2)

The gain law for i.i.d. unit-exponential pairs has density
conditioned on the decoder gain v; integrating the conditional exponential
tail and substituting t = (1 + v Ps)(1 + b) - (1 + u Ps) turns the CDF into
exponential-integral terms:

    with c = 1 + u Ps, k = Ps (1 + b), B = (u Ps b - 1) / k, A = b c^2 / k,
    t2 = b c, t1 = max(b - u Ps, 0):

    1 - F(u) = e^-u [1 + b c / k] - (b c^2 / k^2) e^-B E1(A / t2)
               - [u < b/Ps] ( e^{-u (1+b)/t1} t1 / k
                              - (b c^2 / k^2) e^-B E1(A / t1) )

written below through the scaled integral e^x E1(x) so every term carries
an explicit e^-u decay (no cancellation in the tail).  The quadrature form
of the same law is kept as a test oracle.

Multi-session cooperation refines both users' descriptions across sessions
with per-session powers delta_j^(k); the compression variances follow the
recursion in ``multisession_step`` and only commonly decoded layers (up to
min of the two current gains) are stripped between sessions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import numerics, rate_engine
from .af import RateEstimate, SessionSchedule
from .fading import (DistributionModel, FadingPair, PowerAllocation,
                     PowerConfig, NARROW_BAND, WIDE_BAND)

__all__ = [
    "CompressionState",
    "SessionPoint",
    "multisession_avg_rate",
    "multisession_run",
    "multisession_step",
    "naive_distribution",
    "naive_gain",
    "naive_optimal_allocation",
    "naive_rates",
    "naive_sigma2",
    "sep_gain",
    "sep_gains",
]

_BUDGET_CAP = 1e300  # e^Pr - 1 saturates here; the law is already the joint one


def _link_budget(cfg: PowerConfig) -> float:
    if cfg.coop_mode == NARROW_BAND:
        return cfg.pr
    with np.errstate(over="ignore"):
        return float(min(np.expm1(cfg.pr), _BUDGET_CAP))


def naive_sigma2(pair: FadingPair, cfg: PowerConfig) -> float:
    """Compression noise variance meeting the link capacity with equality.

    ``pair.s1`` is the forwarding (compressing) user's gain, ``pair.s2``
    the decoding user's.
    """
    if not cfg.pr > 0:
        raise ValueError("compress-and-forward needs pr > 0")
    b = _link_budget(cfg)
    return float((1.0 + pair.s1 * cfg.ps + pair.s2 * cfg.ps) /
                 (b * (1.0 + pair.s2 * cfg.ps)))


def naive_gain(pair: FadingPair, cfg: PowerConfig) -> float:
    """Decoder equivalent gain s2 + s1 / (1 + sigma^2)."""
    return float(pair.s2 + pair.s1 / (1.0 + naive_sigma2(pair, cfg)))


def naive_gains(s1, s2, cfg: PowerConfig):
    if not cfg.pr > 0:
        raise ValueError("compress-and-forward needs pr > 0")
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    b = _link_budget(cfg)
    sig = (1.0 + s1 * cfg.ps + s2 * cfg.ps) / (b * (1.0 + s2 * cfg.ps))
    return s2 + s1 / (1.0 + sig)


@lru_cache(maxsize=64)
def _naive_distribution_cached(ps: float, budget: float, label: str) -> DistributionModel:
    k = ps * (1.0 + budget)
    # ratios stay finite as the wide-band budget saturates (b ~ 1e300)
    r1 = budget / (1.0 + budget)

    def sf(u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValueError("gain must be nonnegative")
        c = 1.0 + u * ps
        coef = (r1 / (1.0 + budget)) * (c / ps) * (c / ps)  # b c^2 / k^2
        main = 1.0 + r1 * c / ps \
            - coef * numerics.exp_integral_e1_scaled(c / k)
        out = np.exp(-u) * main
        t1 = budget - u * ps
        low = t1 > 0.0
        if np.any(low):
            cl = c[low] if c.ndim else c
            t1l = t1[low] if t1.ndim else t1
            ul = u[low] if u.ndim else u
            coefl = coef[low] if np.ndim(coef) else coef
            arg = (budget / t1l) * (cl / (1.0 + budget)) * (cl / ps)
            with np.errstate(over="ignore", under="ignore"):
                branch = np.exp(-ul * ((1.0 + budget) / t1l)) * (
                    (r1 - u[low] * ps / (1.0 + budget) if c.ndim
                     else r1 - u * ps / (1.0 + budget)) / ps
                    - coefl * numerics.exp_integral_e1_scaled(arg))
            if out.ndim:
                out[low] -= branch
            else:
                out = out - branch
        return out if out.ndim else float(out)

    def cdf(u):
        out = 1.0 - sf(u)
        return out if np.ndim(out) else float(out)

    return DistributionModel.from_cdf(cdf, sf=sf,
                                      name=f"cf_naive_{label}(ps={ps:g})")


def naive_distribution(cfg: PowerConfig) -> DistributionModel:
    """Law of the naive-CF equivalent gain (branch point at budget/Ps).

    The wide-band law is the narrow-band one with the budget Pr replaced
    by e^Pr - 1; the density and its derivative come from central
    differences of the closed-form survival function.
    """
    if not cfg.pr > 0:
        raise ValueError("compress-and-forward needs pr > 0")
    b = _link_budget(cfg)
    label = "nb" if cfg.coop_mode == NARROW_BAND else "wb"
    return _naive_distribution_cached(cfg.ps, b, f"{label},pr={cfg.pr:g}")


def _cdf_by_quadrature(u: float, ps: float, budget: float) -> float:
    """Direct conditional-integral form of the naive-CF law (test oracle)."""
    if u <= 0:
        return 0.0
    v0 = max((ps * u - budget) / (ps * (1.0 + budget)), 0.0)

    def integrand(v):
        y = u - v
        w = 1.0 + v * ps
        return math.exp(-v - y * (1.0 + budget) * w / (w * budget - y * ps))

    import scipy.integrate as si
    val, _ = si.quad(integrand, v0, u, limit=200, epsabs=1e-12, epsrel=1e-11)
    return 1.0 - math.exp(-u) - val


@lru_cache(maxsize=64)
def _nwz_alloc_cached(ps, pr, mode) -> PowerAllocation:
    dist = naive_distribution(PowerConfig(ps, pr, mode))
    alloc = rate_engine.optimal_allocation(dist, ps)
    object.__setattr__(alloc, "name", "nwz_opt")
    return alloc


def naive_optimal_allocation(cfg: PowerConfig) -> PowerAllocation:
    """Rate-optimal allocation for the naive-CF gain law."""
    return _nwz_alloc_cached(cfg.ps, cfg.pr, cfg.coop_mode)


class NaiveCfRates(NamedTuple):
    outage: float
    broadcast: float
    threshold: float
    multimodal: bool


def naive_rates(cfg: PowerConfig) -> NaiveCfRates:
    """Single-level and broadcasting average rates of naive CF."""
    dist = naive_distribution(cfg)
    out = rate_engine.outage_rate(dist, cfg.ps)
    alloc = naive_optimal_allocation(cfg)
    broadcast = rate_engine.broadcast_rate(dist, alloc)
    return NaiveCfRates(outage=out.rate, broadcast=broadcast,
                        threshold=out.threshold, multimodal=out.multimodal)


# ---------------------------------------------------------------------------
# Separate preprocessing (single session)
# ---------------------------------------------------------------------------

def sep_gain(pair: FadingPair, alloc: PowerAllocation, cfg: PowerConfig) -> float:
    """Stronger user's gain after stripping common layers, then one CF session.

    Layers up to the weaker gain are removed, so the residual-signal power
    level is I = I(s_min); the compression of the weaker user's residual
    observation gives the stronger user

        s_a = s_max + s_min Pr (1 + s_max I)
              / [(1 + Pr)(1 + s_max I) + s_min I].
    """
    return float(sep_gains(pair.s1, pair.s2, alloc, cfg))


def sep_gains(s1, s2, alloc: PowerAllocation, cfg: PowerConfig):
    if not cfg.pr > 0:
        raise ValueError("compress-and-forward needs pr > 0")
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    s_max = np.maximum(s1, s2)
    s_min = np.minimum(s1, s2)
    i_c = alloc.I(s_min)
    pr = cfg.pr
    return s_max + s_min * pr * (1.0 + s_max * i_c) / (
        (1.0 + pr) * (1.0 + s_max * i_c) + s_min * i_c)


# ---------------------------------------------------------------------------
# Multi-session successive refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompressionState:
    """Per-user squared compression noise after session k.

    ``sigma2_j`` is user j's description quality (infinite before any
    session), ``s_common`` the highest commonly decoded layer, and
    ``s_a`` / ``s_b`` the users' current equivalent gains (nan before the
    first session).
    """

    sigma2_1: float
    sigma2_2: float
    k: int
    s_common: float
    s_a: float = math.nan
    s_b: float = math.nan

    def __post_init__(self):
        if self.sigma2_1 <= 0 or self.sigma2_2 <= 0:
            raise ValueError("compression variances must be positive")

    @staticmethod
    def initial(pair: FadingPair) -> "CompressionState":
        return CompressionState(sigma2_1=math.inf, sigma2_2=math.inf, k=0,
                                s_common=pair.s_min)


def _sigma_update(sig_prev, s_own, s_other, i_level, delta):
    """One-session refinement of a description's noise variance.

    The new variance divides the old one by the factor in which the
    session power delta buys resolution against the decoder's current
    side information:

        sigma'^2 = sigma^2 (1 + s_own I + s_other I)
                   / [(1 + s_other I)(1 + delta (1 + sigma^2))
                      + s_own I (1 + delta)]

    and degenerates to (1 + s_own I + s_other I) / (delta (1 + s_other I))
    from an infinite (uninformative) starting description.
    """
    num = 1.0 + s_own * i_level + s_other * i_level
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        fresh = num / (delta * (1.0 + s_other * i_level))
        den = (1.0 + s_other * i_level) * (1.0 + delta * (1.0 + sig_prev)) \
            + s_own * i_level * (1.0 + delta)
        updated = sig_prev * num / den
    inf_prev = ~np.isfinite(sig_prev)
    zero_delta = delta <= 0.0
    out = np.where(inf_prev, np.where(zero_delta, np.inf, fresh), updated)
    return np.where(zero_delta & ~inf_prev, sig_prev, out)


def multisession_step(state: CompressionState, pair: FadingPair,
                      alloc: PowerAllocation, delta1: float,
                      delta2: float) -> CompressionState:
    """Advance the successive-refinement recursion by one session."""
    if delta1 < 0 or delta2 < 0:
        raise ValueError("session powers must be nonnegative")
    i_level = float(alloc.I(state.s_common))
    sig1 = float(_sigma_update(np.float64(state.sigma2_1), pair.s1, pair.s2,
                               i_level, np.float64(delta1)))
    sig2 = float(_sigma_update(np.float64(state.sigma2_2), pair.s2, pair.s1,
                               i_level, np.float64(delta2)))
    s_a = pair.s1 + pair.s2 / (1.0 + sig2)
    s_b = pair.s2 + pair.s1 / (1.0 + sig1)
    return CompressionState(sigma2_1=sig1, sigma2_2=sig2, k=state.k + 1,
                            s_common=min(s_a, s_b), s_a=s_a, s_b=s_b)


class SessionPoint(NamedTuple):
    s_a: float
    s_b: float
    rate_1: float
    rate_2: float


def multisession_run(pair: FadingPair, alloc: PowerAllocation,
                     schedule: SessionSchedule, cfg: PowerConfig):
    """Run a finite schedule; emit per-session gains and point rates.

    The point rates are the single-user mutual informations
    log(1 + gain Ps) of each user's current equivalent channel.
    """
    totals = schedule.totals()
    if np.any(totals > cfg.pr * (1.0 + 1e-9)):
        raise ValueError("schedule exceeds the per-user cooperation budget")
    state = CompressionState.initial(pair)
    points = []
    for d1, d2 in schedule.deltas:
        state = multisession_step(state, pair, alloc, float(d1), float(d2))
        points.append(SessionPoint(
            s_a=state.s_a, s_b=state.s_b,
            rate_1=math.log1p(state.s_a * cfg.ps),
            rate_2=math.log1p(state.s_b * cfg.ps)))
    return points


def _final_gains_vectorized(s1, s2, alloc, schedule):
    sig1 = np.full_like(s1, np.inf)
    sig2 = np.full_like(s1, np.inf)
    s_common = np.minimum(s1, s2)
    s_a = s1.copy()
    s_b = s2.copy()
    for d1, d2 in schedule.deltas:
        i_level = alloc.I(s_common)
        sig1 = _sigma_update(sig1, s1, s2, i_level, np.float64(d1))
        sig2 = _sigma_update(sig2, s2, s1, i_level, np.float64(d2))
        s_a = s1 + s2 / (1.0 + sig2)
        s_b = s2 + s1 / (1.0 + sig1)
        s_common = np.minimum(s_a, s_b)
    return s_a, s_b


def multisession_avg_rate(alloc: PowerAllocation, schedule: SessionSchedule,
                          cfg: PowerConfig, n_samples: int = 200_000,
                          seed: int = 20251) -> RateEstimate:
    """Monte Carlo average layered rate of the destination's final gain.

    The recursion runs unordered, so the destination's gain is its own
    s_a = s1 + s2/(1 + sigma_2^2) in every draw; selecting by which user is
    stronger and reading the ordered formulas gives the identical value.
    Multi-session cooperation presumes the wide-band (parallel channel)
    link; per-user schedule totals must respect the budget Pr.
    """
    if cfg.coop_mode != WIDE_BAND:
        raise ValueError("multi-session cooperation requires wide_band mode")
    totals = schedule.totals()
    if np.any(totals > cfg.pr * (1.0 + 1e-9)):
        raise ValueError("schedule exceeds the per-user cooperation budget")

    from . import oracle

    s1, s2 = oracle.sample_pair_arrays(oracle.SampleConfig(n_samples, seed))
    s_a, _ = _final_gains_vectorized(s1, s2, alloc, schedule)
    rates = rate_engine.layered_rate_fn(alloc)(s_a)
    return RateEstimate(rate=float(rates.mean()),
                        stderr=oracle.jackknife_stderr(rates),
                        n_samples=n_samples)
