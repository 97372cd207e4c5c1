"""Decode-and-forward cooperation under sub-optimal layering.

The relay (user 2) can only help when it decodes further than the
destination: the extra layers are re-encoded over the cooperation link of
capacity C, so for a fading pair the destination collects

    R_DF(s1, s2) = min{ R(s1) + C, R(s2) }   if s2 > s1
                   R(s1)                      otherwise

with R the cumulative layered rate of the transmit allocation.  The
average over i.i.d. unit-exponential pairs is computed by nested
quadrature; the inner integral is split at the gain where the min switches
(R(b) = R(a) + C) so each piece is smooth.

There is no multi-session variant: after one session the destination has
nothing useful to send back.
"""

from __future__ import annotations

import math

import numpy as np

from . import numerics, rate_engine
from .fading import FadingPair, PowerAllocation, PowerConfig

__all__ = ["df_avg_rate", "df_rate_pair"]


def df_rate_pair(pair: FadingPair, alloc: PowerAllocation,
                 c_coop: float) -> float:
    """Decoded rate at the destination for one fading pair."""
    if c_coop < 0:
        raise ValueError("cooperation capacity must be nonnegative")
    rate_fn = rate_engine.layered_rate_fn(alloc)
    r1 = float(rate_fn(pair.s1))
    if pair.s2 > pair.s1:
        return min(r1 + c_coop, float(rate_fn(pair.s2)))
    return r1


def _exp_weighted_rate(alloc, rate_fn, a: float, b: float) -> float:
    """int_a^b e^-s R(s) ds, splitting at the support edges of R."""
    if b <= a:
        return 0.0
    x0, x1 = alloc.x0, alloc.x1
    total = 0.0
    lo = max(a, x0)
    hi = min(b, x1)
    if hi > lo:
        total += numerics.integrate(
            lambda s: math.exp(-s) * float(rate_fn(s)), lo, hi,
            abs_tol=numerics.OUTER_ABS_TOL * 1e-2)
    if b > x1:
        r_top = float(rate_fn(x1))
        total += r_top * (math.exp(-max(a, x1)) - math.exp(-b))
    return total


def df_avg_rate(alloc: PowerAllocation, cfg: PowerConfig) -> float:
    """Average DF rate of a fixed allocation, by nested quadrature.

    The cooperation capacity follows the configuration's mode
    (log(1 + Pr) narrow band, Pr wide band).
    """
    c = cfg.c_coop
    rate_fn = rate_engine.layered_rate_fn(alloc)
    x1 = alloc.x1
    r_top = float(rate_fn(x1)) if np.isfinite(x1) else 0.0
    if r_top <= 0.0:
        return 0.0

    # R^{-1} on the increasing part of the cumulative-rate table
    grid = np.linspace(alloc.x0, x1, 4097)
    rvals = np.asarray(rate_fn(grid), dtype=float)

    def rate_inverse(r):
        return float(np.interp(r, rvals, grid))

    def inner(a: float) -> float:
        """int_a^inf e^-b min{R(a) + C, R(b)} db."""
        ra_c = float(rate_fn(a)) + c
        if ra_c >= r_top:
            # min never binds: plain expected rate above a
            return _exp_weighted_rate(alloc, rate_fn, a, math.inf)
        bc = max(rate_inverse(ra_c), a)
        return _exp_weighted_rate(alloc, rate_fn, a, bc) + \
            math.exp(-bc) * ra_c

    # destination at least as strong (s1 >= s2): no useful cooperation;
    # beyond x1 the rate is flat and the tail integrates in closed form
    stronger = numerics.integrate(
        lambda s: math.exp(-s) * (1.0 - math.exp(-s)) * float(rate_fn(s)),
        alloc.x0, x1, abs_tol=numerics.OUTER_ABS_TOL * 1e-2)
    stronger += r_top * (math.exp(-x1) - 0.5 * math.exp(-2.0 * x1))

    # destination weaker: relay forwards through the capacity-C link; for
    # a beyond the support min{R(a)+C, R(b)} = r_top
    weaker = numerics.integrate(lambda a: math.exp(-a) * inner(a),
                                0.0, x1, abs_tol=numerics.OUTER_ABS_TOL)
    weaker += r_top * 0.5 * math.exp(-2.0 * x1)

    return stronger + weaker
