"""Reference bounds: single-user lower bounds, joint-decoding upper bounds,
ergodic capacities and the relay cut-set bound.

All rates are in nats.  The closed forms:

* outage LB      max_u e^-u log(1 + u Ps), maximized at
                 u* = (Ps - W(Ps)) / (W(Ps) Ps)
* broadcast LB   e^-1 - e^-s0 + 2 E1(s0) - 2 E1(1),
                 s0 = 2 / (1 + sqrt(1 + 4 Ps))
* broadcast UB   g(s1) - g(s0) with g(s) = s e^-s - e^-s - 3 E1(s),
                 s1 the golden ratio and s0 from (1 + s - s^2)/s^3 = Ps
* ergodic        C(m) = int u^{m-1} e^-u log(1 + Ps u) du; for m = 1 this
                 is e^{1/Ps} E1(1/Ps), for m = 2 it collapses to
                 1 + (1 - 1/Ps) e^{1/Ps} E1(1/Ps)
* cut-set        min{ C(1) + C_coop, C(2) }
"""

from __future__ import annotations

import math

from . import fading, numerics, rate_engine
from .fading import PowerConfig

__all__ = [
    "broadcast_lb",
    "broadcast_ub",
    "cut_set",
    "ergodic_capacity",
    "outage_lb",
    "outage_threshold",
    "outage_ub",
]


def outage_threshold(ps: float) -> float:
    """Optimal single-level threshold (Ps - W(Ps)) / (W(Ps) Ps)."""
    ps = float(ps)
    w = numerics.lambert_w0(ps)
    return (ps - w) / (w * ps)


def outage_lb(ps: float) -> float:
    """Single-user single-level coding average rate."""
    ps = float(ps)
    if not ps > 0:
        raise ValueError("ps must be positive")
    u = outage_threshold(ps)
    return math.exp(-u) * math.log1p(u * ps)


def broadcast_lb(ps: float) -> float:
    """Single-user broadcasting average rate (no cooperation)."""
    ps = float(ps)
    if not ps > 0:
        raise ValueError("ps must be positive")
    s0 = 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * ps))
    e1 = numerics.exp_integral_e1
    return math.exp(-1.0) - math.exp(-s0) + 2.0 * e1(s0) - 2.0 * e1(1.0)


def outage_ub(ps: float) -> float:
    """Single-level rate for the fully-cooperating (joint decoding) law."""
    return rate_engine.outage_rate(fading.joint_ub_model(), ps).rate


def broadcast_ub(ps: float) -> float:
    """Broadcasting rate for the fully-cooperating (joint decoding) law."""
    ps = float(ps)
    if not ps > 0:
        raise ValueError("ps must be positive")
    s1 = fading.GOLDEN_RATIO
    s0 = numerics.find_root(
        lambda s: (1.0 + s - s * s) / s ** 3 - ps,
        numerics.Bracket(1e-9, s1), tol=1e-14)

    def g(s):
        return s * math.exp(-s) - math.exp(-s) - 3.0 * numerics.exp_integral_e1(s)

    return g(s1) - g(s0)


def ergodic_capacity(m: int, ps: float) -> float:
    """Ergodic capacity of a source to m optimally combining receivers."""
    ps = float(ps)
    if not ps > 0:
        raise ValueError("ps must be positive")
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    x = 1.0 / ps
    scaled = numerics.exp_integral_e1_scaled(x)  # e^{1/Ps} E1(1/Ps)
    if m == 1:
        return scaled
    return 1.0 + (1.0 - x) * scaled


def cut_set(cfg: PowerConfig) -> float:
    """Relay cut-set bound min{ C(1) + C_coop, C(2) } for the active mode."""
    return min(ergodic_capacity(1, cfg.ps) + cfg.c_coop,
               ergodic_capacity(2, cfg.ps))
