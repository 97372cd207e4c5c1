"""Channel configuration, canonical fading laws and closed-form allocations.

Fading magnitudes s_i = |h_i|^2 of the two users are i.i.d. unit-mean
exponential (Rayleigh amplitudes).  Three reference gain laws appear all
over the library:

* single user               F(u)  = 1 - e^-u
* joint decoding (1x2 MRC)  F(u)  = 1 - e^-u - u e^-u    (law of s1 + s2)
* strongest user            F(u)  = (1 - e^-u)^2         (law of max(s1, s2))

A transmit-side power allocation is described by its residual interference
I(s) (total power in layers above level s), nonincreasing from I = Ps below
the support to I = 0 above it, with layer power density rho(s) = -I'(s).
The two closed-form optimal allocations used as sub-optimal choices by the
cooperation schemes are

* single-user optimal   I(s) = (1 - s) / s^2      on [2/(1+sqrt(1+4 Ps)), 1]
* joint-decoding optimal I(s) = (1 + s - s^2)/s^3 on [x0, (1+sqrt 5)/2]

clipped to [0, Ps]; clipping realizes the flat-top / zero-tail three-branch
shape of the optimal residual interference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import numerics

__all__ = [
    "DistributionModel",
    "FadingPair",
    "PowerAllocation",
    "PowerConfig",
    "alloc_full_interference",
    "alloc_joint_opt",
    "alloc_selection_opt",
    "alloc_single_user_opt",
    "alloc_zero",
    "joint_ub_cdf",
    "joint_ub_model",
    "rayleigh_cdf",
    "rayleigh_model",
    "strongest_cdf",
    "strongest_model",
    "db_to_linear",
    "linear_to_db",
]

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

NARROW_BAND = "narrow_band"
WIDE_BAND = "wide_band"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class PowerConfig:
    """Source power Ps, relay power Pr (both linear) and cooperation mode.

    The cooperation link capacity is log(1 + Pr) nats for a narrow-band
    (single-session) link and Pr nats for the wide-band, power-limited
    limit of infinitely many parallel sessions.
    """

    ps: float
    pr: float
    coop_mode: str = NARROW_BAND

    def __post_init__(self):
        if not self.ps > 0:
            raise ValueError("ps must be positive")
        if self.pr < 0:
            raise ValueError("pr must be nonnegative")
        if self.coop_mode not in (NARROW_BAND, WIDE_BAND):
            raise ValueError(f"unknown coop_mode {self.coop_mode!r}")

    @property
    def c_coop(self) -> float:
        """Cooperation link capacity in nats."""
        if self.coop_mode == NARROW_BAND:
            return math.log1p(self.pr)
        return self.pr

    @staticmethod
    def from_db(ps_db, pr_db, coop_mode=NARROW_BAND) -> "PowerConfig":
        return PowerConfig(float(db_to_linear(ps_db)), float(db_to_linear(pr_db)),
                           coop_mode)

    def with_mode(self, coop_mode) -> "PowerConfig":
        return PowerConfig(self.ps, self.pr, coop_mode)


@dataclass(frozen=True)
class FadingPair:
    """One realization (s1, s2) of the two squared fading magnitudes."""

    s1: float
    s2: float

    def __post_init__(self):
        if self.s1 < 0 or self.s2 < 0:
            raise ValueError("fading gains must be nonnegative")

    @property
    def s_min(self) -> float:
        return min(self.s1, self.s2)

    @property
    def s_max(self) -> float:
        return max(self.s1, self.s2)


@dataclass(frozen=True, eq=False)
class DistributionModel:
    """CDF / PDF / PDF-derivative triple of a scalar equivalent gain.

    ``sf`` is the survival function 1 - F; an explicit implementation
    avoids cancellation in the upper tail where the layering integrands
    only ever use 1 - F.  All callables accept scalars or numpy arrays.
    """

    cdf: Callable
    pdf: Callable
    pdf_derivative: Callable
    name: str = "distribution"
    sf: Optional[Callable] = None

    def __post_init__(self):
        if self.sf is None:
            object.__setattr__(self, "sf", lambda u: 1.0 - self.cdf(u))

    @staticmethod
    def from_cdf(cdf, pdf=None, pdf_derivative=None, name="distribution",
                 sf=None, diff_step=1e-4):
        """Build a model from a CDF, differentiating numerically if needed.

        Central differences with step h = max(diff_step, 1e-3 x); composite
        laws in this library have no tractable analytic derivatives.
        """
        base = sf if sf is not None else cdf
        sign = -1.0 if sf is not None else 1.0

        if pdf is None:
            def pdf(u, _f=base, _s=sign):
                u = np.asarray(u, dtype=float)
                h = np.maximum(diff_step, 1e-3 * np.abs(u))
                h = np.minimum(h, np.maximum(u / 2.0, 1e-300))
                return _s * (_f(u + h) - _f(u - h)) / (2.0 * h)

        if pdf_derivative is None:
            def pdf_derivative(u, _p=pdf):
                u = np.asarray(u, dtype=float)
                h = np.maximum(diff_step, 1e-3 * np.abs(u))
                h = np.minimum(h, np.maximum(u / 2.0, 1e-300))
                return (_p(u + h) - _p(u - h)) / (2.0 * h)

        return DistributionModel(cdf=cdf, pdf=pdf, pdf_derivative=pdf_derivative,
                                 name=name, sf=sf)


def _require_nonnegative(u):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("gain must be nonnegative")
    return u


def rayleigh_cdf(u):
    """Single-user gain CDF, 1 - e^-u."""
    u = _require_nonnegative(u)
    return -np.expm1(-u)


def joint_ub_cdf(u):
    """Gain CDF of two fully cooperating receivers, 1 - e^-u - u e^-u."""
    u = _require_nonnegative(u)
    return -np.expm1(-u) - u * np.exp(-u)


def strongest_cdf(u):
    """Gain CDF of the stronger of the two users, (1 - e^-u)^2."""
    u = _require_nonnegative(u)
    return np.expm1(-u) ** 2


def rayleigh_model() -> DistributionModel:
    return DistributionModel(
        cdf=rayleigh_cdf,
        pdf=lambda u: np.exp(-_require_nonnegative(u)),
        pdf_derivative=lambda u: -np.exp(-_require_nonnegative(u)),
        sf=lambda u: np.exp(-_require_nonnegative(u)),
        name="rayleigh",
    )


def joint_ub_model() -> DistributionModel:
    return DistributionModel(
        cdf=joint_ub_cdf,
        pdf=lambda u: _require_nonnegative(u) * np.exp(-np.asarray(u, float)),
        pdf_derivative=lambda u: (1.0 - _require_nonnegative(u)) * np.exp(-np.asarray(u, float)),
        sf=lambda u: (1.0 + _require_nonnegative(u)) * np.exp(-np.asarray(u, float)),
        name="joint_ub",
    )


def strongest_model() -> DistributionModel:
    def pdf(u):
        u = _require_nonnegative(u)
        return 2.0 * np.exp(-u) * -np.expm1(-u)

    def pdf_derivative(u):
        u = _require_nonnegative(u)
        return -2.0 * np.exp(-u) + 4.0 * np.exp(-2.0 * u)

    def sf(u):
        u = _require_nonnegative(u)
        return np.exp(-u) * (1.0 - np.expm1(-u))

    return DistributionModel(cdf=strongest_cdf, pdf=pdf,
                             pdf_derivative=pdf_derivative, sf=sf,
                             name="strongest")


# ---------------------------------------------------------------------------
# Power allocations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PowerAllocation:
    """Residual interference I(s) with density rho(s) = -I'(s).

    I equals ``ps`` below ``x0``, decreases on [x0, x1] and is zero above
    ``x1``; consequently the allocated power integrates to ps.  ``I`` and
    ``rho`` accept scalars or arrays.
    """

    I: Callable  # noqa: E741  (established symbol for residual interference)
    rho: Callable
    x0: float
    x1: float
    ps: float
    name: str = "allocation"
    warnings: tuple = field(default=())


def _clipped_allocation(i_raw, rho_raw, x0, x1, ps, name):
    def I(s):  # noqa: E741
        s = np.asarray(s, dtype=float)
        out = np.empty_like(s)
        low = s <= x0
        high = s >= x1
        mid = ~(low | high)
        out[low] = ps
        out[high] = 0.0
        if np.any(mid):
            out[mid] = np.clip(i_raw(s[mid]), 0.0, ps)
        return out if out.ndim else float(out)

    def rho(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        mid = (s > x0) & (s < x1)
        if np.any(mid):
            out[mid] = np.maximum(rho_raw(s[mid]), 0.0)
        return out if out.ndim else float(out)

    return PowerAllocation(I=I, rho=rho, x0=float(x0), x1=float(x1),
                           ps=float(ps), name=name)


def alloc_single_user_opt(ps) -> PowerAllocation:
    """Optimal allocation for the plain single-user gain law.

    I(s) = (1 - s)/s^2 on [s0, 1] with s0 = 2/(1 + sqrt(1 + 4 Ps)); the
    density is rho(s) = (2 - s)/s^3.
    """
    ps = float(ps)
    if not ps > 0:
        raise ValueError("ps must be positive")
    s0 = 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * ps))
    return _clipped_allocation(
        lambda s: (1.0 - s) / (s * s),
        lambda s: (2.0 - s) / (s ** 3),
        s0, 1.0, ps, "su_opt")


def alloc_joint_opt(ps) -> PowerAllocation:
    """Optimal allocation for the joint-decoding (1x2) upper-bound law.

    I(s) = (1 + s - s^2)/s^3 on [x0, golden ratio], x0 solving I(x0) = Ps.
    """
    ps = float(ps)
    if not ps > 0:
        raise ValueError("ps must be positive")
    x1 = GOLDEN_RATIO

    def i_raw(s):
        s = np.asarray(s, dtype=float)
        return (1.0 + s - s * s) / (s ** 3)

    x0 = numerics.find_root(lambda s: i_raw(s) - ps,
                            numerics.Bracket(1e-9, x1), tol=1e-14)
    return _clipped_allocation(
        i_raw,
        lambda s: 3.0 / s ** 4 + 2.0 / s ** 3 - 1.0 / (s * s),
        x0, x1, ps, "joint_opt")


def alloc_selection_opt(ps) -> PowerAllocation:
    """Optimal allocation for the strongest-user (selection) law.

    No closed form; delegates to the generic optimal-allocation
    construction on the max(s1, s2) distribution.
    """
    from . import rate_engine  # local import, rate_engine depends on fading

    alloc = rate_engine.optimal_allocation(strongest_model(), float(ps))
    object.__setattr__(alloc, "name", "sel_opt")
    return alloc


def alloc_zero() -> PowerAllocation:
    """Degenerate allocation with no residual interference (test utility)."""
    return PowerAllocation(
        I=lambda s: np.zeros_like(np.asarray(s, dtype=float)) if np.ndim(s) else 0.0,
        rho=lambda s: np.zeros_like(np.asarray(s, dtype=float)) if np.ndim(s) else 0.0,
        x0=0.0, x1=0.0, ps=0.0, name="zero")


def alloc_full_interference(ps) -> PowerAllocation:
    """Degenerate allocation I = Ps everywhere (nothing ever decoded)."""
    ps = float(ps)

    def I(s):  # noqa: E741
        s = np.asarray(s, dtype=float)
        out = np.full_like(s, ps)
        return out if out.ndim else float(out)

    return PowerAllocation(
        I=I,
        rho=lambda s: np.zeros_like(np.asarray(s, dtype=float)) if np.ndim(s) else 0.0,
        x0=math.inf, x1=math.inf, ps=ps, name="full")
