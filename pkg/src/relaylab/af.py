"""Amplify-and-forward cooperation: naive, separate preprocessing, and the
infinite-session limit.

Equivalent gains seen by the destination (user 1), with s_i the squared
fading magnitudes and I(s) the transmit-side residual interference:

* naive AF (single session, relay scales its raw input to power Pr)

      s_b = s1 + Pr s2 / (1 + Ps s2 + Pr)

* separate preprocessing (both users first strip the commonly decodable
  layers, i.e. those up to min(s1, s2), then the relay scales the residual)

      s_a = s1 + Pr s2 / (1 + s2 max(I(s1), I(s2)) + Pr)

* multi-session limit (infinitely many sessions over parallel cooperation
  channels with total power Pr; ordered gains s_max >= s_min).  The weaker
  side's final gain s_b* solves the power-budget equation

      int_{s_min}^{s_b*} s_max (1 + s_max I(q)) / (s_max + s_min - q)^2 dq = Pr

  and the stronger side reaches s_a* = s_max + s_min Z/(1+Z) with

      Z = int_{s_min}^{s_b*} s_max (1 + s_max I(q))
          / [(1 + s_min I(q)) (s_max + s_min - q)^2] dq.

  The Z integrand follows from the session-power density
  rho(q) = s_max (1 + s_max I(q)) / (s_max + s_min - q)^2 accumulated at the
  weaker user's noise level; the I = 0 sanity identity Z = Pr pins this form
  down (see the validation suite for the adjudication against the exact
  finite-session recursion).

The finite-session recursion itself (``discrete_session_oracle``) is kept
as an independent oracle for the continuum limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import numerics, rate_engine
from .fading import (DistributionModel, FadingPair, PowerAllocation,
                     PowerConfig, WIDE_BAND)

__all__ = [
    "NaiveRates",
    "RateEstimate",
    "SepRateResult",
    "SessionSchedule",
    "discrete_session_oracle",
    "discrete_session_trace",
    "multisession_gain",
    "multisession_gains",
    "multisession_rate",
    "naive_distribution",
    "naive_gain",
    "naive_optimal_allocation",
    "naive_rates",
    "sep_distribution",
    "sep_gain",
    "sep_rate",
]


@dataclass(frozen=True)
class SessionSchedule:
    """Per-session cooperation powers; column j is user j's schedule.

    ``deltas`` has shape (K,) when both users transmit the same per-session
    power, or (K, 2) for distinct per-user schedules.  Each user's total
    must stay within the cooperation budget Pr.
    """

    deltas: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.deltas, dtype=float))
        if arr.ndim == 1:
            arr = arr[:, None].repeat(2, axis=1)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("deltas must have shape (K,) or (K, 2)")
        if np.any(arr < 0):
            raise ValueError("session powers must be nonnegative")
        object.__setattr__(self, "deltas", arr)

    @property
    def count(self) -> int:
        return self.deltas.shape[0]

    def totals(self):
        return self.deltas.sum(axis=0)

    @staticmethod
    def uniform(k: int, pr: float) -> "SessionSchedule":
        if k < 1:
            raise ValueError("need at least one session")
        return SessionSchedule(np.full(k, float(pr) / k))

    @staticmethod
    def geometric(k: int, pr: float, ratio: float = 0.5) -> "SessionSchedule":
        """Geometrically decaying per-session powers, normalized to pr."""
        if k < 1:
            raise ValueError("need at least one session")
        w = ratio ** np.arange(k)
        return SessionSchedule(float(pr) * w / w.sum())


class NaiveRates(NamedTuple):
    outage: float
    broadcast: float
    threshold: float
    multimodal: bool


class SepRateResult(NamedTuple):
    rate: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    stderr: float | None = None
    n_samples: int | None = None
    warnings: tuple = ()


# ---------------------------------------------------------------------------
# Naive AF
# ---------------------------------------------------------------------------

def naive_gain(pair: FadingPair, cfg: PowerConfig) -> float:
    """Equivalent gain s1 + Pr s2 / (1 + Ps s2 + Pr) of naive forwarding."""
    return float(pair.s1 + cfg.pr * pair.s2 / (1.0 + cfg.ps * pair.s2 + cfg.pr))


def naive_gains(s1, s2, cfg: PowerConfig):
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    return s1 + cfg.pr * s2 / (1.0 + cfg.ps * s2 + cfg.pr)


@lru_cache(maxsize=64)
def _naive_distribution_cached(ps: float, pr: float) -> DistributionModel:
    b = pr / ps  # branch point: the forwarded term saturates at Pr/Ps

    def beta(u):
        return pr * u / (1.0 + ps * u + pr)

    # G(t) = int_0^t e^{-u + beta(u)} du; e^{-x} G(u*(x)) is the law's pdf.
    upper = 40.0 + b
    table = numerics.TabulatedCumulative(
        lambda u: np.exp(-u + beta(u)), 0.0, upper, n_panels=4096)
    k_total = table.total + math.exp(b) * math.exp(-upper)  # analytic-ish tail bound

    def u_star(x):
        with np.errstate(divide="ignore", over="ignore"):
            val = (1.0 + pr) * x / (pr - ps * x)
        return np.where(x < b, val, np.inf)

    def split(x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("gain must be nonnegative")
        return x, u_star(x)

    def sf(x):
        x, us = split(x)
        with np.errstate(over="ignore"):
            e_us = np.where(np.isfinite(us), np.exp(-np.minimum(us, 745.0)), 0.0)
        g = np.where(np.isfinite(us), table(np.where(np.isfinite(us), us, 0.0)),
                     k_total)
        out = e_us + np.exp(-x) * g
        return out if out.ndim else float(out)

    def cdf(x):
        out = 1.0 - sf(x)
        return out if np.ndim(out) else float(out)

    def pdf(x):
        x, us = split(x)
        g = np.where(np.isfinite(us), table(np.where(np.isfinite(us), us, 0.0)),
                     k_total)
        out = np.exp(-x) * g
        return out if out.ndim else float(out)

    def pdf_derivative(x):
        x, us = split(x)
        finite = np.isfinite(us)
        g = np.where(finite, table(np.where(finite, us, 0.0)), k_total)
        f = np.exp(-x) * g
        with np.errstate(divide="ignore", over="ignore"):
            us_prime = (1.0 + pr) * pr / (pr - ps * x) ** 2
        boundary = np.where(finite & (us < 700.0),
                            us_prime * np.exp(-np.minimum(us, 745.0)), 0.0)
        out = boundary - f
        return out if out.ndim else float(out)

    return DistributionModel(cdf=cdf, pdf=pdf, pdf_derivative=pdf_derivative,
                             sf=sf, name=f"af_naive(ps={ps:g},pr={pr:g})")


def naive_distribution(cfg: PowerConfig) -> DistributionModel:
    """Law of the naive-AF equivalent gain (piecewise, branch at Pr/Ps)."""
    if not cfg.pr > 0:
        raise ValueError("naive AF law needs pr > 0")
    return _naive_distribution_cached(cfg.ps, cfg.pr)


@lru_cache(maxsize=64)
def _naive_alloc_cached(ps: float, pr: float) -> PowerAllocation:
    dist = _naive_distribution_cached(ps, pr)
    alloc = rate_engine.optimal_allocation(dist, ps)
    object.__setattr__(alloc, "name", "naf_opt")
    return alloc


def naive_optimal_allocation(cfg: PowerConfig) -> PowerAllocation:
    """Rate-optimal allocation for the naive-AF gain law."""
    return _naive_alloc_cached(cfg.ps, cfg.pr)


def naive_rates(cfg: PowerConfig) -> NaiveRates:
    """Single-level and broadcasting average rates of naive AF."""
    dist = naive_distribution(cfg)
    out = rate_engine.outage_rate(dist, cfg.ps)
    alloc = naive_optimal_allocation(cfg)
    broadcast = rate_engine.broadcast_rate(dist, alloc)
    return NaiveRates(outage=out.rate, broadcast=broadcast,
                      threshold=out.threshold, multimodal=out.multimodal)


# ---------------------------------------------------------------------------
# Separate preprocessing (single session)
# ---------------------------------------------------------------------------

def sep_gain(pair: FadingPair, alloc: PowerAllocation, cfg: PowerConfig) -> float:
    """Equivalent gain after stripping commonly decoded layers.

    The residual interference is evaluated at the weaker gain (both users
    decode at least up to min(s1, s2)); max(I(s1), I(s2)) = I(min) for any
    nonincreasing I.
    """
    i_common = max(float(alloc.I(pair.s1)), float(alloc.I(pair.s2)))
    return float(pair.s1 + cfg.pr * pair.s2 /
                 (1.0 + pair.s2 * i_common + cfg.pr))


def sep_gains(s1, s2, alloc: PowerAllocation, cfg: PowerConfig):
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    i_common = np.maximum(alloc.I(s1), alloc.I(s2))
    return s1 + cfg.pr * s2 / (1.0 + s2 * i_common + cfg.pr)


def sep_distribution(alloc: PowerAllocation, cfg: PowerConfig,
                     _equal_gain_weight: float = 2.0) -> DistributionModel:
    """Law of the separate-preprocessing gain for i.i.d. unit exponentials.

    Conditioning on the weaker user's gain u (either role), the CDF is a
    single integral

        F(x) = int_0^{phi1^{-1}(x)} [ w e^{-2u} - e^{-u - phi2(u)}
                                        - e^{-u - phi3(u)} ] du,  w = 2,

    where phi1(u) is the diagonal gain (s1 = s2 = u), phi2 caps the
    stronger direct gain and phi3 = phi4(x - u) caps the stronger relayed
    gain, with phi4(y) = (1+Pr) y / (Pr - I(u) y) for positive denominator
    and infinity otherwise.  Assembling the two symmetric orderings doubles
    the equal-gain term, hence w = 2; the Monte Carlo suite adjudicates
    this weight against the single-weight variant (``_equal_gain_weight``
    exists so the validation report can exercise both).
    """
    pr = cfg.pr
    if not pr > 0:
        raise ValueError("separate preprocessing law needs pr > 0")
    w0 = float(_equal_gain_weight)

    # The diagonal gain phi1(u) = u + u Pr/(1 + u I(u) + Pr) is strictly
    # increasing for any nonincreasing I; a dense table inverts it.  The
    # integrand vanishes quadratically at the limit u = phi1^{-1}(x), so
    # interpolation error in the inverse is second order in the CDF.
    u_top = 80.0 + 4.0 * pr / cfg.ps
    u_grid = np.concatenate([[0.0], np.geomspace(1e-9, u_top, 4096)])
    i_grid = np.asarray(alloc.I(u_grid), dtype=float)
    phi1_grid = u_grid + u_grid * pr / (1.0 + u_grid * i_grid + pr)
    tail_slope = (1.0 + pr) / (1.0 + 2.0 * pr)  # inverse slope once I = 0

    def phi1_inv(x):
        if x <= 0:
            return 0.0
        if x >= phi1_grid[-1]:
            return float(u_grid[-1] + (x - phi1_grid[-1]) * tail_slope)
        return float(np.interp(x, phi1_grid, u_grid))

    def _flip_point(x, ulim):
        # relayed-cap flip: Pr - I(u)(x - u) crosses zero at most once
        n = int(np.searchsorted(u_grid, ulim))
        if n < 2:
            return None
        den = pr - i_grid[:n] * (x - u_grid[:n])
        if den[0] >= 0.0 or den[-1] <= 0.0:
            return None
        j = int(np.argmax(den > 0.0))
        lo, hi = u_grid[j - 1], u_grid[j]
        dlo, dhi = den[j - 1], den[j]
        return float(lo + (hi - lo) * (-dlo) / (dhi - dlo))

    def integrand(u, x):
        u = np.asarray(u, dtype=float)
        i_u = np.asarray(alloc.I(u), dtype=float)
        beta = u * pr / (1.0 + u * i_u + pr)
        phi2 = x - beta
        y = x - u
        den = pr - i_u * y
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            phi4 = np.where(den > 0.0, (1.0 + pr) * y / np.where(den > 0.0, den, 1.0),
                            np.inf)
            relay = np.where(den > 0.0, np.exp(-u - np.minimum(phi4, 745.0)), 0.0)
        return w0 * np.exp(-2.0 * u) - np.exp(-u - phi2) - relay

    gl_x, gl_w = np.polynomial.legendre.leggauss(32)

    def cdf_scalar(x):
        if x <= 0:
            return 0.0
        ulim = phi1_inv(x)
        if ulim <= 0:
            return 0.0
        # segment at the allocation edges and at the relayed-cap flip; the
        # integrand is smooth inside each piece, so fixed Gauss panels are
        # exact to rule precision (cross-checked against adaptive
        # quadrature in the tests)
        pts = [p for p in (alloc.x0, alloc.x1) if 0.0 < p < ulim]
        flip = _flip_point(x, ulim)
        if flip is not None:
            pts.append(flip)
        edges = np.array([0.0] + sorted(pts) + [ulim])
        half = np.diff(edges) / 2.0
        mid = (edges[:-1] + edges[1:]) / 2.0
        nodes = mid[:, None] + half[:, None] * gl_x[None, :]
        vals = integrand(nodes.ravel(), x).reshape(nodes.shape)
        return float(((vals * gl_w[None, :]).sum(axis=1) * half).sum())

    def cdf(x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("gain must be nonnegative")
        if x.ndim == 0:
            return cdf_scalar(float(x))
        return np.array([cdf_scalar(float(v)) for v in x.ravel()]).reshape(x.shape)

    return DistributionModel.from_cdf(
        cdf, name=f"af_sep[{alloc.name}](ps={cfg.ps:g},pr={pr:g})")


def _panel_avg_rate(dist, alloc, n_panels=2048) -> float:
    """int (1-F) x rho / (1 + x I) dx by aligned fixed Gauss panels.

    Robust for tabulated (piecewise-linear) allocations, whose corners sit
    on the panel grid by construction.
    """
    x0, x1 = alloc.x0, alloc.x1
    if not x1 > x0:
        return 0.0
    edges = np.geomspace(x0, x1, n_panels + 1) if x0 > 0 else \
        np.linspace(x0, x1, n_panels + 1)
    gl_x, gl_w = np.polynomial.legendre.leggauss(4)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * gl_x[None, :]).ravel()
    sf = np.asarray(dist.sf(nodes), dtype=float)
    vals = sf * nodes * alloc.rho(nodes) / (1.0 + nodes * alloc.I(nodes))
    return float((vals.reshape(-1, 4) @ gl_w * half).sum())


def sep_rate(cfg: PowerConfig, strategy: str = "one_step") -> SepRateResult:
    """Broadcasting rate of separate preprocessing with sub-optimal layering.

    ``one_step`` uses the naive-AF optimal allocation both as the transmit
    layering and inside the gain law, then averages the layered rate over
    the resulting gain distribution.  ``iterative`` alternates re-optimizing
    the allocation for the current law and re-deriving the law for the new
    allocation, keeping each iterate's rate evaluated on a consistent
    (allocation, law) pair.
    """
    alloc = naive_optimal_allocation(cfg)
    dist = sep_distribution(alloc, cfg)
    rate = _panel_avg_rate(dist, alloc)
    if strategy == "one_step":
        return SepRateResult(rate=rate, iterations=1, converged=True)
    if strategy != "iterative":
        raise ValueError(f"unknown strategy {strategy!r}")

    best = rate
    prev = rate
    for k in range(2, 21):
        try:
            # tabulated: keeps the next law from recursing through this one
            alloc = rate_engine.tabulated_allocation(
                rate_engine.optimal_allocation(dist, cfg.ps))
        except (rate_engine.MonotonicityError, numerics.BracketError):
            # the re-optimized interference is not a valid (nonincreasing)
            # allocation for this law; keep the best consistent iterate
            return SepRateResult(rate=best, iterations=k - 1, converged=False)
        dist = sep_distribution(alloc, cfg)
        cur = _panel_avg_rate(dist, alloc)
        best = max(best, cur)
        if abs(cur - prev) < 1e-5:
            return SepRateResult(rate=best, iterations=k, converged=True)
        prev = cur
    return SepRateResult(rate=best, iterations=20, converged=False)


# ---------------------------------------------------------------------------
# Multi-session limit
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _segment_integral(alloc, s_max, s_min, lo, hi, weighted):
    """Vectorized int_lo^hi s_max (1 + s_max I(q)) / [(den) (S - q)^2] dq.

    Uses w = 1/(S - q) so the near-singular factor integrates exactly;
    ``weighted`` adds the 1/(1 + s_min I(q)) factor of the Z integral.
    """
    S = s_max + s_min
    w_lo = 1.0 / (S - lo)
    w_hi = 1.0 / (S - hi)
    half = (w_hi - w_lo) / 2.0
    mid = (w_hi + w_lo) / 2.0
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    q = S[:, None] - 1.0 / nodes
    iv = alloc.I(np.clip(q.ravel(), 0.0, None)).reshape(q.shape)
    vals = 1.0 + s_max[:, None] * iv
    if weighted:
        vals = vals / (1.0 + s_min[:, None] * iv)
    return s_max * ((vals * _GL_W[None, :]).sum(axis=1) * half)


def _budget_curve(alloc, s_max, s_min, t, weighted=False):
    """Accumulated session power (or Z) from s_min up to t, per pair."""
    S = s_max + s_min
    b1 = np.clip(alloc.x0, s_min, t)
    b2 = np.clip(alloc.x1, b1, t)
    if not np.isfinite(alloc.x0):
        b1 = t
        b2 = t
    total = _segment_integral(alloc, s_max, s_min, s_min, b1, weighted)
    total += _segment_integral(alloc, s_max, s_min, b1, b2, weighted)
    total += _segment_integral(alloc, s_max, s_min, b2, t, weighted)
    return total


def multisession_gains(s1, s2, alloc: PowerAllocation, cfg: PowerConfig):
    """Vectorized continuum-limit gains for arrays of fading pairs.

    Returns (s_a_star, s_b_star, saturated): the stronger and weaker side
    gains and a mask of pairs whose budget equation could not be met inside
    the open interval (numerically never for Pr < inf, kept as a guard).
    """
    if cfg.coop_mode != WIDE_BAND:
        raise ValueError("the multi-session limit requires wide_band cooperation")
    s1 = np.atleast_1d(np.asarray(s1, dtype=float))
    s2 = np.atleast_1d(np.asarray(s2, dtype=float))
    s_max = np.maximum(s1, s2)
    s_min = np.minimum(s1, s2)
    S = s_max + s_min
    pr = cfg.pr

    degenerate = s_max <= 0.0
    s_max_safe = np.where(degenerate, 1.0, s_max)

    lo = s_min.copy()
    hi = S * (1.0 - 1e-13)
    top = _budget_curve(alloc, s_max_safe, s_min, hi)
    saturated = top < pr

    for _ in range(70):
        mid = 0.5 * (lo + hi)
        val = _budget_curve(alloc, s_max_safe, s_min, mid)
        low_side = val < pr
        lo = np.where(low_side, mid, lo)
        hi = np.where(low_side, hi, mid)
    sb = 0.5 * (lo + hi)
    sb = np.where(saturated, S, sb)

    z = _budget_curve(alloc, s_max_safe, s_min, np.where(saturated, hi, sb),
                      weighted=True)
    sa = s_max + s_min * z / (1.0 + z)
    sa = np.where(saturated, S, sa)

    sa = np.where(degenerate, 0.0, sa)
    sb = np.where(degenerate, 0.0, sb)
    return sa, sb, saturated


def multisession_gain(pair: FadingPair, alloc: PowerAllocation,
                      cfg: PowerConfig) -> float:
    """Destination gain in the continuum limit (stronger side gets s_a*)."""
    sa, sb, _ = multisession_gains(np.array([pair.s1]), np.array([pair.s2]),
                                   alloc, cfg)
    return float(sa[0]) if pair.s1 >= pair.s2 else float(sb[0])


def multisession_rate(alloc: PowerAllocation, cfg: PowerConfig,
                      n_samples: int = 200_000, seed: int = 20251,
                      method: str = "mc") -> RateEstimate:
    """Average layered rate of the continuum multi-session scheme.

    Monte Carlo over fading pairs by default (each gain needs a root
    solve, which vectorizes well over pairs); a tensor-quadrature variant
    is available for small node grids.
    """
    rate_fn = rate_engine.layered_rate_fn(alloc)
    if method == "quadrature":
        n = 64
        gl_x, gl_w = np.polynomial.legendre.leggauss(n)
        u = 0.5 * (gl_x + 1.0)
        w = 0.5 * gl_w
        a = -np.log1p(-u)
        aa, bb = np.meshgrid(a, a, indexing="ij")
        sa, sb, _ = multisession_gains(aa.ravel(), bb.ravel(), alloc, cfg)
        gain = np.where(aa.ravel() >= bb.ravel(), sa, sb)
        vals = rate_fn(gain).reshape(n, n)
        rate = float(w @ vals @ w)
        return RateEstimate(rate=rate)
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")

    from . import oracle

    s1, s2 = oracle.sample_pair_arrays(oracle.SampleConfig(n_samples, seed))
    sa, sb, saturated = multisession_gains(s1, s2, alloc, cfg)
    gain = np.where(s1 >= s2, sa, sb)
    rates = rate_fn(gain)
    warn = ()
    n_sat = int(np.count_nonzero(saturated))
    if n_sat:
        warn = (f"budget saturated for {n_sat} of {n_samples} pairs",)
    return RateEstimate(rate=float(rates.mean()),
                        stderr=oracle.jackknife_stderr(rates),
                        n_samples=n_samples, warnings=warn)


# ---------------------------------------------------------------------------
# Exact finite-session recursion (oracle for the continuum limit)
# ---------------------------------------------------------------------------

def discrete_session_trace(pair: FadingPair, alloc: PowerAllocation,
                           schedule: SessionSchedule):
    """Per-session (s_a, s_b) sequence of the exact finite-K recursion.

    Session i adds delta_i to both directions; the common decoded level
    after session i solves the implicit fixed point

        s_b_i = s_min + s_max X_i / (1 + X_i),
        X_i   = X_{i-1} + delta_i / (1 + I(s_b_i) s_max),

    (the forwarded noise level is set by the layer where the *weaker* user
    currently stands), resolved by damped fixed-point iteration seeded with
    the previous session's level.
    """
    s_max, s_min = pair.s_max, pair.s_min
    x_a = 0.0  # accumulates delta / (1 + I(sb) s_max): drives s_b
    x_b = 0.0  # accumulates delta / (1 + I(sb) s_min): drives s_a
    sb = s_min
    trace = []
    for delta in schedule.deltas[:, 0]:
        sb_i = sb
        converged = False
        for _ in range(100):
            x_new = x_a + delta / (1.0 + float(alloc.I(sb_i)) * s_max)
            candidate = s_min + s_max * x_new / (1.0 + x_new)
            step = candidate - sb_i
            sb_i = sb_i + 0.9 * step
            if abs(step) <= 1e-10 * (1.0 + abs(candidate)):
                sb_i = candidate
                converged = True
                break
        if not converged:
            raise RuntimeError("per-session fixed point did not converge")
        i_level = float(alloc.I(sb_i))
        x_a += delta / (1.0 + i_level * s_max)
        x_b += delta / (1.0 + i_level * s_min)
        sb = s_min + s_max * x_a / (1.0 + x_a)
        sa = s_max + s_min * x_b / (1.0 + x_b)
        trace.append((sa, sb))
    return trace


def discrete_session_oracle(pair: FadingPair, alloc: PowerAllocation,
                            schedule: SessionSchedule):
    """Final (s_a, s_b) of the exact finite-session recursion."""
    trace = discrete_session_trace(pair, alloc, schedule)
    return trace[-1]
