"""Scalar special functions, quadrature, root finding and 1-D maximization.

Everything downstream (fading laws, layering integrals, equivalent-gain
solvers) is built on the handful of primitives in this module:

* ``lambert_w0``     principal branch of w e^w = x (Halley iteration)
* ``exp_integral_e1`` E1(x) = int_x^inf e^-t / t dt (series / continued
  fraction), plus the overflow-safe scaled variant e^x E1(x)
* ``integrate``      adaptive quadrature on [a, b] with b possibly infinite
* ``find_root``      bracketed root solve
* ``maximize_1d``    grid scan + local refinement for (possibly) multimodal
  objectives

All functions are pure and reentrant; the special functions accept scalars
or numpy arrays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate as _sciint
from scipy import optimize as _sciopt

__all__ = [
    "Bracket",
    "BracketError",
    "IntegrationError",
    "MaximizeResult",
    "TabulatedCumulative",
    "exp_integral_e1",
    "exp_integral_e1_scaled",
    "find_root",
    "integrate",
    "lambert_w0",
    "maximize_1d",
]

# Default absolute tolerances: tight for inner (1-D) integrals, looser for
# outer expectations where the outer error dominates anyway.
INNER_ABS_TOL = 1e-9
OUTER_ABS_TOL = 1e-7

_EULER_GAMMA = 0.5772156649015328606

RealFunction = Callable[[float], float]


class IntegrationError(RuntimeError):
    """Quadrature did not converge within the subdivision budget.

    Carries the best available estimate in ``estimate`` so callers can
    decide whether to proceed with a degraded value.
    """

    def __init__(self, message, estimate=math.nan, error=math.nan):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


def _as_bracket(bracket) -> Bracket:
    if isinstance(bracket, Bracket):
        return bracket
    lo, hi = bracket
    return Bracket(float(lo), float(hi))


# ---------------------------------------------------------------------------
# Lambert W, principal branch
# ---------------------------------------------------------------------------

def lambert_w0(x):
    """Principal branch of the omega relation w * exp(w) = x for x >= -1/e.

    Halley iteration seeded with log1p(x) for x >= 0 and with the branch
    point expansion w = -1 + p - p^2/3, p = sqrt(2(e x + 1)) for x < 0.
    Converges to machine precision (relative error well below 1e-12).
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < -1.0 / math.e - 1e-15):
        raise ValueError("lambert_w0 requires x >= -1/e")

    scalar = x_arr.ndim == 0
    xv = np.atleast_1d(x_arr).astype(float)

    w = np.where(xv >= 0.0, np.log1p(np.maximum(xv, 0.0)), 0.0)
    neg = xv < 0.0
    if np.any(neg):
        p = np.sqrt(np.maximum(2.0 * (math.e * xv[neg] + 1.0), 0.0))
        w_neg = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
        w[neg] = w_neg

    for _ in range(64):
        ew = np.exp(w)
        f = w * ew - xv
        wp1 = w + 1.0
        # Halley step; the correction of the Newton denominator uses f''/f'.
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(denom != 0.0, f / denom, 0.0)
        w = w - step
        if np.all(np.abs(step) <= 1e-16 * (1.0 + np.abs(w))):
            break

    # Exact endpoint: the iteration stalls at the branch point where the
    # derivative of w e^w vanishes.
    w = np.where(np.abs(xv + 1.0 / math.e) < 4e-17, -1.0, w)
    return float(w[0]) if scalar else w.reshape(x_arr.shape)


# ---------------------------------------------------------------------------
# Exponential integral E1
# ---------------------------------------------------------------------------

def _e1_series(x):
    """Power series -gamma - ln x + sum (-1)^{k+1} x^k / (k k!), for x < 1."""
    total = -_EULER_GAMMA - np.log(x)
    term = np.ones_like(x)
    for k in range(1, 64):
        term = term * (-x) / k
        contrib = -term / k
        total = total + contrib
        if np.all(np.abs(contrib) <= 1e-18 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _e1_cf_scaled(x):
    """Modified Lentz continued fraction for e^x E1(x), stable for x >= 1."""
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 200):
        a = -float(i * i)
        b = b + 2.0
        d = 1.0 / (b + a * d)
        c = b + a / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-17):
            break
    return h


def exp_integral_e1(x):
    """E1(x) = int_x^inf e^-t / t dt for x > 0, relative error <~ 1e-13.

    Series expansion below 1, continued fraction at or above 1 (both are
    their regions of fast convergence).
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0.0):
        raise ValueError("exp_integral_e1 requires x > 0")
    scalar = x_arr.ndim == 0
    xv = np.atleast_1d(x_arr).astype(float)

    out = np.empty_like(xv)
    small = xv < 1.0
    if np.any(small):
        out[small] = _e1_series(xv[small])
    if np.any(~small):
        xl = xv[~small]
        with np.errstate(under="ignore"):
            out[~small] = np.exp(-xl) * _e1_cf_scaled(xl)
    return float(out[0]) if scalar else out.reshape(x_arr.shape)


def exp_integral_e1_scaled(x):
    """e^x E1(x); overflow-safe for large x (decays like 1/x)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0.0):
        raise ValueError("exp_integral_e1_scaled requires x > 0")
    scalar = x_arr.ndim == 0
    xv = np.atleast_1d(x_arr).astype(float)

    out = np.empty_like(xv)
    small = xv < 1.0
    if np.any(small):
        xs = xv[small]
        out[small] = np.exp(xs) * _e1_series(xs)
    if np.any(~small):
        out[~small] = _e1_cf_scaled(xv[~small])
    return float(out[0]) if scalar else out.reshape(x_arr.shape)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def integrate(f, a, b, abs_tol=INNER_ABS_TOL, limit=200):
    """Adaptive quadrature of ``f`` over [a, b]; b may be ``math.inf``.

    A semi-infinite upper limit is mapped onto [0, 1) with
    t = a + u / (1 - u), which keeps the adaptive subdivision concentrated
    near the finite endpoint where fading densities peak.

    Raises IntegrationError (carrying the partial estimate) if the
    subdivision budget is exhausted before the requested tolerance.
    """
    if not abs_tol > 0:
        raise ValueError("abs_tol must be positive")
    a = float(a)
    if math.isinf(b):
        def transformed(u):
            om = 1.0 - u
            return f(a + u / om) / (om * om)

        return _quad_checked(transformed, 0.0, 1.0, abs_tol, limit)
    return _quad_checked(f, a, float(b), abs_tol, limit)


def _quad_checked(f, a, b, abs_tol, limit):
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = _sciint.quad(f, a, b, epsabs=abs_tol, epsrel=1e-11,
                              limit=limit, full_output=1)
    value, err = result[0], result[1]
    if len(result) > 3:  # a warning message was produced
        # Roundoff-limited results that still meet the tolerance are fine.
        if not err <= 10.0 * abs_tol + 1e-13 * abs(value):
            raise IntegrationError(result[3], estimate=value, error=err)
    return value


class TabulatedCumulative:
    """Vectorized G(t) = int_a^t g(u) du for a smooth vectorized integrand.

    Panel sums are precomputed once with Gauss-Legendre; a query completes
    the partial panel with the same rule, so evaluations are exact to rule
    precision (no interpolation error) while remaining fully vectorized.
    """

    def __init__(self, g, a, b, n_panels=2048, order=12):
        self.a = float(a)
        self.b = float(b)
        self._g = g
        self._edges = np.linspace(self.a, self.b, n_panels + 1)
        gl_x, gl_w = np.polynomial.legendre.leggauss(order)
        self._gl_x = gl_x
        self._gl_w = gl_w
        half = np.diff(self._edges) / 2.0
        mid = (self._edges[:-1] + self._edges[1:]) / 2.0
        nodes = mid[:, None] + half[:, None] * gl_x[None, :]
        vals = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
        panel = (vals * gl_w[None, :]).sum(axis=1) * half
        self._cum = np.concatenate([[0.0], np.cumsum(panel)])
        self.total = float(self._cum[-1])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        tv = np.atleast_1d(t_arr).astype(float)
        tc = np.clip(tv, self.a, self.b)
        idx = np.clip(np.searchsorted(self._edges, tc, side="right") - 1,
                      0, len(self._edges) - 2)
        lo = self._edges[idx]
        out = self._cum[idx].copy()
        half = (tc - lo) / 2.0
        mid = (tc + lo) / 2.0
        nodes = mid[:, None] + half[:, None] * self._gl_x[None, :]
        vals = np.asarray(self._g(nodes.ravel()), dtype=float).reshape(nodes.shape)
        out += (vals * self._gl_w[None, :]).sum(axis=1) * half
        # Beyond the table the tail is treated as exhausted (caller chooses
        # b far enough out that the integrand has underflowed).
        out[tv > self.b] = self.total
        return float(out[0]) if scalar else out.reshape(t_arr.shape)


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def find_root(f, bracket, tol=1e-12):
    """Root of ``f`` inside a sign-changing bracket (Brent's method).

    Brent is bracketing, so convergence is guaranteed whenever
    f(lo) * f(hi) <= 0; degenerates to bisection in the worst case.
    """
    br = _as_bracket(bracket)
    flo = f(br.lo)
    fhi = f(br.hi)
    if flo == 0.0:
        return br.lo
    if fhi == 0.0:
        return br.hi
    if flo * fhi > 0.0:
        raise BracketError(
            f"no sign change on [{br.lo}, {br.hi}]: f(lo)={flo}, f(hi)={fhi}")
    return float(_sciopt.brentq(f, br.lo, br.hi, xtol=tol, rtol=8.9e-16,
                                maxiter=200))


# ---------------------------------------------------------------------------
# 1-D maximization
# ---------------------------------------------------------------------------

class MaximizeResult(NamedTuple):
    argmax: float
    value: float
    multimodal: bool


def maximize_1d(f, bracket, tol=1e-10, n_scan=512):
    """Maximize ``f`` on a bracket: coarse scan, then local refinement.

    The scan is log-spaced when the bracket is strictly positive (outage
    objectives for composite fading laws vary over decades) and linear
    otherwise.  If the scan sees several separated local maxima, the best
    one is still refined but the result is flagged ``multimodal``; a flat
    plateau is flagged the same way.
    """
    br = _as_bracket(bracket)
    if br.lo > 0:
        grid = np.geomspace(br.lo, br.hi, n_scan)
    else:
        grid = np.linspace(br.lo, br.hi, n_scan)
    vals = np.array([f(x) for x in grid])

    spread = float(np.max(vals) - np.min(vals))
    scale = max(abs(float(np.max(vals))), 1.0)
    if spread <= 1e-13 * scale:
        # Degenerate plateau: any point attains the maximum.
        mid = grid[n_scan // 2]
        return MaximizeResult(float(mid), float(f(mid)), True)

    noise = 1e-12 * scale
    interior = np.arange(1, n_scan - 1)
    is_peak = (vals[interior] >= vals[interior - 1] + noise) & \
              (vals[interior] >= vals[interior + 1] + noise)
    n_peaks = int(np.count_nonzero(is_peak))
    multimodal = n_peaks > 1

    best = int(np.argmax(vals))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, n_scan - 1)]
    if lo == hi:
        return MaximizeResult(float(lo), float(vals[best]), multimodal)

    res = _sciopt.minimize_scalar(lambda x: -f(x), bounds=(lo, hi),
                                  method="bounded",
                                  options={"xatol": tol, "maxiter": 500})
    x_star = float(res.x)
    v_star = float(f(x_star))
    if v_star < vals[best]:
        x_star, v_star = float(grid[best]), float(vals[best])

    # Flatness limits a value-based search to ~sqrt(eps) in x; polish the
    # argmax with a root solve on the central-difference derivative.
    h = 1e-5 * max(abs(x_star), 1e-3)
    dlo, dhi = x_star - 16 * h, x_star + 16 * h
    if dlo > br.lo and dhi < br.hi:
        def deriv(x):
            return (f(x + h) - f(x - h)) / (2.0 * h)
        try:
            g_lo, g_hi = deriv(dlo), deriv(dhi)
            if g_lo > 0.0 > g_hi:
                x_ref = float(_sciopt.brentq(deriv, dlo, dhi, xtol=1e-14))
                v_ref = float(f(x_ref))
                if v_ref >= v_star - 1e-15 * max(abs(v_star), 1.0):
                    x_star, v_star = x_ref, max(v_ref, v_star)
        except ValueError:
            pass
    return MaximizeResult(x_star, v_star, multimodal)
