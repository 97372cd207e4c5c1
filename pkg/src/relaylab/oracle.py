"""Deterministic Monte Carlo fading simulator.

Fading pairs are drawn with a counter-based generator (Philox) keyed by the
master seed, so sample i is a pure function of (seed, i): results do not
depend on chunk sizes or worker counts, and any sub-range of the stream can
be regenerated independently.  Gains use the inverse-CDF map s = -log(U)
with U uniform on (0, 1].

The module provides empirical distributions with Kolmogorov-Smirnov
distances against model CDFs, and Monte Carlo average layered rates with
jackknife standard errors; these are the independent checks run against
every closed form in the library.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .fading import DistributionModel, FadingPair

__all__ = [
    "DEFAULT_SEED",
    "EmpiricalCdf",
    "SampleConfig",
    "empirical_avg_rate",
    "empirical_distribution",
    "jackknife_stderr",
    "ks_critical_value",
    "sample_pair_arrays",
    "sample_pairs",
]

DEFAULT_SEED = 20251


def default_seed() -> int:
    env = os.environ.get("RELAYLAB_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


@dataclass(frozen=True)
class SampleConfig:
    n_samples: int
    master_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")


def _uniforms(seed: int, start: int, count: int) -> np.ndarray:
    # Philox emits blocks of four 64-bit words per counter value and each
    # float64 consumes one word; advance() moves whole blocks, so the
    # in-block offset is skipped by drawing and discarding.
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start // 4)
    offset = start % 4
    vals = np.random.Generator(bitgen).random(offset + count)
    return vals[offset:]


def sample_pair_arrays(sc: SampleConfig, start: int = 0, count: int | None = None):
    """Arrays (s1, s2) of unit-mean exponential gains for pair indices
    [start, start + count)."""
    if count is None:
        count = sc.n_samples
    u = _uniforms(sc.master_seed, 2 * start, 2 * count)
    # -log(1 - U) maps U in [0, 1) onto [0, inf) without ever taking log(0).
    s = -np.log1p(-u)
    return s[0::2], s[1::2]


def sample_pairs(sc: SampleConfig, start: int = 0):
    """Iterator of FadingPair over the deterministic sample stream."""
    chunk = 8192
    produced = 0
    while produced < sc.n_samples:
        n = min(chunk, sc.n_samples - produced)
        s1, s2 = sample_pair_arrays(sc, start=start + produced, count=n)
        for a, b in zip(s1, s2):
            yield FadingPair(float(a), float(b))
        produced += n


def ks_critical_value(n: int, alpha: float = 0.05) -> float:
    """Asymptotic two-sided KS critical value c(alpha)/sqrt(n)."""
    coeff = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return coeff / math.sqrt(n)


class EmpiricalCdf:
    """Sorted-sample step CDF with KS distance against model CDFs."""

    def __init__(self, samples: np.ndarray):
        self.samples = np.sort(np.asarray(samples, dtype=float))
        self.n = len(self.samples)

    def __call__(self, x):
        return np.searchsorted(self.samples, np.asarray(x, dtype=float),
                               side="right") / self.n

    def ks_distance(self, model: DistributionModel,
                    eval_points: int | None = None) -> float:
        """sup_x |F_model(x) - F_hat(x)|, evaluated at the sample points.

        With ``eval_points`` set, the model CDF is tabulated at that many
        sample quantiles and monotonically interpolated in between; the
        interpolation error is far below the acceptance thresholds and
        makes expensive quadrature-backed CDFs affordable at 1e5 samples.
        """
        xs = self.samples
        if eval_points is not None and eval_points < self.n:
            idx = np.unique(np.linspace(0, self.n - 1, eval_points).astype(int))
            knots = xs[idx]
            knots, keep = np.unique(knots, return_index=True)
            fk = np.asarray(model.cdf(knots), dtype=float)
            from scipy.interpolate import PchipInterpolator
            interp = PchipInterpolator(knots, fk, extrapolate=False)
            fx = interp(xs)
            fx = np.where(np.isnan(fx), np.clip(np.interp(xs, knots, fk), 0, 1), fx)
        else:
            fx = np.asarray(model.cdf(xs), dtype=float)
        i = np.arange(1, self.n + 1)
        upper = np.max(np.abs(fx - i / self.n))
        lower = np.max(np.abs(fx - (i - 1) / self.n))
        return float(max(upper, lower))


def empirical_distribution(gain_map, sc: SampleConfig, *args,
                           **kwargs) -> EmpiricalCdf:
    """Empirical CDF of ``gain_map(s1, s2, *args)`` over the sample stream.

    ``gain_map`` must accept vectorized (s1, s2) arrays followed by the
    extra positional arguments (configuration, allocation, ...).
    """
    s1, s2 = sample_pair_arrays(sc)
    return EmpiricalCdf(np.asarray(gain_map(s1, s2, *args, **kwargs)))


def jackknife_stderr(values: np.ndarray, groups: int = 100) -> float:
    """Delete-one-group jackknife standard error of the sample mean."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    g = min(groups, n)
    if g < 2:
        return float("nan")
    usable = n - (n % g)
    blocks = values[:usable].reshape(g, -1)
    rest_sum = values[usable:].sum()
    total = blocks.sum() + rest_sum
    block_sums = blocks.sum(axis=1)
    m = blocks.shape[1]
    leave_out_means = (total - block_sums) / (n - m)
    center = leave_out_means.mean()
    var = (g - 1) / g * np.sum((leave_out_means - center) ** 2)
    return float(math.sqrt(var))


def empirical_avg_rate(spec, sc: SampleConfig, cfg):
    """Monte Carlo mean layered rate for a registered strategy.

    Returns (rate, stderr).  Dispatch lives in ``strategies``; imported
    lazily to keep this module free of registry dependencies.
    """
    from . import strategies

    gains, alloc = strategies.gain_samples(spec, cfg, sc)
    from . import rate_engine

    rates = rate_engine.layered_rate_fn(alloc)(gains)
    return float(np.mean(rates)), jackknife_stderr(rates)
