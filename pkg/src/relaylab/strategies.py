"""Uniform strategy registry: names, dispatch, and RTE variants.

Strategy names are colon-joined, e.g. ``bound:broadcast_lb``, ``af:naive``,
``af:separate:iterative``, ``cf:naive_nb``, ``df:wb``; appending ``:rte``
selects the reliable-throughput (common information) variant where the
rate is set by the smaller of the two role-swapped equivalent gains.

Broadcast strategies default to the allocation named in their definition
(naive schemes use their own rate-optimal layering, separate/multi-session
schemes default to the joint-decoding optimal one); pass ``alloc_name`` to
override where meaningful.  Each strategy pins the cooperation-link mode
it is defined for (single-session schemes narrow band, multi-session wide
band); bounds and DF follow the configuration's mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import af, bounds, cf, df, fading, oracle, rate_engine
from .fading import (FadingPair, PowerConfig, NARROW_BAND, WIDE_BAND,
                     linear_to_db)

__all__ = [
    "ConfigurationError",
    "RatePoint",
    "StrategySpec",
    "default_strategies",
    "evaluate",
    "expand_strategy_names",
    "gain_samples",
    "parse_strategy",
    "registered_names",
    "rte_gain",
]

DEFAULT_MULTISESSION_K = 8


class ConfigurationError(ValueError):
    """Unknown strategy, allocation, or incompatible configuration."""


@dataclass(frozen=True)
class StrategySpec:
    family: str
    variant: str
    alloc_name: str | None = None
    rte: bool = False

    @property
    def name(self) -> str:
        return f"{self.family}:{self.variant}" + (":rte" if self.rte else "")


@dataclass(frozen=True)
class RatePoint:
    strategy: str
    alloc: str
    ps_db: float
    pr_db: float
    coop_mode: str
    rate: float  # nats
    threshold: float | None = None
    stderr: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    warnings: tuple = field(default=())

    def rate_in(self, units: str) -> float:
        if units == "nats":
            return self.rate
        if units == "bits":
            return self.rate / math.log(2.0)
        raise ConfigurationError(f"unknown units {units!r}")


# (family, variant) -> (kind, pinned coop mode or None, rte allowed)
_REGISTRY = {
    ("bound", "outage_lb"): ("bound", None, False),
    ("bound", "broadcast_lb"): ("bound", None, False),
    ("bound", "outage_ub"): ("bound", None, False),
    ("bound", "broadcast_ub"): ("bound", None, False),
    ("bound", "cut_set"): ("bound", None, False),
    ("bound", "ergodic_1"): ("bound", None, False),
    ("bound", "ergodic_2"): ("bound", None, False),
    ("af", "naive"): ("analytic", NARROW_BAND, True),
    ("af", "naive_outage"): ("analytic", NARROW_BAND, False),
    ("af", "separate"): ("analytic", NARROW_BAND, True),
    ("af", "separate_iterative"): ("analytic", NARROW_BAND, False),
    ("af", "multisession"): ("mc", WIDE_BAND, True),
    ("cf", "naive_nb"): ("analytic", NARROW_BAND, True),
    ("cf", "naive_nb_outage"): ("analytic", NARROW_BAND, False),
    ("cf", "naive_wb"): ("analytic", WIDE_BAND, True),
    ("cf", "separate"): ("mc", NARROW_BAND, True),
    ("cf", "multisession"): ("mc", WIDE_BAND, True),
    ("df", "nb"): ("analytic", NARROW_BAND, False),
    ("df", "wb"): ("analytic", WIDE_BAND, False),
}

_ALLOC_BUILDERS = {
    "su_opt": lambda cfg: fading.alloc_single_user_opt(cfg.ps),
    "joint_opt": lambda cfg: fading.alloc_joint_opt(cfg.ps),
    "sel_opt": lambda cfg: fading.alloc_selection_opt(cfg.ps),
    "naf_opt": lambda cfg: af.naive_optimal_allocation(cfg),
    "nwz_opt": lambda cfg: cf.naive_optimal_allocation(cfg),
}

_DEFAULT_ALLOC = {
    ("af", "naive"): "naf_opt",
    ("af", "naive_outage"): None,
    ("af", "separate"): "naf_opt",
    ("af", "separate_iterative"): "naf_opt",
    ("af", "multisession"): "joint_opt",
    ("cf", "naive_nb"): "nwz_opt",
    ("cf", "naive_nb_outage"): None,
    ("cf", "naive_wb"): "nwz_opt",
    ("cf", "separate"): "joint_opt",
    ("cf", "multisession"): "joint_opt",
    ("df", "nb"): "sel_opt",
    ("df", "wb"): "sel_opt",
}


def registered_names():
    out = []
    for (family, variant), (_, _, rte_ok) in _REGISTRY.items():
        out.append(f"{family}:{variant}")
        if rte_ok:
            out.append(f"{family}:{variant}:rte")
    return out


def parse_strategy(name: str, alloc_name: str | None = None) -> StrategySpec:
    parts = name.split(":")
    rte = False
    if parts and parts[-1] == "rte":
        rte = True
        parts = parts[:-1]
    if len(parts) != 2:
        raise ConfigurationError(f"unknown strategy {name!r}")
    family, variant = parts
    key = (family, variant)
    if key not in _REGISTRY:
        raise ConfigurationError(f"unknown strategy {name!r}")
    if rte and not _REGISTRY[key][2]:
        raise ConfigurationError(f"strategy {family}:{variant} has no rte variant")
    if alloc_name is not None and alloc_name not in _ALLOC_BUILDERS:
        raise ConfigurationError(f"unknown allocation {alloc_name!r}")
    return StrategySpec(family=family, variant=variant, alloc_name=alloc_name,
                        rte=rte)


def expand_strategy_names(names):
    """Expand group aliases (``bounds``, ``all``) into concrete names."""
    out = []
    for name in names:
        if name == "bounds":
            out.extend(["bound:outage_lb", "bound:broadcast_lb",
                        "bound:outage_ub", "bound:broadcast_ub"])
        elif name == "all":
            out.extend(registered_names())
        else:
            out.append(name)
    return out


def default_strategies():
    """The curve set of a typical rate-comparison sweep."""
    return ["bound:outage_lb", "bound:broadcast_lb", "bound:outage_ub",
            "bound:broadcast_ub", "af:naive", "af:separate",
            "af:multisession", "cf:naive_nb"]


def _effective_cfg(spec: StrategySpec, cfg: PowerConfig) -> PowerConfig:
    pinned = _REGISTRY[(spec.family, spec.variant)][1]
    if pinned is not None and cfg.coop_mode != pinned:
        return cfg.with_mode(pinned)
    return cfg


def _resolve_alloc(spec: StrategySpec, cfg: PowerConfig):
    name = spec.alloc_name or _DEFAULT_ALLOC.get((spec.family, spec.variant))
    if name is None:
        return None, "-"
    try:
        return _ALLOC_BUILDERS[name](cfg), name
    except KeyError:
        raise ConfigurationError(f"unknown allocation {name!r}") from None


def rte_gain(base, pair: FadingPair, *args, **kwargs) -> float:
    """Common-information gain: min of the two role-swapped base gains."""
    swapped = FadingPair(pair.s2, pair.s1)
    return min(float(base(pair, *args, **kwargs)),
               float(base(swapped, *args, **kwargs)))


def gain_samples(spec: StrategySpec, cfg: PowerConfig, sc: oracle.SampleConfig):
    """Vectorized equivalent-gain draws and the allocation they decode.

    Returns (gains, alloc); Monte Carlo averages of the layered rate over
    these draws estimate the strategy's broadcast rate.
    """
    cfg = _effective_cfg(spec, cfg)
    alloc, _ = _resolve_alloc(spec, cfg)
    if alloc is None:
        raise ConfigurationError(f"{spec.name} has no gain-map form")
    s1, s2 = oracle.sample_pair_arrays(sc)

    family, variant = spec.family, spec.variant
    if family == "af" and variant == "naive":
        g = af.naive_gains(s1, s2, cfg)
        g_sw = af.naive_gains(s2, s1, cfg)
    elif family == "af" and variant in ("separate", "separate_iterative"):
        g = af.sep_gains(s1, s2, alloc, cfg)
        g_sw = af.sep_gains(s2, s1, alloc, cfg)
    elif family == "af" and variant == "multisession":
        sa, sb, _ = af.multisession_gains(s1, s2, alloc, cfg)
        if spec.rte:
            return sb, alloc
        return np.where(s1 >= s2, sa, sb), alloc
    elif family == "cf" and variant.startswith("naive"):
        g = cf.naive_gains(s1, s2, cfg)
        g_sw = cf.naive_gains(s2, s1, cfg)
    elif family == "cf" and variant == "separate":
        sa, sb = cf._final_gains_vectorized(
            s1, s2, alloc, af.SessionSchedule.uniform(1, cfg.pr))
        if spec.rte:
            return np.minimum(sa, sb), alloc
        return sa, alloc
    elif family == "cf" and variant == "multisession":
        sched = af.SessionSchedule.uniform(DEFAULT_MULTISESSION_K, cfg.pr)
        sa, sb = cf._final_gains_vectorized(s1, s2, alloc, sched)
        if spec.rte:
            return np.minimum(sa, sb), alloc
        return sa, alloc
    else:
        raise ConfigurationError(f"{spec.name} has no gain-map form")

    if spec.rte:
        return np.minimum(g, g_sw), alloc
    return g, alloc


def _mc_rate(spec, cfg, sc):
    gains, alloc = gain_samples(spec, cfg, sc)
    rates = rate_engine.layered_rate_fn(alloc)(gains)
    return float(rates.mean()), oracle.jackknife_stderr(rates)


def evaluate(spec: StrategySpec, cfg: PowerConfig,
             sc: oracle.SampleConfig | None = None) -> RatePoint:
    """Evaluate one strategy at one operating point.

    Analytic strategies ignore the sampling configuration; Monte Carlo
    ones (multi-session, CF separate, every rte variant) use it and report
    a jackknife standard error.
    """
    key = (spec.family, spec.variant)
    if key not in _REGISTRY:
        raise ConfigurationError(f"unknown strategy {spec.name!r}")
    eff = _effective_cfg(spec, cfg)
    if sc is None:
        sc = oracle.SampleConfig(200_000, oracle.default_seed())

    alloc_name = "-"
    threshold = None
    stderr = None
    n_samples = None
    seed = None
    warnings: tuple = ()

    monte_carlo = spec.rte or _REGISTRY[key][0] == "mc" or \
        (spec.family, spec.variant) == ("cf", "separate")

    if spec.family == "bound":
        rate = _evaluate_bound(spec.variant, eff)
        if spec.variant == "outage_lb":
            threshold = bounds.outage_threshold(eff.ps)
    elif spec.family == "df":
        alloc, alloc_name = _resolve_alloc(spec, eff)
        rate = df.df_avg_rate(alloc, eff)
    elif monte_carlo:
        rate, stderr = _mc_rate(spec, eff, sc)
        _, alloc_name = _resolve_alloc(spec, eff)
        n_samples = sc.n_samples
        seed = sc.master_seed
    elif spec.family == "af" and spec.variant in ("separate",
                                                  "separate_iterative"):
        rate, alloc_name, warnings = _af_separate_analytic(spec, eff)
    elif spec.family == "af":
        rate, threshold, alloc_name, warnings = _af_analytic(spec, eff)
    elif spec.family == "cf":
        rate, threshold, alloc_name, warnings = _cf_analytic(spec, eff)
    else:
        raise ConfigurationError(f"unknown strategy {spec.name!r}")

    return RatePoint(strategy=spec.name, alloc=alloc_name,
                     ps_db=float(linear_to_db(eff.ps)),
                     pr_db=float(linear_to_db(eff.pr)) if eff.pr > 0 else -math.inf,
                     coop_mode=eff.coop_mode, rate=rate, threshold=threshold,
                     stderr=stderr, n_samples=n_samples, seed=seed,
                     warnings=warnings)


def _evaluate_bound(variant: str, cfg: PowerConfig) -> float:
    if variant == "outage_lb":
        return bounds.outage_lb(cfg.ps)
    if variant == "broadcast_lb":
        return bounds.broadcast_lb(cfg.ps)
    if variant == "outage_ub":
        return bounds.outage_ub(cfg.ps)
    if variant == "broadcast_ub":
        return bounds.broadcast_ub(cfg.ps)
    if variant == "cut_set":
        return bounds.cut_set(cfg)
    if variant == "ergodic_1":
        return bounds.ergodic_capacity(1, cfg.ps)
    if variant == "ergodic_2":
        return bounds.ergodic_capacity(2, cfg.ps)
    raise ConfigurationError(f"unknown bound variant {variant!r}")


def _af_analytic(spec, cfg):
    if spec.variant == "naive":
        rates = af.naive_rates(cfg)
        warn = ("outage objective multimodal",) if rates.multimodal else ()
        return rates.broadcast, None, "naf_opt", warn
    if spec.variant == "naive_outage":
        rates = af.naive_rates(cfg)
        warn = ("outage objective multimodal",) if rates.multimodal else ()
        return rates.outage, rates.threshold, "-", warn
    raise ConfigurationError(f"unknown af variant {spec.variant!r}")


def _af_separate_analytic(spec, cfg):
    mode = "iterative" if spec.variant == "separate_iterative" else "one_step"
    res = af.sep_rate(cfg, mode)
    warn = () if res.converged else ("iteration did not converge",)
    return res.rate, "naf_opt", warn


def _cf_analytic(spec, cfg):
    if spec.variant in ("naive_nb", "naive_wb"):
        rates = cf.naive_rates(cfg)
        warn = ("outage objective multimodal",) if rates.multimodal else ()
        return rates.broadcast, None, "nwz_opt", warn
    if spec.variant == "naive_nb_outage":
        rates = cf.naive_rates(cfg)
        warn = ("outage objective multimodal",) if rates.multimodal else ()
        return rates.outage, rates.threshold, "-", warn
    raise ConfigurationError(f"unknown cf variant {spec.variant!r}")
