"""Self-validation suites: Monte Carlo KS checks of every closed-form gain
law, analytic-limit and reduction checks, the finite-session convergence
oracle, and the global rate-ordering suite.

Two textual ambiguities in the underlying closed forms are settled here by
measurement rather than by fiat, and the report states the outcome
explicitly:

* the equal-gain term of the separate-preprocessing AF law enters with
  weight 2 (one per symmetric ordering); the weight-1 variant is also
  evaluated and shown to fail the KS test;
* the multi-session AF accumulation Z uses the session-power density with
  the squared range factor (the form whose zero-interference limit gives
  Z = Pr exactly); the single-power alternative is evaluated against the
  exact finite-session recursion and shown to fail.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import af, bounds, cf, df, fading, numerics, oracle, rate_engine
from .af import SessionSchedule
from .fading import FadingPair, PowerConfig

__all__ = ["CheckResult", "ValidationReport", "run_validation"]

KS_LEVELS = {"fast": 10_000, "full": 100_000}
ORDERING_SAMPLES = {"fast": 10_000, "full": 20_000}


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed),
                "value": float(self.value), "threshold": float(self.threshold),
                "detail": self.detail}


@dataclass
class ValidationReport:
    level: str
    checks: list = field(default_factory=list)
    adjudications: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    @property
    def passed(self) -> bool:
        all_checks = all(c.passed for c in self.checks)
        all_adjud = all(any(cand["passed"] for cand in v["candidates"].values())
                        for v in self.adjudications.values())
        return all_checks and all_adjud

    def to_dict(self):
        return {
            "level": self.level,
            "passed": bool(self.passed),
            "elapsed_s": self.elapsed_s,
            "checks": [c.to_dict() for c in self.checks],
            "adjudications": self.adjudications,
        }

    def lines(self):
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            yield f"[{mark}] {c.name}: value={c.value:.6g} threshold={c.threshold:.6g}" + \
                (f" ({c.detail})" if c.detail else "")
        for name, adj in self.adjudications.items():
            yield f"[ADJUDICATION] {name}: adopted={adj['adopted']}"
            for cand, res in adj["candidates"].items():
                mark = "PASS" if res["passed"] else "FAIL"
                yield f"    [{mark}] {cand}: {res['metric']}={res['value']:.6g}" \
                      f" threshold={res['threshold']:.6g}"


def _ks_threshold(n: int) -> float:
    # 2.3x the 95% critical value absorbs quadrature error in the closed
    # forms; at n = 1e5 this is the plain 0.01 acceptance gate.
    return max(2.3 * oracle.ks_critical_value(n), 0.01 if n >= 100_000 else 0.0)


# ---------------------------------------------------------------------------
# KS suite
# ---------------------------------------------------------------------------

def ks_checks(n: int, seed: int = 20251):
    out = []
    thr = _ks_threshold(n)
    configs = [(10.0, 10.0), (10.0, 2.5)]
    for i, (ps, pr) in enumerate(configs):
        cfg = PowerConfig(ps, pr, "narrow_band")
        sc = oracle.SampleConfig(n, seed + i)

        dist = af.naive_distribution(cfg)
        emp = oracle.empirical_distribution(af.naive_gains, sc, cfg)
        d = emp.ks_distance(dist)
        out.append(CheckResult(f"ks_af_naive(ps={ps:g},pr={pr:g})", d < thr, d, thr))

        alloc = fading.alloc_joint_opt(ps)
        sep = af.sep_distribution(alloc, cfg)
        emp = oracle.empirical_distribution(af.sep_gains, sc, alloc, cfg)
        d = emp.ks_distance(sep, eval_points=2048)
        out.append(CheckResult(f"ks_af_sep_jointopt(ps={ps:g},pr={pr:g})",
                               d < thr, d, thr))

        nwz = cf.naive_distribution(cfg)
        emp = oracle.empirical_distribution(cf.naive_gains, sc, cfg)
        d = emp.ks_distance(nwz)
        out.append(CheckResult(f"ks_cf_naive_nb(ps={ps:g},pr={pr:g})", d < thr,
                               d, thr))

        wb = cfg.with_mode("wide_band")
        emp = oracle.empirical_distribution(cf.naive_gains, sc, wb)
        d = emp.ks_distance(cf.naive_distribution(wb))
        out.append(CheckResult(f"ks_cf_naive_wb(ps={ps:g},pr={pr:g})", d < thr,
                               d, thr))

    # the sampler itself against the single-user law
    sc = oracle.SampleConfig(n, seed + 17)
    emp = oracle.empirical_distribution(lambda s1, s2: s1, sc)
    d = emp.ks_distance(fading.rayleigh_model())
    crit = oracle.ks_critical_value(n)
    out.append(CheckResult("ks_sampler_identity", d < crit, d, crit))
    return out


# ---------------------------------------------------------------------------
# Adjudications
# ---------------------------------------------------------------------------

def adjudicate_sep_integrand(n: int, seed: int = 4242) -> dict:
    """Equal-gain term weight of the separate-preprocessing AF law."""
    cfg = PowerConfig(10.0, 2.5, "narrow_band")
    alloc = fading.alloc_joint_opt(cfg.ps)
    sc = oracle.SampleConfig(n, seed)
    emp = oracle.empirical_distribution(af.sep_gains, sc, alloc, cfg)
    thr = _ks_threshold(n)
    candidates = {}
    for label, weight in (("doubled_equal_gain_term", 2.0),
                          ("single_equal_gain_term", 1.0)):
        dist = af.sep_distribution(alloc, cfg, _equal_gain_weight=weight)
        d = emp.ks_distance(dist, eval_points=2048)
        candidates[label] = {"metric": "ks", "value": float(d),
                             "threshold": thr, "passed": bool(d < thr)}
    return {"adopted": "doubled_equal_gain_term", "candidates": candidates}


def _z_alternative(alloc, s_max, s_min, t):
    """Single-power range factor variant of the session accumulation."""
    import scipy.integrate as si

    def integrand(q):
        iq = float(alloc.I(q))
        return (1.0 + s_max * iq) / ((1.0 + s_min * iq) * (s_max + s_min - q))

    val, _ = si.quad(integrand, s_min, t, limit=200)
    return val


def adjudicate_z_form(n_pairs: int = 40, sessions: int = 1000,
                      seed: int = 515) -> dict:
    """Continuum accumulation Z against the exact finite-session recursion."""
    ps, pr = 10.0, 10.0
    cfg = PowerConfig(ps, pr, "wide_band")
    alloc = fading.alloc_joint_opt(ps)
    sched = SessionSchedule.uniform(sessions, pr)
    rng = np.random.default_rng(seed)

    err_adopted, err_alt = [], []
    for _ in range(n_pairs):
        a, b = rng.exponential(size=2)
        s_max, s_min = float(max(a, b)), float(min(a, b))
        pair = FadingPair(s_max, s_min)
        sa_d, _sb_d = af.discrete_session_oracle(pair, alloc, sched)
        sa_c, sb_c, _ = af.multisession_gains([s_max], [s_min], alloc, cfg)
        err_adopted.append(abs(float(sa_c[0]) - sa_d) / sa_d)
        z_alt = _z_alternative(alloc, s_max, s_min, float(sb_c[0]))
        sa_alt = s_max + s_min * z_alt / (1.0 + z_alt)
        err_alt.append(abs(sa_alt - sa_d) / sa_d)

    thr = 0.01
    candidates = {
        "squared_range_factor": {
            "metric": "max_rel_err_vs_discrete",
            "value": float(max(err_adopted)), "threshold": thr,
            "passed": bool(max(err_adopted) < thr)},
        "single_range_factor": {
            "metric": "max_rel_err_vs_discrete",
            "value": float(max(err_alt)), "threshold": thr,
            "passed": bool(max(err_alt) < thr)},
    }
    return {"adopted": "squared_range_factor", "candidates": candidates}


# ---------------------------------------------------------------------------
# Analytic limits and reductions
# ---------------------------------------------------------------------------

def limit_checks():
    out = []

    # multi-session zero-interference identities
    zero = fading.alloc_zero()
    cfg = PowerConfig(5.0, 1.3, "wide_band")
    rng = np.random.default_rng(9)
    s1 = rng.exponential(size=64)
    s2 = rng.exponential(size=64)
    sa, sb, _ = af.multisession_gains(s1, s2, zero, cfg)
    smax, smin = np.maximum(s1, s2), np.minimum(s1, s2)
    err_b = float(np.max(np.abs(sb - (smax + smin - smax / (1 + cfg.pr)))))
    err_a = float(np.max(np.abs(sa - (smax + smin * cfg.pr / (1 + cfg.pr)))))
    out.append(CheckResult("ms_af_zero_interference_sb", err_b < 1e-8, err_b, 1e-8))
    out.append(CheckResult("ms_af_zero_interference_sa", err_a < 1e-8, err_a, 1e-8))

    # separate AF with full interference reduces to naive AF
    cfg = PowerConfig(10.0, 10.0, "narrow_band")
    full = fading.alloc_full_interference(cfg.ps)
    naive = af.naive_distribution(cfg)
    sep = af.sep_distribution(full, cfg)
    xs = np.linspace(0.2, 6.0, 25)
    err = float(np.max(np.abs(sep.cdf(xs) - naive.cdf(xs))))
    out.append(CheckResult("af_sep_reduces_to_naive", err < 1e-6, err, 1e-6))

    # CF gain identity: variance-based form equals the rational form
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(1000):
        a, b = rng.exponential(size=2)
        ps, pr = rng.uniform(0.2, 30.0, size=2)
        c = PowerConfig(ps, pr, "narrow_band")
        direct = cf.naive_gain(FadingPair(a, b), c)
        rational = b + a * (1 + b * ps) * pr / ((1 + pr) * (1 + b * ps) + a * ps)
        worst = max(worst, abs(direct - rational) / max(rational, 1e-12))
    out.append(CheckResult("cf_gain_rational_identity", worst < 1e-10, worst, 1e-10))

    # CF closed-form law against direct quadrature at both branches
    for mode, pr in (("narrow_band", 10.0), ("wide_band", 2.0)):
        c = PowerConfig(10.0, pr, mode)
        dist = cf.naive_distribution(c)
        budget = pr if mode == "narrow_band" else math.expm1(pr)
        worst = 0.0
        for u in (0.1, budget / 10.0 * 0.999, budget / 10.0 * 1.001, 2.0, 7.0):
            worst = max(worst, abs(float(dist.cdf(u)) -
                                   cf._cdf_by_quadrature(u, 10.0, budget)))
        out.append(CheckResult(f"cf_closed_form_vs_quadrature[{mode}]",
                               worst < 1e-8, worst, 1e-8))

    # low-relay-power continuity toward the no-cooperation bound
    blb = bounds.broadcast_lb(1.0)
    low = PowerConfig(1.0, 1e-5, "narrow_band")
    err = abs(af.naive_rates(low).broadcast - blb)
    out.append(CheckResult("af_naive_low_pr_continuity", err < 1e-3, err, 1e-3))
    err = abs(cf.naive_rates(low).broadcast - blb)
    out.append(CheckResult("cf_naive_low_pr_continuity", err < 1e-3, err, 1e-3))

    # closed-form bound identities
    err = abs(bounds.ergodic_capacity(2, 1.0) - 1.0)
    out.append(CheckResult("ergodic_two_user_unit_power", err < 1e-12, err, 1e-12))
    quad = numerics.integrate(lambda u: u * math.exp(-u) * math.log1p(u),
                              0.0, math.inf, abs_tol=1e-10)
    err = abs(quad - 1.0)
    out.append(CheckResult("ergodic_quadrature_identity", err < 1e-6, err, 1e-6))
    return out


def cf_reduction_check(n: int = 1000, seed: int = 77) -> CheckResult:
    """First refinement step from a numerically infinite description must
    reproduce the single-session compression variance."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a, b = rng.exponential(size=2)
        ps = rng.uniform(0.5, 50.0)
        pr = rng.uniform(0.05, 20.0)
        alloc = fading.alloc_joint_opt(ps)
        pair = FadingPair(a, b)
        state0 = cf.CompressionState(sigma2_1=1e12, sigma2_2=1e12, k=0,
                                     s_common=pair.s_min)
        state1 = cf.multisession_step(state0, pair, alloc, pr, pr)
        i_c = float(alloc.I(pair.s_min))
        s_mx, s_mn = pair.s_max, pair.s_min
        expected = (1 + s_mn * i_c + s_mx * i_c) / (pr * (1 + s_mx * i_c))
        got = state1.sigma2_2 if a >= b else state1.sigma2_1
        worst = max(worst, abs(got - expected) / expected)
    return CheckResult("cf_multisession_first_step_reduction", worst < 1e-6,
                       worst, 1e-6, detail=f"{n} random draws")


def continuum_limit_check(n_pairs: int = 100, sessions: int = 1000,
                          seed: int = 123) -> CheckResult:
    """Finite-session recursion converges to the continuum gains."""
    ps, pr = 10.0, 10.0
    cfg = PowerConfig(ps, pr, "wide_band")
    alloc = fading.alloc_joint_opt(ps)
    sched = SessionSchedule.uniform(sessions, pr)
    rng = np.random.default_rng(seed)
    s1 = rng.exponential(size=n_pairs)
    s2 = rng.exponential(size=n_pairs)
    sa_c, sb_c, _ = af.multisession_gains(s1, s2, alloc, cfg)
    worst = 0.0
    for i in range(n_pairs):
        pair = FadingPair(float(max(s1[i], s2[i])), float(min(s1[i], s2[i])))
        sa_d, sb_d = af.discrete_session_oracle(pair, alloc, sched)
        worst = max(worst,
                    abs(sa_d - float(sa_c[i])) / sa_d,
                    abs(sb_d - float(sb_c[i])) / sb_d)
    return CheckResult("ms_af_continuum_limit", worst < 0.01, worst, 0.01,
                       detail=f"{n_pairs} pairs, {sessions} sessions")


# ---------------------------------------------------------------------------
# Global ordering suite
# ---------------------------------------------------------------------------

def ordering_checks(n_samples: int = 20_000, seed: int = 99):
    from . import strategies as strat

    out = []
    sc = oracle.SampleConfig(n_samples, seed)
    for ps_db in (10.0, 20.0, 40.0):
        for rel_db in (-6.0, 0.0):
            ps = float(fading.db_to_linear(ps_db))
            pr = float(fading.db_to_linear(ps_db + rel_db))
            cfg = PowerConfig(ps, pr, "narrow_band")
            label = f"ps={ps_db:g}dB,pr_rel={rel_db:g}dB"

            olb = bounds.outage_lb(ps)
            blb = bounds.broadcast_lb(ps)
            bub = bounds.broadcast_ub(ps)
            erg = bounds.ergodic_capacity(2, ps)
            out.append(CheckResult(f"order_bounds[{label}]",
                                   olb <= blb + 1e-9 and blb <= bub + 1e-9
                                   and bub <= erg + 1e-9,
                                   blb, bub, detail="olb<=blb<=bub<=erg"))

            rates = {}
            for name in ("af:naive", "af:separate", "af:multisession",
                         "cf:naive_nb", "cf:naive_wb", "cf:separate",
                         "cf:multisession"):
                pt = strat.evaluate(strat.parse_strategy(name), cfg, sc)
                slack = 3.0 * pt.stderr if pt.stderr else 1e-6
                rates[name] = pt
                ok = (pt.rate >= blb - slack) and (pt.rate <= bub + slack)
                out.append(CheckResult(f"order_{name}[{label}]", ok, pt.rate,
                                       bub, detail=f"blb={blb:.6g} slack={slack:.2g}"))

            ok = rates["af:separate"].rate >= rates["af:naive"].rate - 1e-6
            out.append(CheckResult(f"order_sep_ge_naive_af[{label}]", ok,
                                   rates["af:separate"].rate,
                                   rates["af:naive"].rate))
            ok = rates["cf:naive_nb"].rate >= rates["af:naive"].rate - 1e-9
            out.append(CheckResult(f"order_cf_ge_af_naive[{label}]", ok,
                                   rates["cf:naive_nb"].rate,
                                   rates["af:naive"].rate))

    # wide-band DF with the selection-optimal layering approaches its bound
    ps = float(fading.db_to_linear(40.0))
    sel_bound = rate_engine.broadcast_rate_closed(fading.strongest_model(), ps)
    got = df.df_avg_rate(fading.alloc_selection_opt(ps),
                         PowerConfig(ps, ps, "wide_band"))
    rel_gap = (sel_bound - got) / sel_bound
    out.append(CheckResult("df_wb_sel_near_bound", rel_gap < 0.05, rel_gap, 0.05,
                           detail=f"rate={got:.6g} bound={sel_bound:.6g}"))
    return out


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def run_validation(level: str = "fast", seed: int | None = None) -> ValidationReport:
    if level not in KS_LEVELS:
        raise ValueError(f"unknown validation level {level!r}")
    if seed is None:
        seed = oracle.default_seed()
    t0 = time.perf_counter()
    report = ValidationReport(level=level)

    n_ks = KS_LEVELS[level]
    report.checks.extend(ks_checks(n_ks, seed))
    report.checks.extend(limit_checks())
    report.checks.append(cf_reduction_check())

    report.adjudications["sep_af_equal_gain_weight"] = \
        adjudicate_sep_integrand(n_ks, seed + 1)

    if level == "full":
        report.checks.append(continuum_limit_check())
        report.adjudications["ms_af_accumulation_form"] = adjudicate_z_form()
        report.checks.extend(ordering_checks(ORDERING_SAMPLES[level], seed + 2))
    else:
        report.adjudications["ms_af_accumulation_form"] = \
            adjudicate_z_form(n_pairs=10, sessions=300)

    report.elapsed_s = time.perf_counter() - t0
    return report
