"""Multi-session amplify-and-forward over parallel cooperation channels.

Infinitely many vanishing-power sessions with a shared budget Pr: each
session strips newly common layers and forwards the residual.  The
per-session recursion has a continuum limit in closed integral form; this
script shows the finite-session recursion converging to it, and the
average rate approaching the joint-decoding upper bound.
"""

import numpy as np

from relaylab import af, bounds, fading
from relaylab.af import SessionSchedule
from relaylab.fading import FadingPair, PowerConfig

cfg = PowerConfig.from_db(10.0, 10.0, "wide_band")
alloc = fading.alloc_joint_opt(cfg.ps)
pair = FadingPair(2.0, 1.0)

sa_inf, sb_inf, _ = af.multisession_gains([pair.s1], [pair.s2], alloc, cfg)
print(f"fading pair (s1, s2) = ({pair.s1:g}, {pair.s2:g}), "
      f"budget Pr = {cfg.pr:g}")
print(f"continuum limit: s_a* = {float(sa_inf[0]):.6f}, "
      f"s_b* = {float(sb_inf[0]):.6f}\n")

print(f"{'sessions':>8} {'s_a':>10} {'s_b':>10}")
for k in (1, 4, 16, 64, 256, 1024):
    sa, sb = af.discrete_session_oracle(pair, alloc,
                                        SessionSchedule.uniform(k, cfg.pr))
    print(f"{k:8d} {sa:10.6f} {sb:10.6f}")

est = af.multisession_rate(alloc, cfg, n_samples=100_000)
print(f"\naverage rate (Monte Carlo, n = {est.n_samples}): "
      f"{est.rate:.5f} +- {est.stderr:.5f} nats")
print(f"joint-decoding broadcasting UB:            "
      f"{bounds.broadcast_ub(cfg.ps):.5f} nats")
