"""Naive amplify-and-forward: equivalent gain law and achievable rates.

The relay scales its raw observation to power Pr and forwards it once.
The destination then sees a scalar equivalent gain

    s_b = s1 + Pr s2 / (1 + Ps s2 + Pr)

whose closed-form law drives both the best single-level rate and the
broadcasting rate.  The Monte Carlo check at the end confirms the law
against 10^5 simulated fading pairs.
"""

from relaylab import af, bounds, oracle
from relaylab.fading import PowerConfig

cfg = PowerConfig.from_db(10.0, 10.0, "narrow_band")
print(f"Ps = {cfg.ps:g}, Pr = {cfg.pr:g} (both 10 dB), narrow-band link\n")

dist = af.naive_distribution(cfg)
branch = cfg.pr / cfg.ps
print(f"gain law branch point Pr/Ps = {branch:g}")
for u in (0.25, 0.5, branch, 2.0, 4.0):
    print(f"  F({u:4.2f}) = {float(dist.cdf(u)):.6f}")

rates = af.naive_rates(cfg)
print(f"\nsingle-level rate : {rates.outage:.6f} nats "
      f"(threshold {rates.threshold:.4f})")
print(f"broadcasting rate : {rates.broadcast:.6f} nats")
print(f"no-cooperation LB : {bounds.broadcast_lb(cfg.ps):.6f} nats")
print(f"joint-decoding UB : {bounds.broadcast_ub(cfg.ps):.6f} nats")

emp = oracle.empirical_distribution(af.naive_gains,
                                    oracle.SampleConfig(100_000, 7), cfg)
print(f"\nKS distance to 10^5-sample empirical law: "
      f"{emp.ks_distance(dist):.5f} (accept < 0.01)")
