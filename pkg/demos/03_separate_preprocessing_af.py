"""Separate preprocessing: strip common layers before amplify-and-forward.

Both users first decode whatever the weaker gain allows, subtract it, and
only then does the relay forward its residual.  The forwarded signal then
carries less interference, which lifts the equivalent gain

    s_a = s1 + Pr s2 / (1 + s2 I(min(s1, s2)) + Pr)

above the naive one for every fading pair.  The gain matters most when
the cooperation link is weaker than the source (Pr < Ps).
"""

from relaylab import af
from relaylab.fading import PowerConfig

for rel_db in (-12.0, -6.0, 0.0):
    cfg = PowerConfig.from_db(20.0, 20.0 + rel_db, "narrow_band")
    naive = af.naive_rates(cfg).broadcast
    one = af.sep_rate(cfg, "one_step")
    print(f"Pr/Ps = {rel_db:+.0f} dB: naive {naive:.5f} nats, "
          f"separate {one.rate:.5f} nats "
          f"({100.0 * (one.rate / naive - 1.0):+.2f}%)")

print()
print("Iterative refinement of the layering (re-optimize the allocation")
print("for the new law, recompute the law, repeat):")
cfg = PowerConfig.from_db(20.0, 20.0, "narrow_band")
res = af.sep_rate(cfg, "iterative")
print(f"  converged={res.converged} after {res.iterations} iterations, "
      f"rate {res.rate:.5f} nats")
print("At some operating points the re-optimized interference is not")
print("nonincreasing, so the construction is invalid there; the loop then")
print("reports its best consistent iterate with converged=False.")
