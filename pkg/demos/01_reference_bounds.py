"""Reference bounds for two colocated receivers over Rayleigh block fading.

Prints the single-user (no cooperation) outage and broadcasting rates, the
joint-decoding upper bounds, the two-antenna ergodic capacity and the relay
cut-set bound across a range of source powers.  Everything here is closed
form; run time is negligible.
"""

import numpy as np

from relaylab import bounds
from relaylab.fading import PowerConfig, db_to_linear

header = f"{'Ps [dB]':>8} {'outage LB':>10} {'bcast LB':>10} {'outage UB':>10} " \
         f"{'bcast UB':>10} {'ergodic(2)':>10} {'cut-set':>10}"
print(header)
print("-" * len(header))

for ps_db in np.arange(0.0, 41.0, 5.0):
    ps = float(db_to_linear(ps_db))
    cfg = PowerConfig(ps, ps / 4.0, "narrow_band")  # Pr = Ps - 6 dB
    row = [
        bounds.outage_lb(ps),
        bounds.broadcast_lb(ps),
        bounds.outage_ub(ps),
        bounds.broadcast_ub(ps),
        bounds.ergodic_capacity(2, ps),
        bounds.cut_set(cfg),
    ]
    print(f"{ps_db:8.1f} " + " ".join(f"{v:10.4f}" for v in row))

print()
print("All rates in nats per channel use.  The broadcasting bounds always")
print("sit between the matching outage rates and the ergodic capacity;")
print("layering earns its keep without transmitter channel knowledge.")
