"""Reproduce the standard comparison figures as CSV sweeps via the CLI.

Produces two CSV files in the working directory:

* ``sweep_vs_ps.csv``     rate vs source power at Pr = Ps - 6 dB
  (the classic bounds + AF/CF comparison)
* ``sweep_vs_ratio.csv``  rate vs Pr/Ps at Ps = 20 dB for the DF family

Feed these to the plotting frontend (``frontend/``) to render the figures:

    node frontend/dist/render.js --csv sweep_vs_ps.csv \
         --kind af_cf_vs_ps --out fig_af_cf.svg
"""

import subprocess
import sys

subprocess.run([
    sys.executable, "-m", "relaylab.cli", "sweep",
    "--axis", "ps_db", "--start", "0", "--stop", "40", "--step", "4",
    "--pr-rel-db", "-6",
    "--strategies", "bounds,af:naive,af:separate,af:multisession,cf:naive_nb",
    "--n-samples", "50000",
    "--out", "sweep_vs_ps.csv",
], check=True)

subprocess.run([
    sys.executable, "-m", "relaylab.cli", "sweep",
    "--axis", "pr_rel_db", "--start", "-12", "--stop", "6", "--step", "3",
    "--ps-db", "20",
    "--strategies", "bound:broadcast_lb,df:nb,df:wb,bound:broadcast_ub",
    "--out", "sweep_vs_ratio.csv",
], check=True)

print("wrote sweep_vs_ps.csv and sweep_vs_ratio.csv")
