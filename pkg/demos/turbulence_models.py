"""
Gamma-Gamma and K-distributed FSO hops
======================================

The Malaga model contains Gamma-Gamma and K-distributed turbulence as
special cases. Both are built here from their Malaga parameterisations and
evaluated at two pointing-jitter levels.

"""

import numpy as np
from scipy import special

from rfso import cli
from rfso.fso import (FsoLinkParams, PointingParams, special_case_params,
                      turbulence_pdf)
from rfso.outage import end_to_end_outage

gg = special_case_params("gamma_gamma", 8, 4)
kd = special_case_params("k_distribution", 8, 4)

# zero-valued parameters are nudged to a tiny epsilon and flagged
print("Gamma-Gamma guarded:", gg.guarded, " K-distribution guarded:", kd.guarded)

# %%
# The Gamma-Gamma reduction matches the textbook density.

h = np.logspace(-1, 0.6, 6)
a, b = 8, 4
textbook = (2 * (a * b) ** ((a + b) / 2) / (special.gamma(a) * special.gamma(b))
            * h ** ((a + b) / 2 - 1) * special.kv(a - b, 2 * np.sqrt(a * b * h)))
for hv, m, t in zip(h, turbulence_pdf(h, gg), textbook):
    print(f"h={hv:6.3f}  malaga={m:.6e}  gamma-gamma={t:.6e}")

# %%
# Outage against P_A. Larger jitter (smaller zeta) raises the outage floor.

base = cli.parse_config_text(cli.preset_text("fig2b")).scenario
grid = np.arange(0.0, 31.0, 5.0)
print("P_A [dBW]" + "".join(f"{n:>14}" for n in ("GG .8863", "GG .5908", "K .8863", "K .5908")))
for p in grid:
    row = []
    for m in (gg, kd):
        for zeta in (0.8863, 0.5908):
            fso = FsoLinkParams(m, PointingParams(zeta), base.fso.detection, base.fso.avg_snr)
            row.append(end_to_end_outage(base.replace(fso=fso, p_a=10 ** (p / 10))))
    print(f"{p:9.0f}" + "".join(f"{v:14.4e}" for v in row))
