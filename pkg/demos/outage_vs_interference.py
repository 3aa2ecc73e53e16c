"""
Outage versus interference threshold
====================================

Three SU-TXs share the band with a primary user and reach the relay over a
rate-1/2 OSTBC; the relay forwards over a Malaga FSO hop with pointing
errors. We sweep the interference cap P_A and compare IM/DD against
heterodyne detection, two FSO average SNRs, and a single-user baseline.

"""

import numpy as np

from rfso import cli
from rfso.outage import end_to_end_outage, floor_pa_infinity, floor_rd_infinity

# the bundled preset holds every scenario parameter
cfg = cli.parse_config_text(cli.preset_text("fig2a"))
base = cfg.scenario
grid = np.arange(0.0, 31.0, 5.0)


def curve(s):
    return [end_to_end_outage(s.replace(p_a=10 ** (p / 10))) for p in grid]


curves = {
    "IM/DD 30 dB": curve(base),
    "IM/DD 40 dB": curve(base.replace(avg_snr=1e4)),
    "heterodyne 30 dB": curve(base.replace(detection=1)),
    "IM/DD 30 dB, K=1": curve(base.replace(profiles=base.profiles[:1])),
}

print("P_A [dBW] " + "".join(f"{name:>20}" for name in curves))
for i, p in enumerate(grid):
    print(f"{p:9.0f} " + "".join(f"{c[i]:20.4e}" for c in curves.values()))

# %%
# At high P_A every curve settles on the FSO floor, which does not depend on
# K; raising the FSO average SNR lowers it.

for label, s in (("30 dB", base), ("40 dB", base.replace(avg_snr=1e4))):
    print(f"P_A -> inf floor, {label}: {floor_pa_infinity(s):.4e}")

# %%
# At low P_A the RF hop dominates instead. Its floor is what remains if the
# FSO hop were perfect.

s = base.replace(p_a=1.0)
print(f"RF floor at 0 dBW: {floor_rd_infinity(s):.4e}  (outage {end_to_end_outage(s):.4e})")

# %%
# The same table, with Monte Carlo columns, is what the command line emits:
#
#   rfso sweep --preset fig2a --trials 1000000 --output fig2a.csv
