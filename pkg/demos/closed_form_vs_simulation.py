"""
Closed forms against Monte Carlo
================================

Every analytic distribution has a sampler counterpart. The validation
harness draws from each one and reports KS distances and z-scores.

"""

import numpy as np

from rfso import cli
from rfso.montecarlo import RngConfig, draw, sample_metrics
from rfso.rflink import zeta_cdf

cfg = cli.parse_config_text(cli.preset_text("fig2a"))
report = cli.run_validate(cfg.scenario, trials=200_000, seed=1)
print(report.text())

# %%
# One pair up close: the per-user metric min(P_M G_SR, P_A G_SR / G_SP).

prof = cfg.scenario.profiles[0]
p_a = 10.0
z = draw(lambda g, n: sample_metrics((prof,), p_a, g, n)[:, 0], 10 ** 6, RngConfig(3))
for x in np.quantile(z, [0.1, 0.5, 0.9]):
    print(f"x={x:8.3f}  analytic={zeta_cdf(x, prof, p_a):.4f}  empirical={np.mean(z <= x):.4f}")

# %%
# Blocks have their own random streams, so results do not change with the
# number of worker threads.

a = cli.run_validate(cfg.scenario, 50_000, seed=9, workers=1).text()
b = cli.run_validate(cfg.scenario, 50_000, seed=9, workers=4).text()
print("identical reports:", a == b)
