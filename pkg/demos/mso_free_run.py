"""Teacher-forced training on a two-sine signal, then free-running generation.

The readout learns one-step prediction. After training its output is fed back
as the next input. The closed loop tracks the signal at first and drifts off
phase over thousands of steps. Other seeds drift more slowly or
fail from the start; this one shows the typical slide.

    python3 demos/mso_free_run.py
"""

import numpy as np

from rcbench.core import SeedSpec, TimeSeries
from rcbench.esn import EsnConfig, esn_new, harvest_states, run_free, train_readout
from rcbench.tasks import mso_generate

washout, train, horizon = 100, 200, 5200
s = mso_generate(2, washout + train + horizon + 1).values

esn = esn_new(EsnConfig(seed=SeedSpec(1, 5)))
states = harvest_states(esn, TimeSeries(s[: washout + train]), washout)
readout = train_readout(states, s[washout + 1: washout + train + 1], 1e-8)

esn.reset()
out = run_free(esn, readout, TimeSeries(s[: washout + train]), horizon).scalar()
target = s[washout + train: washout + train + horizon, 0]

print("window          NRMSE")
for a in (0, 200, 1000, 2000, 3000, 4000, 5000):
    b = a + 200
    err = np.sqrt(np.mean((target[a:b] - out[a:b]) ** 2) / np.var(target[a:b]))
    print(f"{a + 1:5d}-{b:<5d}   {err:.4f}")
