"""Task-independent measures of a reservoir: memory, nonlinearity and rank.

A tapped delay line is the reference point: it remembers its last N inputs
perfectly and computes nothing nonlinear. A tanh reservoir trades some of
that memory for nonlinear capacity.

    python3 demos/reservoir_measures.py
"""

import warnings

import numpy as np

from rcbench.core import SeedSpec
from rcbench.esn import EsnConfig, esn_new
from rcbench.measures import delay_line, ipc, kr_gr_dale, memory_capacity

lengths = (500, 2000, 1000)  # washout, train, test

shift = delay_line(20)
esn = esn_new(EsnConfig(n_nodes=50, seed=SeedSpec(3)))

for name, res in [("delay line", shift), ("tanh ESN", esn)]:
    mc = memory_capacity(res, k_max=40, lengths=lengths, seed=SeedSpec(1))
    cap = ipc(res, max_degree=3, max_delay=20, threshold=0.01, lengths=lengths, seed=SeedSpec(1))
    by_deg = ", ".join(f"d{d}={v:.2f}" for d, v in sorted(cap.per_degree_totals.items()))
    print(f"{name:10s}  MC {mc.total:6.2f}  IPC {cap.total:6.2f}  ({by_deg})")
    print("            MC_k:", np.array2string(np.asarray(mc.mc_k[:25]), precision=2, max_line_width=120))

# Kernel rank counts how many distinct states many input streams produce;
# generalisation rank is the same count when the streams share most of their history.
print()
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for radius in (0.5, 0.95, 1.5):
        e = esn_new(EsnConfig(n_nodes=50, spectral_radius=radius, seed=SeedSpec(3)))
        kr = kr_gr_dale(e, s=50, seed=SeedSpec(2))
        gr = kr_gr_dale(e, s=50, mode="GR", seed=SeedSpec(2))
        print(f"radius {radius:4.2f}  kernel rank {kr.rank:2d}  generalisation rank {gr.rank:2d}")
