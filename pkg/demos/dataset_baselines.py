"""Baselines on the recorded series, and an ESN on the laser data.

Needs the data files; fetch them first with ``python3 tools/fetch_datasets.py``.

    python3 demos/dataset_baselines.py
"""

import sys
from pathlib import Path

from rcbench.datasets import load_santa_fe_laser, load_sunspots
from rcbench.harness import run_experiment
from rcbench.metrics import mean_error, persistence_error

data = Path(__file__).resolve().parent.parent / "data"
laser_file = data / "santa_fe_laser.txt"
sun_file = data / "zurich_monthly_sunspots.csv"
if not (laser_file.exists() and sun_file.exists()):
    sys.exit("data not found; run tools/fetch_datasets.py first")

for name, ds in [("laser", load_santa_fe_laser(laser_file)), ("sunspots", load_sunspots(sun_file))]:
    x = ds.channels
    print(f"{name:9s} {len(x.scalar()):6d} points  "
          f"persistence NRMSE {persistence_error('NRMSE', x).value:.4f}  "
          f"mean NRMSE {mean_error('NRMSE', x).value:.4f}")

# one-step prediction on three staggered windows of the laser series
spec = {
    "task": {"dataset": str(laser_file), "loader": "santa_fe_laser", "normalize": True},
    "splits": {"washout_len": 200, "train_len": 3000, "test_len": 1000},
    "mode": "prediction_driven",
    "n_runs": 3,
}
report = run_experiment(spec)
for row in report["runs"]:
    print(f"offset {row['data_offset']:5d}  esn {row['metric']:.4f}  persistence {row['baseline_persistence']:.4f}")
