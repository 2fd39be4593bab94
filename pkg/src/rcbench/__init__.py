"""Benchmark tasks, reservoir property measures and metrics for reservoir computing."""

__version__ = "0.1.0"

from .core import SeedSpec, SplitSpec, TaskDataset, TimeSeries, split, uniform_series  # noqa: E402
from .errors import DataError, NumericFailure, RCBenchError  # noqa: E402

__all__ = [
    "__version__",
    "SeedSpec",
    "SplitSpec",
    "TaskDataset",
    "TimeSeries",
    "split",
    "uniform_series",
    "DataError",
    "NumericFailure",
    "RCBenchError",
]
