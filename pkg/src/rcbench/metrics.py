"""Error measures, symbol error rate, naive baselines and summary statistics.

Normalised measures divide by the target's own spread about its mean, so
NMSE and NRMSE are 1 for the constant mean predictor. Multichannel series
are flattened with equal weight per element.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .core import TimeSeries, as_array
from .errors import ConstantTarget, DataError, LengthMismatch, TooShort, ZeroTarget

MEASURES = ("MSE", "RMSE", "NMSE", "NRMSE", "MAE", "MAPE", "SER")
AGGREGATION = "multichannel series flattened with uniform per-element weights"
QUARTILE_METHOD = "linear interpolation between closest ranks"


@dataclass(frozen=True)
class ErrorValue:
    measure: str
    value: float
    n_points: int
    excluded_zero_targets: int = 0

    def __float__(self) -> float:
        return self.value


def _pair(target, observed) -> tuple[np.ndarray, np.ndarray]:
    t = as_array(target)
    o = as_array(observed)
    if t.shape != o.shape:
        raise LengthMismatch(f"target shape {t.shape} differs from observed shape {o.shape}")
    if t.shape[0] == 0:
        raise LengthMismatch("cannot score empty series")
    return t.ravel(), o.ravel()


def error(measure: str, target, observed, exclude_zero_targets: bool = False) -> ErrorValue:
    """Compute one of ``MSE, RMSE, NMSE, NRMSE, MAE, MAPE, SER``.

    MAPE is in percent. It refuses zero targets unless
    ``exclude_zero_targets`` is set, in which case those frames are
    dropped and their count is returned with the value.
    """
    m = measure.upper()
    if m == "SER":
        return symbol_error_rate(observed, target)
    t, o = _pair(target, observed)
    diff = o - t
    if m == "MSE":
        return ErrorValue(m, float(np.mean(diff**2)), t.size)
    if m == "RMSE":
        return ErrorValue(m, math.sqrt(float(np.mean(diff**2))), t.size)
    if m == "MAE":
        return ErrorValue(m, float(np.mean(np.abs(diff))), t.size)
    if m in ("NMSE", "NRMSE"):
        spread = float(np.mean((t - t.mean()) ** 2))
        if spread == 0.0:
            raise ConstantTarget("target is constant; normalised error undefined")
        nmse = float(np.mean(diff**2)) / spread
        return ErrorValue(m, nmse if m == "NMSE" else math.sqrt(nmse), t.size)
    if m == "MAPE":
        zero = t == 0
        excluded = 0
        if zero.any():
            if not exclude_zero_targets:
                raise ZeroTarget(int(np.argmax(zero)))
            excluded = int(zero.sum())
            t, diff = t[~zero], diff[~zero]
            if t.size == 0:
                raise ZeroTarget(0)
        return ErrorValue(m, 100.0 * float(np.mean(np.abs(diff / t))), t.size, excluded)
    raise DataError(f"unknown measure {measure!r}; known: {MEASURES}")


def baseline_mean(target) -> TimeSeries:
    """Constant prediction at the target's per-channel mean."""
    t = as_array(target)
    return TimeSeries(np.broadcast_to(t.mean(axis=0), t.shape))


def baseline_persistence(target) -> TimeSeries:
    """``v(t) = target(t-1)``, aligned with ``target[1:]``.

    The first frame has no predecessor and is not scored, so compare the
    result against ``target[1:]``.
    """
    t = as_array(target)
    if t.shape[0] < 2:
        raise TooShort("persistence needs at least two frames")
    return TimeSeries(t[:-1])


def persistence_error(measure: str, target) -> ErrorValue:
    t = as_array(target)
    return error(measure, t[1:], baseline_persistence(t))


def mean_error(measure: str, target) -> ErrorValue:
    return error(measure, target, baseline_mean(target))


def symbol_error_rate(predicted, truth, alphabet: Sequence[float] | None = None) -> ErrorValue:
    """Fraction of frames whose decoded symbol differs from ``truth``.

    ``predicted`` is rounded to the nearest symbol of ``alphabet``
    (default: the symbols present in ``truth``).
    """
    p, t = _pair(truth, predicted)[::-1]
    symbols = np.unique(t) if alphabet is None else np.asarray(sorted(alphabet), dtype=np.float64)
    decoded = symbols[np.argmin(np.abs(p[:, None] - symbols[None, :]), axis=1)]
    return ErrorValue("SER", float(np.mean(decoded != t)), t.size)


@dataclass(frozen=True)
class Summary:
    mean: float
    sd: float
    median: float
    q1: float
    q3: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def summary_stats(values: Sequence[float]) -> Summary:
    """Mean, sample sd (n-1 denominator), median and linear-interpolation quartiles.

    A single value has sd 0.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise DataError("summary of an empty sample")
    sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    q1, med, q3 = np.percentile(v, [25, 50, 75], method="linear")
    return Summary(float(v.mean()), sd, float(med), float(q1), float(q3), int(v.size))
