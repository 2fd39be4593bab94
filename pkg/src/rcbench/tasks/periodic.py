"""Multiple superimposed oscillators and the lazy figure eight."""

from __future__ import annotations

import numpy as np

from ..core import TimeSeries
from ..errors import InvalidParameter

MSO_FREQUENCIES = (0.2, 0.311, 0.42, 0.51, 0.63, 0.74, 0.85, 0.97)


def mso_generate(n: int, length: int, t0: int = 0) -> TimeSeries:
    """MSO-n: ``x(t) = sum_i sin(alpha_i t)`` for ``t = t0 .. t0+length-1``."""
    if not 1 <= n <= len(MSO_FREQUENCIES):
        raise InvalidParameter(f"MSO order must be in 1..{len(MSO_FREQUENCIES)}, got {n}")
    if length < 1:
        raise InvalidParameter("length must be >= 1")
    t = np.arange(t0, t0 + length, dtype=np.float64)
    alpha = np.asarray(MSO_FREQUENCIES[:n])
    return TimeSeries(np.sin(np.outer(t, alpha)).sum(axis=1))


def figure8_generate(points_per_cycle: int = 200, cycles: int = 1) -> TimeSeries:
    """Figure eight traced as ``(sin th, sin th cos th)``.

    ``th`` takes ``points_per_cycle`` equally spaced values on ``[0, 2 pi)``;
    the curve crosses itself once, at the origin, and fits in the unit box.
    """
    if points_per_cycle < 4:
        raise InvalidParameter("points_per_cycle must be >= 4")
    if cycles < 1:
        raise InvalidParameter("cycles must be >= 1")
    th = 2 * np.pi * np.arange(points_per_cycle) / points_per_cycle
    one = np.column_stack([np.sin(th), np.sin(th) * np.cos(th)])
    return TimeSeries(np.tile(one, (cycles, 1)))
