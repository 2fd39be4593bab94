"""Mackey-Glass benchmark series.

Uses the benchmark's own discretisation rather than a general DDE solver:
forward Euler with ``substeps`` steps per time unit, subsampling every
``substeps`` fine steps, then ``y = tanh(x - 1)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..core import TimeSeries
from ..errors import InvalidParameter


@dataclass(frozen=True)
class MackeyGlassParams:
    beta: float = 0.2
    n: float = 10.0
    gamma: float = 0.1
    tau: float = 17.0
    substeps: int = 10
    init: float = 1.2
    transient: int = 100

    def __post_init__(self):
        for name in ("beta", "n", "gamma", "tau"):
            if not getattr(self, name) > 0:
                raise InvalidParameter(f"{name} must be positive")
        if self.substeps < 1:
            raise InvalidParameter("substeps must be >= 1")
        if self.transient < 0:
            raise InvalidParameter("transient must be >= 0")
        lag = self.tau * self.substeps
        if abs(lag - round(lag)) > 1e-9:
            raise InvalidParameter(f"tau*substeps = {lag} is not a whole number of sub-steps")

    @property
    def delay_steps(self) -> int:
        return int(round(self.tau * self.substeps))

    def to_dict(self) -> dict:
        return asdict(self)


# Parameter sets named in the literature; see the module docs of the
# experiment protocols for the sequence lengths that go with them.
MACKEY_GLASS_PRESETS = {
    "jaeger-tau17": MackeyGlassParams(0.2, 10.0, 0.1, 17.0),
    "jaeger-tau30": MackeyGlassParams(0.2, 10.0, 0.1, 30.0),
    "jaeger-tau16": MackeyGlassParams(0.2, 10.0, 0.1, 16.0),
    "glass-chaotic": MackeyGlassParams(2.0, 9.65, 1.0, 2.0, init=0.5),
    "glass-periodic": MackeyGlassParams(2.0, 8.5, 1.0, 2.0, init=0.5),
    "glass-point": MackeyGlassParams(0.2, 9.65, 0.1, 2.0, init=0.5),
}

# Sequence-length protocols reported for the prediction benchmark:
# (sequence length, tau, washout, tested step, runs).
MACKEY_GLASS_PROTOCOLS = {
    "jaeger-3000-tau30": (3000, 30, 1000, 84, 50),
    "jaeger-21000-tau30": (21000, 30, 1000, 84, 50),
    "jaeger-3000-tau17": (3000, 17, 1000, 84, 20),
    "jaeger-21000-tau17": (21000, 17, 1000, 84, 20),
    "holzmann-3000": (3000, 17, 1000, 84, 100),
    "holzmann-21000": (21000, 17, 1000, 120, 100),
    "roeschies-3000-tau17": (3000, 17, 100, 84, 50),
}


def mackey_glass_raw(params: MackeyGlassParams, length: int) -> np.ndarray:
    """Coarse-grid Euler solution x(0), x(1), ... before the tanh transform.

    The history ``x(t <= 0)`` is the constant ``params.init``.
    """
    h = 1.0 / params.substeps
    lag = params.delay_steps
    fine = (length - 1) * params.substeps + 1
    # ring buffer of the last `lag` fine values; history is constant
    buf = [params.init] * max(lag, 1)
    out = np.empty(length)
    x = params.init
    out[0] = x
    b, g, n = params.beta, params.gamma, params.n
    pos = 0
    for k in range(1, fine):
        xd = buf[pos] if lag > 0 else x
        x_new = x + h * (b * xd / (1.0 + xd**n) - g * x)
        if lag > 0:
            buf[pos] = x
            pos = (pos + 1) % lag
        x = x_new
        if k % params.substeps == 0:
            out[k // params.substeps] = x
    return out


def mackey_glass_generate(params: MackeyGlassParams, length: int) -> TimeSeries:
    """Benchmark series ``y = tanh(x - 1)`` after the coarse transient."""
    if length < 1:
        raise InvalidParameter("length must be >= 1")
    x = mackey_glass_raw(params, length + params.transient)[params.transient:]
    return TimeSeries(np.tanh(x - 1.0))


def delay_embedding(series: TimeSeries, lag: int) -> np.ndarray:
    """Pairs ``(x(t - lag), x(t))`` for plotting the attractor."""
    x = series.scalar()
    return np.column_stack([x[:-lag], x[lag:]])
