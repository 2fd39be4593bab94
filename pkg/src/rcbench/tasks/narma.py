"""NARMA-N and the second-order Atiya-Parlos system.

NARMA-N::

    x(t+1) = alpha*x(t) + beta*x(t)*sum_{i=0}^{N-1} x(t-i)
             + gamma*u(t-N+1)*u(t) + delta

The first N outputs are fixed at 0 and the recurrence starts once N
inputs are available, so no input before t=0 is ever read. With
``clamp="tanh"`` the whole right-hand side is passed through tanh.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..core import SeedSpec, TaskDataset, TimeSeries, uniform_series
from ..errors import Divergence, InvalidParameter, InvalidRange


@dataclass(frozen=True)
class NarmaParams:
    order: int = 10
    alpha: float = 0.3
    beta: float = 0.05
    gamma: float = 1.5
    delta: float = 0.1
    input_lo: float = 0.0
    input_hi: float = 0.5
    clamp: str = "none"
    divergence_bound: float = 10.0

    def __post_init__(self):
        if self.order < 1:
            raise InvalidParameter("NARMA order must be >= 1")
        if not self.input_lo < self.input_hi:
            raise InvalidRange("input_lo must be < input_hi")
        if self.clamp not in ("none", "tanh"):
            raise InvalidParameter(f"clamp must be 'none' or 'tanh', got {self.clamp!r}")
        if not self.divergence_bound > 1:
            raise InvalidParameter("divergence_bound must exceed 1")

    def to_dict(self) -> dict:
        return asdict(self)


# Parameter sets collected from the literature. Keys name the source.
NARMA_PRESETS: dict[str, NarmaParams] = {
    "narma5-fujii": NarmaParams(5, 0.3, 0.05, 1.5, 0.1, 0.0, 0.2),
    "narma5-dale": NarmaParams(5, 0.3, 0.05, 1.5, 0.1, 0.0, 0.5),
    "narma10": NarmaParams(10, 0.3, 0.05, 1.5, 0.1, 0.0, 0.5),
    "narma15-fujii": NarmaParams(15, 0.3, 0.05, 1.5, 0.1, 0.0, 0.2),
    "narma20-rodan": NarmaParams(20, 0.3, 0.05, 1.5, 0.01, 0.0, 0.5, clamp="tanh"),
    "narma20-fujii": NarmaParams(20, 0.3, 0.05, 1.5, 0.1, 0.0, 0.2),
    "narma30-schrauwen": NarmaParams(30, 0.2, 0.04, 1.5, 0.001, 0.0, 0.5),
    "narma30-dale": NarmaParams(30, 0.2, 0.004, 1.5, 0.001, 0.0, 0.5),
}


def narma_generate(params: NarmaParams, inputs: TimeSeries) -> TimeSeries:
    """Drive the NARMA-N recurrence with ``inputs``.

    Raises
    ------
    Divergence
        As soon as ``|x(t)|`` exceeds ``params.divergence_bound``.
    """
    u = inputs.scalar()
    n = params.order
    if len(u) <= n:
        raise InvalidParameter(f"input length {len(u)} must exceed the order {n}")
    if u.min() < params.input_lo or u.max() > params.input_hi:
        raise InvalidRange(
            f"inputs span [{u.min():.4g}, {u.max():.4g}], outside [{params.input_lo}, {params.input_hi}]"
        )
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    tanh = params.clamp == "tanh"
    bound = params.divergence_bound
    x = np.zeros(len(u))
    window = 0.0  # sum of x(t-N+1..t)
    for t in range(n - 1, len(u) - 1):
        window += x[t]
        if t - n >= 0:
            window -= x[t - n]
        val = a * x[t] + b * x[t] * window + g * u[t - n + 1] * u[t] + d
        if tanh:
            val = math.tanh(val)
        if not abs(val) <= bound:
            raise Divergence(t + 1, val)
        x[t + 1] = val
    return TimeSeries(x)


def narma2_generate(inputs: TimeSeries, divergence_bound: float = 10.0) -> TimeSeries:
    """x(t+1) = 0.4 x(t) + 0.4 x(t) x(t-1) + 0.6 u(t)^3 + 0.1, x(0) = x(1) = 0."""
    u = inputs.scalar()
    x = np.zeros(len(u))
    for t in range(1, len(u) - 1):
        val = 0.4 * x[t] + 0.4 * x[t] * x[t - 1] + 0.6 * u[t] ** 3 + 0.1
        if not abs(val) <= divergence_bound:
            raise Divergence(t + 1, val)
        x[t + 1] = val
    return TimeSeries(x)


def narma_zero_input_fixed_point(params: NarmaParams) -> float:
    """Smaller root of the zero-input fixed point equation.

    With u = 0 a constant solution x solves
    ``beta*N*x^2 + (alpha - 1)*x + delta = 0``.
    """
    qa = params.beta * params.order
    qb = params.alpha - 1.0
    qc = params.delta
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        raise ValueError("no real fixed point for these parameters")
    return (-qb - math.sqrt(disc)) / (2 * qa)


def narma_task(
    params: NarmaParams,
    seed: SeedSpec,
    length: int,
    on_divergence: str = "abort",
    max_attempts: int = 20,
) -> TaskDataset:
    """Draw a uniform input and generate the matching NARMA target.

    With ``on_divergence="regenerate"`` a diverging draw is discarded and a
    fresh input stream (``seed.spawn("retry", k)``) is tried, up to
    ``max_attempts`` times. The attempts are recorded in the metadata.
    """
    if on_divergence not in ("abort", "regenerate"):
        raise InvalidParameter("on_divergence must be 'abort' or 'regenerate'")
    discarded = []
    for attempt in range(max_attempts):
        s = seed if attempt == 0 else seed.spawn("retry", attempt)
        u = uniform_series(s, params.input_lo, params.input_hi, length)
        try:
            x = narma_generate(params, u)
        except Divergence as exc:
            if on_divergence == "abort" or attempt == max_attempts - 1:
                raise
            discarded.append(exc.t)
            continue
        meta = {
            "task": "narma",
            "params": params.to_dict(),
            "seed": s.to_dict(),
            "regenerated": len(discarded),
            "divergence_steps": discarded,
        }
        return TaskDataset(u, x, meta)
    raise AssertionError("unreachable")


def narma_preset(name: str, **overrides) -> NarmaParams:
    try:
        base = NARMA_PRESETS[name]
    except KeyError:
        raise InvalidParameter(f"unknown NARMA preset {name!r}; known: {sorted(NARMA_PRESETS)}") from None
    return replace(base, **overrides)
