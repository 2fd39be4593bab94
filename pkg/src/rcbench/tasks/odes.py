"""Lorenz '63, Lorenz '96 and Van der Pol, integrated with fixed-step RK4.

Every generator returns the states ``x(0), x(dt), ..., x(steps*dt)`` with
the first ``transient_skip`` frames dropped.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from ..core import TimeSeries, as_array
from ..errors import InvalidParameter, NonFinite


def rk4_integrate(
    rhs: Callable[[int, np.ndarray], np.ndarray],
    init: np.ndarray,
    dt: float,
    steps: int,
) -> np.ndarray:
    """Classical fourth-order Runge-Kutta; returns ``(steps + 1, dim)``.

    ``rhs(k, x)`` receives the index of the step being taken, so external
    forcing can be held piecewise constant over a step.
    """
    x = np.array(init, dtype=np.float64)
    out = np.empty((steps + 1, x.size))
    out[0] = x
    half = 0.5 * dt
    with np.errstate(over="ignore", invalid="ignore"):
        return _rk4_loop(rhs, x, out, dt, half, steps)


def _rk4_loop(rhs, x, out, dt, half, steps):
    for k in range(steps):
        k1 = rhs(k, x)
        k2 = rhs(k, x + half * k1)
        k3 = rhs(k, x + half * k2)
        k4 = rhs(k, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NonFinite(k + 1)
        out[k + 1] = x
    return out


def _check_common(dt: float, steps: int, transient_skip: int) -> None:
    if not dt > 0:
        raise InvalidParameter("dt must be positive")
    if steps < 1:
        raise InvalidParameter("steps must be >= 1")
    if not 0 <= transient_skip <= steps:
        raise InvalidParameter("transient_skip must be in [0, steps]")


@dataclass(frozen=True)
class Lorenz63Params:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    dt: float = 0.01
    steps: int = 10000
    init: tuple[float, ...] = (1.0, 1.0, 1.0)
    transient_skip: int = 0

    def __post_init__(self):
        _check_common(self.dt, self.steps, self.transient_skip)
        if len(self.init) != 3:
            raise InvalidParameter("Lorenz'63 needs a 3-dimensional initial state")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["init"] = list(self.init)
        return d


def lorenz63_generate(params: Lorenz63Params, convention: str = "canonical") -> TimeSeries:
    """Integrate Lorenz '63.

    ``convention="canonical"`` uses ``dx/dt = sigma (y - x)``, the system
    whose butterfly attractor the benchmark refers to. ``"as_printed"``
    uses ``sigma (x - y)``, a sign-flipped form that turns up in print; it
    is unstable and kept only so the two can be compared.
    """
    if convention not in ("canonical", "as_printed"):
        raise InvalidParameter("convention must be 'canonical' or 'as_printed'")
    s, r, b = params.sigma, params.rho, params.beta
    sign = 1.0 if convention == "canonical" else -1.0

    def rhs(_t, v):
        x, y, z = v
        return np.array([sign * s * (y - x), x * (r - z) - y, x * y - b * z])

    traj = rk4_integrate(rhs, np.asarray(params.init), params.dt, params.steps)
    return TimeSeries(traj[params.transient_skip:], dt=params.dt)


@dataclass(frozen=True)
class Lorenz96Params:
    n: int = 5
    forcing: float = 8.0
    dt: float = 0.01
    steps: int = 10000
    init: tuple[float, ...] | None = None
    transient_skip: int = 0

    def __post_init__(self):
        _check_common(self.dt, self.steps, self.transient_skip)
        if self.n < 4:
            raise InvalidParameter("Lorenz'96 needs N >= 4")
        if self.init is not None and len(self.init) != self.n:
            raise InvalidParameter(f"initial state must have {self.n} components")

    def initial_state(self) -> np.ndarray:
        """``init`` if given, else F everywhere with the first entry nudged by 0.01."""
        if self.init is not None:
            return np.asarray(self.init, dtype=np.float64)
        x = np.full(self.n, float(self.forcing))
        x[0] += 0.01
        return x

    def to_dict(self) -> dict:
        d = asdict(self)
        d["init"] = None if self.init is None else list(self.init)
        return d


def lorenz96_rhs(x: np.ndarray, forcing: float) -> np.ndarray:
    # index arithmetic modulo N via roll
    return (np.roll(x, -1) - np.roll(x, 2)) * np.roll(x, 1) - x + forcing


def lorenz96_generate(params: Lorenz96Params) -> TimeSeries:
    f = float(params.forcing)
    traj = rk4_integrate(lambda _t, x: lorenz96_rhs(x, f), params.initial_state(), params.dt, params.steps)
    return TimeSeries(traj[params.transient_skip:], dt=params.dt)


@dataclass(frozen=True)
class VanDerPolParams:
    mu: float = 1.5
    dt: float = 0.01
    steps: int = 10000
    init: tuple[float, float] = (-1.0, 1.5)
    transient_skip: int = 0

    def __post_init__(self):
        _check_common(self.dt, self.steps, self.transient_skip)
        if len(self.init) != 2:
            raise InvalidParameter("Van der Pol needs (x, dx/dt) as initial state")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["init"] = list(self.init)
        return d


def vdp_generate(params: VanDerPolParams, forcing: TimeSeries | np.ndarray | None = None) -> TimeSeries:
    """Integrate ``x'' - mu (1 - x^2) x' + x = F(t)``; state is ``(x, x')``.

    ``forcing`` is held constant over each step (step k uses ``forcing[k]``)
    and must cover all ``steps`` steps.
    """
    mu = params.mu
    if forcing is None:
        force = None
    else:
        force = as_array(forcing)[:, 0]
        if len(force) < params.steps:
            raise InvalidParameter(f"forcing has {len(force)} frames, need {params.steps}")

    def rhs(k, v):
        x, xd = v
        f = 0.0 if force is None else force[k]
        return np.array([xd, mu * (1.0 - x * x) * xd - x + f])

    traj = rk4_integrate(rhs, np.asarray(params.init), params.dt, params.steps)
    return TimeSeries(traj[params.transient_skip:], dt=params.dt)
