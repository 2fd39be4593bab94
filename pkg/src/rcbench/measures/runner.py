"""Uniform way for measures to drive a reservoir.

A runner maps a scalar input sequence to the matrix of states visited,
always starting from the same initial state, so repeated calls with the
same input give the same states.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..core import TimeSeries
from ..errors import DimensionMismatch, InvalidParameter
from ..esn import Esn, harvest_states


class Runner:
    """Wraps ``fn(u) -> states`` together with the reservoir size."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], n_nodes: int, description: str = "custom"):
        self.fn = fn
        self.n_nodes = int(n_nodes)
        self.description = description

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64).reshape(-1)
        states = np.asarray(self.fn(u), dtype=np.float64)
        if states.shape != (u.size, self.n_nodes):
            raise DimensionMismatch(f"runner returned shape {states.shape}, expected ({u.size}, {self.n_nodes})")
        return states


def esn_runner(esn: Esn) -> Runner:
    """States of ``esn`` from its current state, leaving ``esn`` untouched."""
    if esn.config.input_dim != 1:
        raise DimensionMismatch("measures drive the reservoir with a scalar input")
    start = esn.state.copy()

    def run(u: np.ndarray) -> np.ndarray:
        e = esn.copy()
        e.reset(start)
        return harvest_states(e, TimeSeries(u), 0)

    return Runner(run, esn.n_nodes, f"esn N={esn.n_nodes}")


def make_runner(reservoir) -> Runner:
    if isinstance(reservoir, Runner):
        return reservoir
    if isinstance(reservoir, Esn):
        return esn_runner(reservoir)
    raise InvalidParameter(f"cannot drive a {type(reservoir).__name__}; pass an Esn or a Runner")


def delay_line(length: int) -> Runner:
    """Ideal linear shift register: state(t) = (u(t-1), ..., u(t-length)).

    Its linear memory is exactly ``length`` delays and it carries no
    nonlinear information, which makes it a known-answer reservoir.
    """
    if length < 1:
        raise InvalidParameter("delay line needs at least one stage")

    def run(u: np.ndarray) -> np.ndarray:
        padded = np.concatenate([np.zeros(length), u])
        cols = [padded[length - k: length - k + u.size] for k in range(1, length + 1)]
        return np.column_stack(cols)

    return Runner(run, length, f"delay line L={length}")
