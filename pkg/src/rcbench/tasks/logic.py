"""Binary computation tasks: delayed parity and XOR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import SeedSpec, TaskDataset, TimeSeries
from ..errors import InvalidParameter

ALPHABETS = {"zero_one": (0.0, 1.0), "plus_minus_one": (-1.0, 1.0)}


@dataclass(frozen=True)
class ParityParams:
    n: int = 3
    tau: int = 0
    alphabet: str = "zero_one"

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter("parity window n must be >= 1")
        if self.tau < 0:
            raise InvalidParameter("delay tau must be >= 0")
        if self.alphabet not in ALPHABETS:
            raise InvalidParameter(f"alphabet must be one of {sorted(ALPHABETS)}")

    def to_dict(self) -> dict:
        return {"n": self.n, "tau": self.tau, "alphabet": self.alphabet}


def parity_of_bits(bits: np.ndarray, n: int, tau: int) -> np.ndarray:
    """``y(t)`` = parity of ``bits[t-tau-n+1 .. t-tau]``; -1 where undefined."""
    bits = np.asarray(bits, dtype=np.int64)
    out = np.full(bits.size, -1, dtype=np.int64)
    c = np.concatenate([[0], np.cumsum(bits)])
    start = n + tau - 1
    t = np.arange(start, bits.size)
    out[start:] = (c[t - tau + 1] - c[t - tau - n + 1]) % 2
    return out


def parity_generate(params: ParityParams, seed: SeedSpec, length: int) -> TaskDataset:
    """Random binary stream and its delayed PARITY-n target.

    Targets use the same alphabet as the input (odd parity maps to the high
    symbol). The first ``n + tau - 1`` frames have no full window; their
    targets are set to the low symbol and ``valid_from`` marks where
    scoring may start.
    """
    if length <= params.n + params.tau:
        raise InvalidParameter("length must exceed n + tau")
    lo, hi = ALPHABETS[params.alphabet]
    bits = seed.generator().integers(0, 2, size=length)
    par = parity_of_bits(bits, params.n, params.tau)
    valid_from = params.n + params.tau - 1
    par[:valid_from] = 0
    u = np.where(bits == 1, hi, lo)
    y = np.where(par == 1, hi, lo)
    meta = {"task": "parity", "params": params.to_dict(), "seed": seed.to_dict()}
    return TaskDataset(TimeSeries(u), TimeSeries(y), meta, valid_from=valid_from)


def xor_simultaneous_generate(seed: SeedSpec, length: int, tau: int = 0) -> TaskDataset:
    """Two random bit channels; target is their XOR, optionally ``tau`` steps late."""
    if length < 1:
        raise InvalidParameter("length must be >= 1")
    if tau < 0 or tau >= length:
        raise InvalidParameter("tau must be in [0, length)")
    bits = seed.generator().integers(0, 2, size=(length, 2))
    x = np.bitwise_xor(bits[:, 0], bits[:, 1])
    y = np.zeros(length, dtype=np.int64)
    y[tau:] = x[: length - tau]
    meta = {"task": "xor", "tau": tau, "seed": seed.to_dict()}
    return TaskDataset(TimeSeries(bits), TimeSeries(y), meta, valid_from=tau)


def xor_sequential_generate(seed: SeedSpec, length: int) -> TaskDataset:
    """XOR of two consecutively supplied bits (PARITY-2 with no delay)."""
    return parity_generate(ParityParams(2, 0, "zero_one"), seed, length)
