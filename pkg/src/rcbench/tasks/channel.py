"""Nonlinear channel equalisation signal model.

Symbols d(n) from {-3, -1, 1, 3} pass through a 10-tap linear channel
(two taps of lookahead, seven of lag), then a memoryless cubic distortion,
then additive Gaussian noise at a requested SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import SeedSpec, TaskDataset, TimeSeries, as_array
from ..errors import InvalidParameter

SYMBOLS = np.array([-3.0, -1.0, 1.0, 3.0])

# taps for d(n+2), d(n+1), d(n), d(n-1), ..., d(n-7)
CHANNEL_TAPS = np.array([0.08, -0.12, 1.0, 0.18, -0.1, 0.09, -0.05, 0.04, 0.03, 0.01])
LOOKAHEAD = 2
LAG = 7


@dataclass(frozen=True)
class ChannelParams:
    snr_db: float = 12.0
    seed: SeedSpec = SeedSpec(0)
    length: int = 10000

    def __post_init__(self):
        if not 12.0 <= self.snr_db <= 32.0:
            raise InvalidParameter(f"snr_db must lie in [12, 32], got {self.snr_db}")
        if self.length <= 10:
            raise InvalidParameter("length must exceed the 10-tap filter support")

    def to_dict(self) -> dict:
        return {"snr_db": self.snr_db, "seed": self.seed.to_dict(), "length": self.length}


def linear_channel(d: np.ndarray) -> np.ndarray:
    """q(n) for every n with a full filter window; output is ``len(d) - 9`` long.

    Output index i corresponds to ``d[i + LAG]``.
    """
    d = np.asarray(d, dtype=np.float64)
    if d.size < CHANNEL_TAPS.size:
        raise InvalidParameter("need at least 10 symbols")
    # q[i] = sum_j taps[j] * d[i + 9 - j]; tap j=2 lands on d[i + LAG]
    return np.convolve(d, CHANNEL_TAPS, mode="valid")


def nonlinear_distortion(q: np.ndarray) -> np.ndarray:
    return q + 0.036 * q**2 - 0.011 * q**3


def measured_snr_db(signal: np.ndarray, noise: np.ndarray) -> float:
    return float(10.0 * np.log10(np.var(signal) / np.var(noise)))


def channel_generate(params: ChannelParams, noise: bool = True) -> tuple[TimeSeries, TimeSeries]:
    """Return ``(clean, noisy)``: symbols d(n) and received u(n), aligned.

    The noise realisation is rescaled so the measured SNR
    ``10 log10(var(signal) / var(noise))`` equals ``params.snr_db``.
    With ``noise=False`` the received signal is a deterministic function
    of the symbols.
    """
    rng = params.seed.generator()
    total = params.length + CHANNEL_TAPS.size - 1
    d = rng.choice(SYMBOLS, size=total)
    clean, noisy, _ = _assemble(d, params.snr_db if noise else None, rng, {})
    return clean, noisy


def channel_task(params: ChannelParams, noise: bool = True) -> TaskDataset:
    """Equalisation dataset: input is the received signal, target the symbols."""
    rng = params.seed.generator()
    total = params.length + CHANNEL_TAPS.size - 1
    d = rng.choice(SYMBOLS, size=total)
    clean, noisy, meta = _assemble(d, params.snr_db if noise else None, rng, params.to_dict())
    return TaskDataset(noisy, clean, meta)


def channel_from_symbols(
    symbols, snr_db: float | None = None, seed: SeedSpec | None = None
) -> tuple[TimeSeries, TimeSeries]:
    """Pass an explicit symbol stream through the channel.

    The first ``LAG`` and last ``LOOKAHEAD`` symbols only feed the filter;
    the returned clean series is ``symbols[LAG:-LOOKAHEAD]``.
    """
    d = as_array(symbols)[:, 0]
    rng = None
    if snr_db is not None:
        if seed is None:
            raise InvalidParameter("a seed is required when noise is on")
        rng = seed.generator()
    clean, noisy, _ = _assemble(d, snr_db, rng, {})
    return clean, noisy


def _assemble(d, snr_db, rng, meta):
    q = linear_channel(d)
    s = nonlinear_distortion(q)
    if snr_db is None:
        u = s
        meta = dict(meta, noise=False)
    else:
        z = rng.standard_normal(s.size)
        z -= z.mean()
        target_var = np.var(s) / 10.0 ** (snr_db / 10.0)
        v = z * np.sqrt(target_var / np.var(z))
        u = s + v
        meta = dict(meta, noise=True, measured_snr_db=measured_snr_db(s, v))
    clean = d[LAG: LAG + q.size]
    meta["task"] = "channel"
    return TimeSeries(clean), TimeSeries(u), meta


def decode_symbols(values) -> np.ndarray:
    """Round each value to the nearest of {-3, -1, 1, 3}."""
    v = as_array(values)[:, 0]
    return SYMBOLS[np.argmin(np.abs(v[:, None] - SYMBOLS[None, :]), axis=1)]
