"""Kernel rank, generalisation rank, thresholded SVD rank and effective rank.

State matrices are ``N x S``: one column per collected reservoir state.
Singular values come from LAPACK's divide-and-conquer SVD (``gesdd``) via
numpy.

Two published procedures are implemented:

* stream layout: ``S`` input streams of length ``T`` are fed one after
  another without resetting the reservoir, after a shared washout; the
  state at the end of each stream is one column. For the generalisation
  variant every stream ends in the same ``tail_len`` values.
* single-stream layout: one stream of length ``S`` after a washout, the
  state after every step is one column; kernel rank uses inputs on
  [-1, 1], generalisation rank on [-0.1, 0.1].

With ``T = 1`` and the same seed the two layouts draw the same numbers and
give identical matrices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..core import SeedSpec
from ..errors import EmptyMatrix, InvalidParameter, InvalidTail, LengthMismatch, ZeroMatrix
from .runner import make_runner

DEFAULT_THRESHOLD = 1e-4
DALE_RANGES = {"KR": 1.0, "GR": 0.1}


def singular_values(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.size == 0:
        raise EmptyMatrix("rank needs a non-empty 2-D matrix")
    return np.linalg.svd(x, compute_uv=False)


def _check_fraction(f: float) -> None:
    if not 0 < f < 1:
        raise InvalidParameter(f"threshold_fraction must lie in (0, 1), got {f}")


def rank_from_singular_values(sv: np.ndarray, threshold_fraction: float) -> int:
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv >= threshold_fraction * sv[0]))


def matrix_rank(x, threshold_fraction: float = DEFAULT_THRESHOLD) -> int:
    """Number of singular values at or above ``threshold_fraction * sigma_max``."""
    _check_fraction(threshold_fraction)
    return rank_from_singular_values(singular_values(x), threshold_fraction)


def entropy_rank(sv: np.ndarray) -> float:
    total = float(sv.sum())
    p = sv[sv > 0] / total
    return math.exp(-float(np.sum(p * np.log(p))))


def effective_rank(x) -> float:
    """``exp(H)`` where ``H`` is the entropy of the normalised singular values."""
    sv = singular_values(x)
    if sv[0] == 0:
        raise ZeroMatrix("effective rank of a zero matrix is undefined")
    return entropy_rank(sv)


@dataclass
class RankReport:
    rank: int
    effective_rank: float  # 0.0 for an all-zero matrix
    singular_values: list[float]
    threshold_fraction: float
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "effective_rank": self.effective_rank,
            "threshold_fraction": self.threshold_fraction,
            "singular_values": list(self.singular_values),
            **self.params,
        }


def rank_report(x, threshold_fraction: float = DEFAULT_THRESHOLD, **params) -> RankReport:
    _check_fraction(threshold_fraction)
    sv = singular_values(x)
    eff = 0.0 if sv[0] == 0 else entropy_rank(sv)
    return RankReport(
        rank=rank_from_singular_values(sv, threshold_fraction),
        effective_rank=eff,
        singular_values=[float(s) for s in sv],
        threshold_fraction=threshold_fraction,
        params=params,
    )


def _default_s(s: int | None, n: int) -> int:
    s = 2 * n if s is None else int(s)
    if s < 1:
        raise InvalidParameter("S must be positive")
    if s < n:
        warnings.warn(f"S = {s} is below the reservoir size N = {n}; rank is capped at S", stacklevel=3)
    return s


def _stream_inputs(seed: SeedSpec, s: int, t: int, tail_len: int, washout: int, r: float) -> np.ndarray:
    """Washout followed by ``s`` streams of length ``t`` sharing a ``tail_len`` suffix.

    The shared tail is drawn first, then washout and stream bodies in one
    call, so with ``tail_len = 0`` the draw is identical to the kernel
    rank layout.
    """
    rng = seed.generator()
    tail = rng.uniform(-r, r, tail_len)
    body = rng.uniform(-r, r, washout + s * (t - tail_len))
    streams = body[washout:].reshape(s, t - tail_len)
    streams = np.hstack([streams, np.broadcast_to(tail, (s, tail_len))])
    return np.concatenate([body[:washout], streams.ravel()])


def _stream_rank(reservoir, s, t, tail_len, threshold_fraction, seed, washout, inputs, kind):
    runner = make_runner(reservoir)
    s = _default_s(s, runner.n_nodes)
    if t < 1:
        raise InvalidParameter("stream length T must be >= 1")
    if not 0 <= tail_len < t:
        raise InvalidTail(f"shared tail length {tail_len} must satisfy 0 <= tail < T = {t}")
    if inputs is None:
        u = _stream_inputs(seed, s, t, tail_len, washout, 1.0)
    else:
        u = np.asarray(inputs, dtype=np.float64).reshape(-1)
        if u.size != washout + s * t:
            raise LengthMismatch(f"explicit input must have washout + S*T = {washout + s * t} values")
    states = runner(u)
    ends = washout + t * np.arange(1, s + 1) - 1
    m = states[ends].T
    params = {"measure": kind, "S": s, "T": t, "washout": washout, "input_range": 1.0, "N": runner.n_nodes}
    if kind.startswith("GR"):
        params["tail_len"] = tail_len
    return rank_report(m, threshold_fraction, **params)


def kernel_rank_vidamour(
    reservoir,
    s: int | None = None,
    t: int = 20,
    threshold_fraction: float = DEFAULT_THRESHOLD,
    seed: SeedSpec = SeedSpec(0),
    washout: int = 100,
    inputs=None,
) -> RankReport:
    """Rank of the final states of ``S`` independent U[-1, 1] streams."""
    return _stream_rank(reservoir, s, t, 0, threshold_fraction, seed, washout, inputs, "KR_vidamour")


def gen_rank_vidamour(
    reservoir,
    s: int | None = None,
    t: int = 20,
    tail_len: int = 10,
    threshold_fraction: float = DEFAULT_THRESHOLD,
    seed: SeedSpec = SeedSpec(0),
    washout: int = 100,
    inputs=None,
) -> RankReport:
    """Like the kernel rank, but all streams end in the same ``tail_len`` values."""
    return _stream_rank(reservoir, s, t, tail_len, threshold_fraction, seed, washout, inputs, "GR_vidamour")


def kr_gr_dale(
    reservoir,
    s: int | None = None,
    mode: str = "KR",
    threshold_fraction: float = DEFAULT_THRESHOLD,
    seed: SeedSpec = SeedSpec(0),
    washout: int = 100,
    input_range: float | None = None,
    inputs=None,
) -> RankReport:
    """Rank of ``S`` consecutive states under one U[-r, r] stream.

    ``r`` is 1 for ``mode="KR"`` and 0.1 for ``mode="GR"`` unless
    ``input_range`` overrides it; the washout uses the same range.
    """
    mode = mode.upper()
    if mode not in DALE_RANGES:
        raise InvalidParameter("mode must be 'KR' or 'GR'")
    r = DALE_RANGES[mode] if input_range is None else float(input_range)
    if r < 0:
        raise InvalidParameter("input_range must be nonnegative")
    runner = make_runner(reservoir)
    s = _default_s(s, runner.n_nodes)
    if inputs is None:
        u = seed.generator().uniform(-r, r, washout + s)
    else:
        u = np.asarray(inputs, dtype=np.float64).reshape(-1)
        if u.size != washout + s:
            raise LengthMismatch(f"explicit input must have washout + S = {washout + s} values")
    states = runner(u)[washout:]
    params = {"measure": f"{mode}_dale", "S": s, "T": 1, "washout": washout, "input_range": r, "N": runner.n_nodes}
    return rank_report(states.T, threshold_fraction, **params)


def rank_convergence(measure, s_start: int, s_max: int, **kw) -> tuple[RankReport, list[tuple[int, int]]]:
    """Double ``S`` until the rank changes by less than one (or ``s_max`` is hit).

    ``measure`` is one of the rank functions, called as ``measure(s=S, **kw)``.
    Returns the last report and the ``(S, rank)`` history.
    """
    if s_start < 1 or s_max < s_start:
        raise InvalidParameter("need 1 <= s_start <= s_max")
    history = []
    s = s_start
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = measure(s=s, **kw)
    history.append((s, report.rank))
    while s * 2 <= s_max:
        s *= 2
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            nxt = measure(s=s, **kw)
        history.append((s, nxt.rank))
        done = abs(nxt.rank - report.rank) < 1
        report = nxt
        if done:
            break
    return report, history
