"""Linear memory capacity and information processing capacity.

Both drive the reservoir with i.i.d. U[-1, 1] input, train one linear
readout with many output columns on the training split (one column per
target function of the delayed input), and score each column on the test
split with the squared correlation

    C = cov(y, v)^2 / (var(y) var(v))

between target ``y`` and readout output ``v``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np
from scipy.special import eval_legendre

from ..core import SeedSpec, SplitSpec, uniform_series
from ..errors import CombinatorialBudgetExceeded, DegenerateOutput, InvalidParameter, LengthMismatch
from ..esn import train_readout
from .runner import make_runner

DEFAULT_BASIS_CAP = 5000


def squared_correlation(target: np.ndarray, output: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise capacity and a mask of columns whose output is constant."""
    y = target - target.mean(axis=0)
    v = output - output.mean(axis=0)
    var_y = np.mean(y * y, axis=0)
    var_v = np.mean(v * v, axis=0)
    cov = np.mean(y * v, axis=0)
    # output variance below round-off of its mean counts as constant
    scale = np.maximum(np.abs(output).max(axis=0), 1e-300)
    degenerate = var_v <= (1e-13 * scale) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.where(degenerate | (var_y == 0), 0.0, cov * cov / (var_y * var_v))
    return cap, degenerate


def _drive(reservoir, lengths: SplitSpec, seed: SeedSpec, inputs):
    runner = make_runner(reservoir)
    if inputs is None:
        u = uniform_series(seed, -1.0, 1.0, lengths.total).scalar()
    else:
        u = np.asarray(inputs, dtype=np.float64).reshape(-1)
        if u.size < lengths.total:
            raise LengthMismatch(f"explicit input has {u.size} frames, split needs {lengths.total}")
        u = u[: lengths.total]
    return runner, u, runner(u)


def _fit_and_score(states, targets, lengths: SplitSpec, ridge_lambda: float):
    w, tr = lengths.washout_len, lengths.train_len
    a, b = w, w + tr
    readout = train_readout(states[a:b], targets[a:b], ridge_lambda)
    out = readout.predict(states[b:])
    return squared_correlation(targets[b:], out)


def delayed(u: np.ndarray, k: int) -> np.ndarray:
    """``u(t - k)`` aligned with ``u(t)``; the first ``k`` entries are 0."""
    out = np.zeros_like(u)
    out[k:] = u[: u.size - k]
    return out


@dataclass
class McReport:
    mc_k: list[float]
    total: float
    k_max: int
    series_lengths: dict
    ridge_lambda: float
    epsilon: float
    degenerate_delays: list[int] = field(default_factory=list)
    raw_mc_k: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "measure": "MC",
            "k_max": self.k_max,
            "mc_k": list(self.mc_k),
            "raw_mc_k": list(self.raw_mc_k),
            "total": self.total,
            "series_lengths": dict(self.series_lengths),
            "ridge_lambda": self.ridge_lambda,
            "epsilon": self.epsilon,
            "degenerate_delays": list(self.degenerate_delays),
            "input_distribution": "U[-1,1] i.i.d.",
        }


def _check_lengths(lengths: SplitSpec, k_max: int) -> None:
    if lengths.washout_len < k_max:
        raise InvalidParameter(
            f"washout ({lengths.washout_len}) must be at least k_max ({k_max}) so every delayed target exists"
        )


def memory_capacity(
    reservoir,
    k_max: int | None = None,
    lengths: SplitSpec | tuple = (500, 2000, 1000),
    seed: SeedSpec = SeedSpec(0),
    ridge_lambda: float = 1e-8,
    epsilon: float = 0.0,
    inputs=None,
) -> McReport:
    """Linear memory capacity over delays ``1..k_max`` (default ``2N``).

    Capacities below ``epsilon`` are reported as 0; raw values are kept.
    A delay whose trained output is constant gets capacity 0 and raises a
    ``DegenerateOutput`` warning.
    """
    lengths = SplitSpec.from_value(lengths)
    runner, u, states = _drive(reservoir, lengths, seed, inputs)
    return _mc_from_states(u, states, runner.n_nodes, k_max, lengths, ridge_lambda, epsilon)


def _mc_from_states(u, states, n_nodes, k_max, lengths, ridge_lambda, epsilon) -> McReport:
    k_max = 2 * n_nodes if k_max is None else int(k_max)
    if k_max < 1:
        raise InvalidParameter("k_max must be >= 1")
    _check_lengths(lengths, k_max)
    targets = np.column_stack([delayed(u, k) for k in range(1, k_max + 1)])
    raw, degenerate = _fit_and_score(states, targets, lengths, ridge_lambda)
    bad = [int(k) + 1 for k in np.flatnonzero(degenerate)]
    if bad:
        warnings.warn(DegenerateOutput(f"constant readout output for delay(s) {bad}; capacity set to 0"), stacklevel=3)
    mc = np.where(raw < epsilon, 0.0, raw)
    return McReport(
        mc_k=[float(x) for x in mc],
        total=float(mc.sum()),
        k_max=k_max,
        series_lengths=lengths.to_dict(),
        ridge_lambda=ridge_lambda,
        epsilon=epsilon,
        degenerate_delays=bad,
        raw_mc_k=[float(x) for x in raw],
    )


# -- information processing capacity ----------------------------------------


def normalized_legendre(degree: int, x: np.ndarray) -> np.ndarray:
    """Legendre polynomial scaled to unit second moment under U[-1, 1]."""
    return math.sqrt(2 * degree + 1) * eval_legendre(degree, x)


def count_multi_indices(max_degree: int, max_delay: int) -> int:
    """Number of degree assignments to delays with total degree 1..max_degree."""
    return math.comb(max_delay + max_degree, max_degree) - 1


def multi_indices(max_degree: int, max_delay: int) -> list[tuple[tuple[int, int], ...]]:
    """All bases as sorted ``((delay, degree), ...)`` tuples, ordered by total degree.

    Generated as multisets of delays: a delay drawn ``d`` times carries
    degree ``d``.
    """
    out = []
    for total in range(1, max_degree + 1):
        for combo in combinations_with_replacement(range(1, max_delay + 1), total):
            counts: dict[int, int] = {}
            for k in combo:
                counts[k] = counts.get(k, 0) + 1
            out.append(tuple(sorted(counts.items())))
    return out


def basis_key(index: tuple[tuple[int, int], ...]) -> str:
    """``"1:2,3:1"`` means degree 2 at delay 1 times degree 1 at delay 3."""
    return ",".join(f"{k}:{d}" for k, d in index)


def basis_values(u: np.ndarray, index) -> np.ndarray:
    out = np.ones_like(u)
    for k, d in index:
        out = out * normalized_legendre(d, delayed(u, k))
    return out


@dataclass
class IpcReport:
    per_basis: dict[str, float]
    raw_per_basis: dict[str, float]
    per_degree_totals: dict[int, float]
    total: float
    max_degree: int
    max_delay: int
    threshold: float
    series_lengths: dict
    ridge_lambda: float
    surrogate: dict | None = None

    def to_dict(self) -> dict:
        return {
            "measure": "IPC",
            "max_degree": self.max_degree,
            "max_delay": self.max_delay,
            "threshold": self.threshold,
            "basis": "products of Legendre polynomials normalised to unit second moment under U[-1,1]",
            "per_basis": dict(self.per_basis),
            "raw_per_basis": dict(self.raw_per_basis),
            "per_degree_totals": {str(k): v for k, v in self.per_degree_totals.items()},
            "total": self.total,
            "series_lengths": dict(self.series_lengths),
            "ridge_lambda": self.ridge_lambda,
            "surrogate": self.surrogate,
        }


def ipc(
    reservoir,
    max_degree: int = 2,
    max_delay: int = 10,
    threshold: float = 0.01,
    lengths: SplitSpec | tuple = (500, 2000, 1000),
    seed: SeedSpec = SeedSpec(0),
    ridge_lambda: float = 1e-8,
    max_basis: int = DEFAULT_BASIS_CAP,
    surrogates: int = 0,
    inputs=None,
) -> IpcReport:
    """Capacities for every Legendre product basis up to the given degree and delay.

    ``surrogates > 0`` turns on the noise-floor estimate: each basis is
    also scored against that many cyclic shifts of the input (alignment
    destroyed, distribution kept) and the 95th percentile of those
    scores is subtracted before thresholding.
    """
    if max_degree < 1 or max_delay < 1:
        raise InvalidParameter("max_degree and max_delay must be positive")
    if threshold < 0:
        raise InvalidParameter("threshold must be nonnegative")
    count = count_multi_indices(max_degree, max_delay)
    if count > max_basis:
        raise CombinatorialBudgetExceeded(
            f"{count} basis functions for degree {max_degree} over {max_delay} delays exceeds the cap of {max_basis}"
        )
    lengths = SplitSpec.from_value(lengths)
    _check_lengths(lengths, max_delay)
    runner, u, states = _drive(reservoir, lengths, seed, inputs)
    bases = multi_indices(max_degree, max_delay)
    targets = np.column_stack([basis_values(u, b) for b in bases])
    raw, degenerate = _fit_and_score(states, targets, lengths, ridge_lambda)
    if degenerate.any():
        warnings.warn(DegenerateOutput(f"{int(degenerate.sum())} basis outputs are constant; capacity set to 0"), stacklevel=2)

    surrogate_info = None
    adjusted = raw.copy()
    if surrogates > 0:
        rng = seed.spawn("ipc-surrogate").generator()
        n = u.size
        shifts = rng.integers(max_delay + 1, n - max_delay, size=surrogates)
        scores = np.empty((surrogates, len(bases)))
        for i, s in enumerate(shifts):
            us = np.roll(u, int(s))
            ts = np.column_stack([basis_values(us, b) for b in bases])
            scores[i] = _fit_and_score(states, ts, lengths, ridge_lambda)[0]
        floor = np.percentile(scores, 95, axis=0)
        adjusted = np.maximum(raw - floor, 0.0)
        surrogate_info = {"count": surrogates, "percentile": 95, "shifts": [int(s) for s in shifts]}

    caps = np.where(adjusted < threshold, 0.0, adjusted)
    per_basis = {basis_key(b): float(c) for b, c in zip(bases, caps)}
    per_degree: dict[int, float] = {d: 0.0 for d in range(1, max_degree + 1)}
    for b, c in zip(bases, caps):
        per_degree[sum(d for _, d in b)] += float(c)
    return IpcReport(
        per_basis=per_basis,
        raw_per_basis={basis_key(b): float(c) for b, c in zip(bases, raw)},
        per_degree_totals=per_degree,
        total=float(caps.sum()),
        max_degree=max_degree,
        max_delay=max_delay,
        threshold=threshold,
        series_lengths=lengths.to_dict(),
        ridge_lambda=ridge_lambda,
        surrogate=surrogate_info,
    )
