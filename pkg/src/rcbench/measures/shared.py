"""Memory capacity and single-stream kernel rank from one drive."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import SeedSpec, SplitSpec, uniform_series
from ..errors import InvalidParameter
from .memory import McReport, _mc_from_states
from .rank import DEFAULT_THRESHOLD, RankReport, rank_report
from .runner import make_runner


@dataclass(frozen=True)
class SharedConfig:
    lengths: SplitSpec = SplitSpec(500, 2000, 1000)
    k_max: int | None = None
    s: int | None = None
    threshold_fraction: float = DEFAULT_THRESHOLD
    ridge_lambda: float = 1e-8
    epsilon: float = 0.0
    seed: SeedSpec = SeedSpec(0)


def shared_measure_run(reservoir, config: SharedConfig = SharedConfig()) -> tuple[McReport, RankReport]:
    """Drive once with U[-1, 1] input and derive both measures from the states.

    Layout: the first ``washout`` frames settle the reservoir. The memory
    readout trains on the next ``train`` frames and is scored on the last
    ``test``. The kernel rank uses the ``S`` states right after the
    washout, so ``S`` may not exceed ``train + test``. The results equal
    those of ``memory_capacity`` and ``kr_gr_dale(mode="KR")`` called with
    the same seed, washout and lengths.
    """
    runner = make_runner(reservoir)
    lengths = SplitSpec.from_value(config.lengths)
    s = 2 * runner.n_nodes if config.s is None else int(config.s)
    w = lengths.washout_len
    if s > lengths.train_len + lengths.test_len:
        raise InvalidParameter(f"S = {s} exceeds the {lengths.train_len + lengths.test_len} post-washout states")
    u = uniform_series(config.seed, -1.0, 1.0, lengths.total).scalar()
    states = runner(u)
    mc = _mc_from_states(u, states, runner.n_nodes, config.k_max, lengths, config.ridge_lambda, config.epsilon)
    kr = rank_report(
        states[w: w + s].T,
        config.threshold_fraction,
        measure="KR_dale",
        S=s,
        T=1,
        washout=w,
        input_range=1.0,
        N=runner.n_nodes,
        shared_with="MC",
    )
    return mc, kr
