"""Direct property measures of a reservoir."""

from .memory import (
    IpcReport,
    McReport,
    basis_key,
    count_multi_indices,
    ipc,
    memory_capacity,
    multi_indices,
    normalized_legendre,
    squared_correlation,
)
from .rank import (
    DEFAULT_THRESHOLD,
    RankReport,
    effective_rank,
    gen_rank_vidamour,
    kernel_rank_vidamour,
    kr_gr_dale,
    matrix_rank,
    rank_convergence,
    rank_report,
    singular_values,
)
from .runner import Runner, delay_line, esn_runner, make_runner
from .shared import SharedConfig, shared_measure_run

__all__ = [name for name in dir() if not name.startswith("_")]
