"""Deterministic generators for the equation-defined benchmark tasks."""

from .channel import (
    CHANNEL_TAPS,
    SYMBOLS,
    ChannelParams,
    channel_from_symbols,
    channel_generate,
    channel_task,
    decode_symbols,
    linear_channel,
    measured_snr_db,
    nonlinear_distortion,
)
from .logic import ParityParams, parity_generate, parity_of_bits, xor_sequential_generate, xor_simultaneous_generate
from .mackey_glass import (
    MACKEY_GLASS_PRESETS,
    MACKEY_GLASS_PROTOCOLS,
    MackeyGlassParams,
    delay_embedding,
    mackey_glass_generate,
    mackey_glass_raw,
)
from .narma import (
    NARMA_PRESETS,
    NarmaParams,
    narma2_generate,
    narma_generate,
    narma_preset,
    narma_task,
    narma_zero_input_fixed_point,
)
from .odes import (
    Lorenz63Params,
    Lorenz96Params,
    VanDerPolParams,
    lorenz63_generate,
    lorenz96_generate,
    lorenz96_rhs,
    rk4_integrate,
    vdp_generate,
)
from .periodic import MSO_FREQUENCIES, figure8_generate, mso_generate
from .registry import GENERATOR_VERSION, TASKS, GeneratedTask, build_task

__all__ = [name for name in dir() if not name.startswith("_")]
