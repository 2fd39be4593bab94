"""Name-based access to the generators, used by the harness and the CLI.

Each entry turns a flat parameter mapping (as found in an experiment spec
or on the command line) into data. Imitation tasks yield a
``TaskDataset``; autonomous systems yield a single ``TimeSeries`` that the
caller turns into one-step prediction pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any, Callable

from ..core import SeedSpec, TaskDataset, TimeSeries, uniform_series
from ..errors import InvalidParameter
from . import channel, logic, mackey_glass, narma, odes, periodic

#: bumped whenever a generator's output for fixed parameters changes
GENERATOR_VERSION = "1"


@dataclass
class GeneratedTask:
    name: str
    kind: str  # "imitation" or "series"
    data: TaskDataset | TimeSeries
    params: dict  # complete parameter echo, defaults included
    metadata: dict


def _take(params: dict, cls, aliases: dict[str, str] | None = None):
    """Build a params dataclass from a flat dict, rejecting unknown keys."""
    aliases = aliases or {}
    names = {f.name for f in fields(cls)}
    kw = {}
    for k, v in params.items():
        k = aliases.get(k, k)
        if k not in names:
            raise InvalidParameter(f"unknown parameter {k!r} for {cls.__name__}; known: {sorted(names)}")
        if isinstance(v, list):
            v = tuple(v)
        kw[k] = v
    return cls(**kw)


def _narma(params, seed, length, on_divergence):
    params = dict(params)
    preset = params.pop("preset", None)
    aliases = {"N": "order"}
    if preset is not None:
        base = narma.narma_preset(preset).to_dict()
        base.update({aliases.get(k, k): v for k, v in params.items()})
        params = base
    p = _take(params, narma.NarmaParams, aliases)
    ds = narma.narma_task(p, seed, length, on_divergence=on_divergence)
    echo = p.to_dict()
    if preset is not None:
        echo["preset"] = preset
    return "imitation", ds, echo, ds.metadata


def _narma2(params, seed, length, on_divergence):
    lo = float(params.get("input_lo", 0.0))
    hi = float(params.get("input_hi", 0.5))
    extra = set(params) - {"input_lo", "input_hi"}
    if extra:
        raise InvalidParameter(f"unknown parameter(s) for narma2: {sorted(extra)}")
    u = uniform_series(seed, lo, hi, length)
    x = narma.narma2_generate(u)
    echo = {"input_lo": lo, "input_hi": hi}
    return "imitation", TaskDataset(u, x, {"task": "narma2"}), echo, {"seed": seed.to_dict()}


def _channel(params, seed, length, on_divergence):
    snr = float(params.get("snr_db", 12.0))
    extra = set(params) - {"snr_db"}
    if extra:
        raise InvalidParameter(f"unknown parameter(s) for channel: {sorted(extra)}")
    p = channel.ChannelParams(snr_db=snr, seed=seed, length=length)
    ds = channel.channel_task(p)
    return "imitation", ds, {"snr_db": snr}, ds.metadata


def _parity(params, seed, length, on_divergence):
    p = _take(params, logic.ParityParams)
    ds = logic.parity_generate(p, seed, length)
    return "imitation", ds, p.to_dict(), ds.metadata


def _xor(params, seed, length, on_divergence):
    tau = int(params.get("tau", 0))
    extra = set(params) - {"tau"}
    if extra:
        raise InvalidParameter(f"unknown parameter(s) for xor: {sorted(extra)}")
    ds = logic.xor_simultaneous_generate(seed, length, tau)
    return "imitation", ds, {"tau": tau}, ds.metadata


def _mackey_glass(params, seed, length, on_divergence):
    params = dict(params)
    preset = params.pop("preset", None)
    if preset is not None:
        base = mackey_glass.MACKEY_GLASS_PRESETS[preset].__dict__.copy()
        base.update(params)
        params = base
    p = _take(params, mackey_glass.MackeyGlassParams)
    echo = p.to_dict()
    if preset is not None:
        echo["preset"] = preset
    return "series", mackey_glass.mackey_glass_generate(p, length), echo, {}


def _mso(params, seed, length, on_divergence):
    n = int(params.get("n", 2))
    t0 = int(params.get("t0", 0))
    extra = set(params) - {"n", "t0"}
    if extra:
        raise InvalidParameter(f"unknown parameter(s) for mso: {sorted(extra)}")
    return "series", periodic.mso_generate(n, length, t0), {"n": n, "t0": t0}, {}


def _ode(cls, gen, **gen_kw):
    def build(params, seed, length, on_divergence):
        params = dict(params)
        kw = {k: params.pop(k) for k in list(params) if k in gen_kw}
        skip = int(params.get("transient_skip", 0))
        params["steps"] = length - 1 + skip
        p = _take(params, cls)
        series = gen(p, **{**gen_kw, **kw})
        echo = p.to_dict()
        echo.update({**gen_kw, **kw})
        return "series", series, echo, {}

    return build


def _figure8(params, seed, length, on_divergence):
    ppc = int(params.get("points_per_cycle", 200))
    extra = set(params) - {"points_per_cycle"}
    if extra:
        raise InvalidParameter(f"unknown parameter(s) for figure8: {sorted(extra)}")
    cycles = -(-length // ppc)
    s = periodic.figure8_generate(ppc, cycles)[:length]
    return "series", s, {"points_per_cycle": ppc}, {}


TASKS: dict[str, Callable[..., tuple[str, Any, dict, dict]]] = {
    "narma": _narma,
    "narma2": _narma2,
    "channel": _channel,
    "parity": _parity,
    "xor": _xor,
    "mackey_glass": _mackey_glass,
    "mso": _mso,
    "lorenz63": _ode(odes.Lorenz63Params, odes.lorenz63_generate, convention="canonical"),
    "lorenz96": _ode(odes.Lorenz96Params, odes.lorenz96_generate),
    "vdp": _ode(odes.VanDerPolParams, odes.vdp_generate),
    "figure8": _figure8,
}


def build_task(
    name: str, params: dict | None, seed: SeedSpec, length: int, on_divergence: str = "abort"
) -> GeneratedTask:
    """Generate ``length`` frames of task ``name``."""
    try:
        fn = TASKS[name]
    except KeyError:
        raise InvalidParameter(f"unknown task {name!r}; known: {sorted(TASKS)}") from None
    kind, data, echo, meta = fn(dict(params or {}), seed, int(length), on_divergence)
    meta = dict(meta)
    meta.setdefault("seed", seed.to_dict())
    meta["generator_version"] = GENERATOR_VERSION
    return GeneratedTask(name, kind, data, echo, meta)
