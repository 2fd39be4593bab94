"""Time-series containers, split bookkeeping and seeded random streams.

A ``TimeSeries`` is a read-only ``(length, dim)`` float array plus an
optional ``dt``. Time is index based everywhere; ``dt`` is metadata.

Random streams come from ``SeedSpec``: numpy's counter-based Philox
generator keyed by a ``SeedSequence`` built from the master seed, the
stream id and an optional path of purpose tags. Identical specs give
bit-identical draws on every platform numpy supports.
"""

from __future__ import annotations

import csv
import io
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence

import numpy as np

from .errors import InvalidRange, LengthMismatch, ParseError, EmptyFile

#: recorded in every report so a stream can be regenerated later
RNG_ALGORITHM = "numpy Philox4x64-10 keyed by SeedSequence(master_seed, spawn_key=(stream_id, *path)), rng-scheme v1"


class TimeSeries:
    """Immutable sequence of equal-dimension real frames.

    Parameters
    ----------
    values : array_like
        Shape ``(length,)`` for a scalar series or ``(length, dim)``.
    dt : float
        Physical time per step. Metadata only.
    allow_nonfinite : bool
        Permit NaN/inf entries (raw loader output awaiting cleaning).
    """

    __slots__ = ("_values", "dt")

    def __init__(self, values: Any, dt: float = 1.0, allow_nonfinite: bool = False):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValueError(f"time series must be 1-D or 2-D, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("time series needs at least one channel")
        if not allow_nonfinite and not np.all(np.isfinite(arr)):
            bad = int(np.argwhere(~np.isfinite(arr))[0, 0])
            raise ValueError(f"non-finite value at index {bad}")
        arr.flags.writeable = False
        self._values = arr
        self.dt = float(dt)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[1]

    def __len__(self) -> int:
        return self._values.shape[0]

    def __getitem__(self, item) -> "TimeSeries":
        if isinstance(item, slice):
            return TimeSeries(self._values[item], dt=self.dt, allow_nonfinite=True)
        raise TypeError("TimeSeries supports slice indexing only; use .values for frames")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.dt == other.dt and np.array_equal(self._values, other._values)

    def __repr__(self) -> str:
        return f"TimeSeries(len={len(self)}, dim={self.dim}, dt={self.dt})"

    def scalar(self) -> np.ndarray:
        """Return the single channel as a 1-D array."""
        if self.dim != 1:
            raise ValueError(f"series has {self.dim} channels, expected 1")
        return self._values[:, 0]


def as_array(x: TimeSeries | Any) -> np.ndarray:
    """2-D float view of a TimeSeries or array-like."""
    if isinstance(x, TimeSeries):
        return x.values
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr


@dataclass(frozen=True)
class SplitSpec:
    washout_len: int
    train_len: int
    test_len: int

    def __post_init__(self):
        if self.washout_len < 0 or self.train_len < 1 or self.test_len < 1:
            raise InvalidRange(
                f"invalid split ({self.washout_len}, {self.train_len}, {self.test_len}): "
                "washout >= 0, train >= 1 and test >= 1 required"
            )

    @property
    def total(self) -> int:
        return self.washout_len + self.train_len + self.test_len

    def to_dict(self) -> dict:
        return {"washout_len": self.washout_len, "train_len": self.train_len, "test_len": self.test_len}

    @classmethod
    def from_value(cls, value) -> "SplitSpec":
        if isinstance(value, SplitSpec):
            return value
        if isinstance(value, dict):
            return cls(int(value["washout_len"]), int(value["train_len"]), int(value["test_len"]))
        w, tr, te = value
        return cls(int(w), int(tr), int(te))


def _tag(key: int | str) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    if key < 0:
        raise ValueError("seed path keys must be nonnegative")
    return int(key)


@dataclass(frozen=True)
class SeedSpec:
    """Address of one reproducible random stream.

    ``path`` extends the address with purpose tags (strings are hashed with
    CRC-32) so that one run can draw its reservoir and its input from
    unrelated streams.
    """

    master_seed: int
    stream_id: int = 0
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")
        object.__setattr__(self, "path", tuple(_tag(k) for k in self.path))

    def spawn(self, *keys: int | str) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_id, self.path + tuple(_tag(k) for k in keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, *self.path))
        return np.random.Generator(np.random.Philox(ss))

    def to_dict(self) -> dict:
        return {"master_seed": self.master_seed, "stream_id": self.stream_id, "path": list(self.path)}

    @classmethod
    def from_value(cls, value) -> "SeedSpec":
        if isinstance(value, SeedSpec):
            return value
        if isinstance(value, int):
            return cls(value)
        if isinstance(value, dict):
            return cls(int(value["master_seed"]), int(value.get("stream_id", 0)), tuple(value.get("path", ())))
        raise TypeError(f"cannot interpret {value!r} as a SeedSpec")


@dataclass
class TaskDataset:
    """Input and target series of one task, with provenance.

    Frames before ``valid_from`` have undefined targets (e.g. the parity
    window is not yet full) and must be excluded from training/scoring.
    Unpacks as ``inputs, targets``.
    """

    inputs: TimeSeries
    targets: TimeSeries
    metadata: dict = field(default_factory=dict)
    valid_from: int = 0

    def __post_init__(self):
        if len(self.inputs) != len(self.targets):
            raise LengthMismatch(
                f"inputs ({len(self.inputs)}) and targets ({len(self.targets)}) differ in length"
            )

    def __iter__(self) -> Iterator[TimeSeries]:
        yield self.inputs
        yield self.targets

    def __len__(self) -> int:
        return len(self.inputs)


def split(series: TimeSeries, spec: SplitSpec) -> tuple[TimeSeries, TimeSeries, TimeSeries]:
    """Cut ``series`` into contiguous washout, train and test slices."""
    if spec.total > len(series):
        raise LengthMismatch(
            f"split needs {spec.total} frames ({spec.washout_len}+{spec.train_len}+{spec.test_len}) "
            f"but the series has {len(series)}"
        )
    a = spec.washout_len
    b = a + spec.train_len
    c = b + spec.test_len
    return series[:a], series[a:b], series[b:c]


def uniform_series(seed: SeedSpec, lo: float, hi: float, length: int) -> TimeSeries:
    """I.i.d. draws on ``[lo, hi)`` from the stream addressed by ``seed``."""
    if not lo < hi:
        raise InvalidRange(f"need lo < hi, got [{lo}, {hi})")
    if length < 1:
        raise InvalidRange("length must be positive")
    return TimeSeries(seed.generator().uniform(lo, hi, int(length)))


def prediction_dataset(series: TimeSeries, metadata: dict | None = None) -> TaskDataset:
    """One-step-ahead pairs: input s(t), target s(t+1)."""
    if len(series) < 2:
        raise LengthMismatch("need at least two frames to form a prediction pair")
    v = series.values
    return TaskDataset(
        TimeSeries(v[:-1], dt=series.dt), TimeSeries(v[1:], dt=series.dt), dict(metadata or {})
    )


# -- file format -----------------------------------------------------------


def format_float(x: float) -> str:
    """Shortest decimal that round-trips the float64 exactly."""
    return repr(float(x))


def write_csv(path: str | Path, series: TimeSeries | np.ndarray, header: Sequence[str] | None = None) -> None:
    arr = as_array(series)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            if len(header) != arr.shape[1]:
                raise ValueError("header length must match the number of channels")
            w.writerow(header)
        for row in arr:
            w.writerow([format_float(v) for v in row])


def _parse_float(tok: str) -> float | None:
    try:
        return float(tok)
    except ValueError:
        return None


def read_csv(
    path: str | Path,
    columns: Sequence[int | str] | None = None,
    allow_nonfinite: bool = False,
) -> tuple[TimeSeries, list[str] | None]:
    """Read a CSV time series.

    One row per timestep, one column per channel, optional single header
    row (detected when its first row does not parse as numbers). When a
    header is present, columns that hold no numbers at all (dates, labels)
    are skipped unless ``columns`` selects explicitly.

    Returns the series and the header (or ``None``).
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyFile(f"{path} holds no data")
    header = None
    if any(_parse_float(c) is None for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise EmptyFile(f"{path} holds a header but no data")
    width = len(rows[0])
    first_line = 2 if header is not None else 1

    if columns is not None:
        idx = []
        for c in columns:
            if isinstance(c, str) and not c.lstrip("-").isdigit():
                if header is None or c not in header:
                    raise ParseError(f"no column named {c!r}")
                idx.append(header.index(c))
            else:
                idx.append(int(c))
    elif header is not None:
        idx = [j for j in range(width) if any(_parse_float(r[j]) is not None for r in rows if j < len(r))]
    else:
        idx = list(range(width))

    out = np.empty((len(rows), len(idx)))
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"expected {width} fields, found {len(r)}", line=first_line + i)
        for k, j in enumerate(idx):
            v = _parse_float(r[j])
            if v is None:
                raise ParseError(f"cannot parse {r[j]!r} as a number", line=first_line + i)
            out[i, k] = v
    names = [header[j] for j in idx] if header is not None else None
    return TimeSeries(out, allow_nonfinite=allow_nonfinite), names


def read_single_column(path: str | Path, allow_nonfinite: bool = False) -> TimeSeries:
    """One number per line (Santa Fe distribution style)."""
    text = Path(path).read_text()
    vals = []
    for i, line in enumerate(io.StringIO(text), start=1):
        s = line.strip()
        if not s:
            continue
        v = _parse_float(s)
        if v is None:
            raise ParseError(f"cannot parse {s!r} as a number", line=i)
        vals.append(v)
    if not vals:
        raise EmptyFile(f"{path} holds no data")
    return TimeSeries(np.array(vals), allow_nonfinite=allow_nonfinite)


def read_series(path: str | Path, **kw) -> TimeSeries:
    """Dispatch on extension: ``.csv`` is CSV, anything else single column."""
    if str(path).lower().endswith(".csv"):
        return read_csv(path, **kw)[0]
    return read_single_column(path, **kw)
