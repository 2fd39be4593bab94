"""Loaders for the recorded benchmark datasets and a checksum manifest.

No data ships with the package. ``tools/fetch_datasets.py`` in the source
tree fetches public copies; files are looked up in ``$RCBENCH_DATA_DIR``,
falling back to ``./data``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .core import TimeSeries, as_array, read_single_column
from .errors import ColumnCountMismatch, DatasetNotFound, EmptyFile, InvalidParameter, MissingData, ParseError, ZeroRange

DATA_ENV = "RCBENCH_DATA_DIR"
SUNSPOT_SENTINEL = -99.0
MISSING_POLICIES = ("error", "drop", "interpolate")
APNEA_CHANNELS = ("heart_rate", "respiration", "blood_oxygen")


@dataclass
class RawDataset:
    name: str
    channels: TimeSeries
    source_note: str
    missing_policy_applied: str = "none"
    metadata: dict = field(default_factory=dict)

    @property
    def series(self) -> TimeSeries:
        return self.channels


def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    return Path(env) if env else Path.cwd() / "data"


def find_dataset(filename: str) -> Path:
    """Resolve ``filename`` against the data directory."""
    p = Path(filename)
    if p.is_absolute() or p.exists():
        return p
    cand = data_dir() / filename
    if not cand.exists():
        raise DatasetNotFound(f"{filename} not found in {data_dir()} (set {DATA_ENV} or run tools/fetch_datasets.py)")
    return cand


def load_santa_fe_laser(path: str | Path = "santa_fe_laser.txt") -> RawDataset:
    """Laser intensity, one value per line."""
    path = find_dataset(str(path))
    s = read_single_column(path)
    return RawDataset(
        "santa_fe_laser",
        s,
        f"single-column file {path.name}",
        metadata={"length": len(s), "file": str(path)},
    )


def _num(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"cannot parse {tok!r} as a number", line=line) from None


def _read_month_value_csv(path: Path) -> tuple[np.ndarray, list[str]]:
    labels, vals = [], []
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyFile(f"{path} holds no data")
    _, first = rows[0]
    try:
        float(first[-1])
    except ValueError:
        rows = rows[1:]  # header
    for i, r in rows:
        if len(r) < 2:
            raise ParseError("expected a month label and a value", line=i)
        labels.append(r[0].strip())
        vals.append(_num(r[-1].strip(), i))
    if not vals:
        raise EmptyFile(f"{path} holds a header but no data")
    return np.array(vals), labels


def clean_missing(values: np.ndarray, policy: str, sentinel: float = SUNSPOT_SENTINEL) -> tuple[np.ndarray, np.ndarray]:
    """Apply a missing-data policy; returns the cleaned values and the kept-index mask."""
    if policy not in MISSING_POLICIES:
        raise InvalidParameter(f"missing_policy must be one of {MISSING_POLICIES}")
    missing = values == sentinel
    keep = np.ones(values.size, dtype=bool)
    if not missing.any():
        return values.copy(), keep
    if policy == "error":
        raise MissingData(int(np.argmax(missing)))
    if policy == "drop":
        return values[~missing], ~missing
    idx = np.arange(values.size)
    good = ~missing
    if not good.any():
        raise MissingData(0)
    out = values.copy()
    out[missing] = np.interp(idx[missing], idx[good], values[good])
    return out, keep


def load_sunspots(
    path: str | Path = "zurich_monthly_sunspots.csv",
    format: str = "month_value_csv",
    missing_policy: str = "error",
) -> RawDataset:
    """Monthly sunspot numbers.

    ``single_column``: one value per line. ``month_value_csv``: rows of
    ``label,value`` with an optional header; the first and last labels
    are kept as metadata. Values of -99 mark missing months.
    """
    path = find_dataset(str(path))
    labels: list[str] = []
    if format == "single_column":
        vals = read_single_column(path).scalar().copy()
    elif format == "month_value_csv":
        vals, labels = _read_month_value_csv(path)
    else:
        raise InvalidParameter("format must be 'single_column' or 'month_value_csv'")
    n_missing = int(np.count_nonzero(vals == SUNSPOT_SENTINEL))
    cleaned, keep = clean_missing(vals, missing_policy)
    meta = {"length": int(cleaned.size), "raw_length": int(vals.size), "missing_count": n_missing, "file": str(path)}
    if labels:
        kept = [lab for lab, k in zip(labels, keep) if k]
        meta["first_label"], meta["last_label"] = kept[0], kept[-1]
    return RawDataset("sunspots", TimeSeries(cleaned), f"{format} file {path.name}", missing_policy, meta)


_SPLIT = re.compile(r"[,\s]+")


def _read_three_columns(path: Path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            toks = _SPLIT.split(s)
            if len(toks) != 3:
                raise ColumnCountMismatch(i, 3, len(toks))
            rows.append([_num(t, i) for t in toks])
    if not rows:
        raise EmptyFile(f"{path} holds no data")
    return np.array(rows)


def load_sleep_apnea(path_b1: str | Path = "b1.txt", path_b2: str | Path | None = "b2.txt") -> RawDataset:
    """Heart rate, respiration and blood oxygen, files concatenated in order.

    Columns may be separated by whitespace or commas. Pass
    ``path_b2=None`` to load a single file.
    """
    paths = [find_dataset(str(path_b1))]
    if path_b2 is not None:
        paths.append(find_dataset(str(path_b2)))
    parts = [_read_three_columns(p) for p in paths]
    data = np.vstack(parts)
    return RawDataset(
        "sleep_apnea",
        TimeSeries(data),
        "three-column files " + ", ".join(p.name for p in paths),
        metadata={"channels": list(APNEA_CHANNELS), "file_lengths": [len(p) for p in parts], "length": len(data)},
    )


def normalize_unit_range(series) -> TimeSeries:
    """Map each channel linearly so its minimum is -0.5 and its maximum 0.5."""
    x = as_array(series)
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    span = hi - lo
    if np.any(span == 0):
        raise ZeroRange(int(np.flatnonzero(span == 0)[0]))
    dt = series.dt if isinstance(series, TimeSeries) else 1.0
    return TimeSeries((x - lo) / span - 0.5, dt=dt)


# -- manifest -------------------------------------------------------------


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def default_manifest() -> dict:
    return json.loads(resources.files("rcbench").joinpath("data/manifest.json").read_text())


@dataclass
class VerifyResult:
    name: str
    path: str
    status: str  # ok, missing, mismatch, unpinned
    expected: str | None
    actual: str | None


def verify_manifest(manifest: dict | str | Path | None = None, directory: str | Path | None = None) -> list[VerifyResult]:
    """Check every manifest entry's file against its SHA-256."""
    if manifest is None:
        manifest = default_manifest()
    elif not isinstance(manifest, dict):
        manifest = json.loads(Path(manifest).read_text())
    base = Path(directory) if directory is not None else data_dir()
    out = []
    for entry in manifest.get("datasets", []):
        p = base / entry["file"]
        want = entry.get("sha256")
        if not p.exists():
            out.append(VerifyResult(entry["name"], str(p), "missing", want, None))
            continue
        got = sha256_file(p)
        if want is None:
            status = "unpinned"
        else:
            status = "ok" if got == want else "mismatch"
        out.append(VerifyResult(entry["name"], str(p), status, want, got))
    return out
