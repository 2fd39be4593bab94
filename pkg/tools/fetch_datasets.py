"""Fetch public copies of the recorded datasets into ./data (or $RCBENCH_DATA_DIR).

The Santa Fe laser series and the Zurich monthly sunspot numbers are
taken from files bundled inside two PyPI wheels, so only pip is needed:

  reservoirpy 0.4.2  reservoirpy/datasets/santafe_laser.npy
  pmdarima 2.1.1     pmdarima/datasets/data/sunspots.txt.gz

The sleep apnea recordings (b1.txt, b2.txt) are not redistributed by any
package; download them from the Santa Fe competition archive by hand and
drop them into the data directory.

Usage: python tools/fetch_datasets.py [--dest DIR]
"""

import argparse
import gzip
import io
import os
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

import numpy as np

WHEELS = {
    "reservoirpy==0.4.2": "reservoirpy/datasets/santafe_laser.npy",
    "pmdarima==2.1.1": "pmdarima/datasets/data/sunspots.txt.gz",
}


def member_bytes(req: str, member: str, workdir: Path) -> bytes:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:", "-d", str(workdir), req],
        check=True,
        stdout=subprocess.DEVNULL,
    )
    name = req.split("==")[0]
    wheel = next(p for p in workdir.glob("*.whl") if p.name.lower().startswith(name))
    with zipfile.ZipFile(wheel) as zf:
        return zf.read(member)


def write_laser(raw: bytes, dest: Path) -> None:
    values = np.load(io.BytesIO(raw)).ravel()
    dest.write_text("".join(f"{int(v)}\n" for v in values))


def write_sunspots(raw: bytes, dest: Path) -> None:
    nums = [float(t) for t in gzip.decompress(raw).decode().split()]
    lines = ['"Month","Sunspots"']
    for i, v in enumerate(nums):
        year, month = 1749 + i // 12, i % 12 + 1
        lines.append(f"{year}-{month:02d},{v!r}")
    dest.write_text("\n".join(lines) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dest", default=os.environ.get("RCBENCH_DATA_DIR", "data"))
    args = ap.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        for (req, member), writer, fname in zip(
            WHEELS.items(), (write_laser, write_sunspots), ("santa_fe_laser.txt", "zurich_monthly_sunspots.csv")
        ):
            sub = Path(tmp) / req.split("==")[0]
            sub.mkdir()
            writer(member_bytes(req, member, sub), dest / fname)
            print(f"wrote {dest / fname}")


if __name__ == "__main__":
    main()
