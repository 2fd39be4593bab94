import os
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent


def data_path(name: str) -> Path | None:
    """Location of a fetched dataset file, or None when it has not been fetched."""
    base = Path(os.environ["RCBENCH_DATA_DIR"]) if os.environ.get("RCBENCH_DATA_DIR") else REPO / "data"
    p = base / name
    return p if p.exists() else None


@pytest.fixture
def laser_path():
    p = data_path("santa_fe_laser.txt")
    if p is None:
        pytest.skip("Santa Fe laser data not fetched (run tools/fetch_datasets.py)")
    return p


@pytest.fixture
def sunspots_path():
    p = data_path("zurich_monthly_sunspots.csv")
    if p is None:
        pytest.skip("sunspot data not fetched (run tools/fetch_datasets.py)")
    return p


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
