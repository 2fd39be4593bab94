import json

import numpy as np
import pytest

from rcbench.core import TimeSeries, write_csv
from rcbench.errors import EmptySuite, InvalidParameter, LengthMismatch, RCBenchError
from rcbench.esn import EsnConfig
from rcbench.harness import (
    ExperimentSpec,
    emit_report,
    load_report,
    parse_suite,
    run_experiment,
    run_measure_suite,
    run_seeds,
    saturation_sweep,
    validate_report_document,
)

NARMA = {
    "task": {"generator": "narma", "params": {"N": 10}},
    "splits": {"washout_len": 100, "train_len": 400, "test_len": 200},
    "reservoir": {"n_nodes": 40},
    "n_runs": 3,
    "master_seed": 5,
}


def strip_clock(obj):
    if isinstance(obj, dict):
        return {k: strip_clock(v) for k, v in obj.items() if k != "wall_clock_s"}
    if isinstance(obj, list):
        return [strip_clock(v) for v in obj]
    return obj


def test_report_fields_and_schema():
    rep = run_experiment(NARMA)
    validate_report_document(rep)
    assert rep["spec"]["reservoir"]["spectral_radius"] == 0.95
    assert rep["spec"]["reservoir"]["input_dim"] == 1
    assert rep["spec"]["task"]["on_divergence"] == "regenerate"
    assert len(rep["runs"]) == 3
    assert rep["summary"]["metric"]["n"] == 3
    assert all(r["metric"] < r["baseline_mean"] for r in rep["runs"])


def test_rerun_from_echo_is_bit_identical():
    rep = run_experiment(NARMA)
    again = run_experiment(json.loads(emit_report(rep, "json"))["spec"])
    assert strip_clock(again) == strip_clock(rep)


def test_parallel_matches_serial():
    a = run_experiment(NARMA, workers=1)
    b = run_experiment(NARMA, workers=2)
    assert strip_clock(a) == strip_clock(b)


def test_run_independence():
    # a single run's numbers do not depend on how many runs are requested
    one = run_experiment(dict(NARMA, n_runs=1))
    three = run_experiment(NARMA)
    assert strip_clock(one["runs"][0]) == strip_clock(three["runs"][0])


def test_variation_policies_fix_seeds():
    spec = ExperimentSpec.from_dict(dict(NARMA, variation="new_input"))
    assert run_seeds(spec, 0)[0] == run_seeds(spec, 2)[0]
    assert run_seeds(spec, 0)[1] != run_seeds(spec, 2)[1]
    spec = ExperimentSpec.from_dict(dict(NARMA, variation="new_reservoir"))
    assert run_seeds(spec, 0)[1] == run_seeds(spec, 2)[1]


def test_spec_validation():
    with pytest.raises(InvalidParameter):
        ExperimentSpec.from_dict({"task": {"generator": "narma"}})
    with pytest.raises(InvalidParameter):
        ExperimentSpec.from_dict(dict(NARMA, bogus=1))
    with pytest.raises(InvalidParameter):
        ExperimentSpec.from_dict(dict(NARMA, mode="prediction_free"))


def test_mode_mismatch_is_reported_with_run_index():
    with pytest.raises(InvalidParameter) as ei:
        run_experiment(dict(NARMA, mode="prediction_driven"))
    assert ei.value.run_index == 0


def test_prediction_modes_on_series():
    spec = {
        "task": {"generator": "mso", "params": {"n": 2}},
        "splits": {"washout_len": 100, "train_len": 300, "test_len": 100},
        "mode": "prediction_free",
        "free_run_horizon": 50,
        "n_runs": 2,
    }
    free = run_experiment(spec)
    assert free["runs"][0]["n_test_points"] == 50
    driven = run_experiment(dict(spec, mode="prediction_driven", free_run_horizon=None))
    assert driven["summary"]["metric"]["mean"] < 0.01


def test_parity_washout_must_cover_prefix():
    spec = {
        "task": {"generator": "parity", "params": {"n": 3, "tau": 5}},
        "splits": {"washout_len": 2, "train_len": 200, "test_len": 100},
        "metric": "SER",
    }
    with pytest.raises(InvalidParameter):
        run_experiment(spec)
    rep = run_experiment(dict(spec, splits={"washout_len": 50, "train_len": 500, "test_len": 200}))
    assert 0.0 <= rep["runs"][0]["metric"] <= 1.0


def test_dataset_windows(tmp_path):
    x = np.sin(np.arange(700) * 0.3) + 0.1 * np.cos(np.arange(700) * 0.71)
    write_csv(tmp_path / "s.csv", TimeSeries(x), ["value"])
    spec = {
        "task": {"dataset": str(tmp_path / "s.csv")},
        "splits": {"washout_len": 50, "train_len": 300, "test_len": 100},
        "mode": "prediction_driven",
        "n_runs": 3,
    }
    rep = run_experiment(spec)
    assert [r["data_offset"] for r in rep["runs"]] == [0, 124, 249]
    assert rep["flags"]["dataset_variation_fallback"] is False
    # no room for three windows
    tight = dict(spec, splits={"washout_len": 50, "train_len": 548, "test_len": 100})
    rep = run_experiment(tight)
    assert rep["flags"]["dataset_variation_fallback"] is True
    with pytest.raises(LengthMismatch):
        run_experiment(dict(tight, variation="new_input"))


def test_baselines_on_scored_window(tmp_path):
    x = np.cumsum(np.random.default_rng(0).standard_normal(600))
    write_csv(tmp_path / "w.csv", TimeSeries(x))
    spec = {
        "task": {"dataset": str(tmp_path / "w.csv")},
        "splits": {"washout_len": 50, "train_len": 300, "test_len": 200},
        "mode": "prediction_driven",
    }
    row = run_experiment(spec)["runs"][0]
    target = x[351:551]
    prev = x[350:550]
    want = np.sqrt(np.mean((target - prev) ** 2) / np.var(target))
    assert row["baseline_persistence"] == pytest.approx(want, rel=1e-12)
    assert row["baseline_mean"] == pytest.approx(1.0, abs=1e-12)


def test_emit_formats():
    rep = run_experiment(dict(NARMA, n_runs=2))
    md = emit_report(rep, "markdown")
    assert md.startswith("## Experiment: narma (imitation)")
    assert "| reservoir.spectral_radius | 0.95 |" in md
    csv_text = emit_report(rep, "csv")
    assert csv_text.splitlines()[0].startswith("run")
    assert load_report(emit_report(rep, "json"))["runs"][1]["metric"] == rep["runs"][1]["metric"]


def test_saturation_sweep_settles():
    spec = dict(NARMA, n_runs=2)
    out = saturation_sweep(spec, [200, 400, 800], tolerance=10.0)
    assert out["saturation_length"] == 200
    assert len(out["mean_metric"]) == 3


def test_measure_suite_echo_and_sharing():
    rep = run_measure_suite(
        EsnConfig(n_nodes=20), ["MC", "KR_dale", "GR_vidamour"],
        {"lengths": [100, 500, 300], "rank_washout": 100, "T": 10, "tail_len": 5},
    )
    assert rep["shared_data"] == "MC+KR_dale"
    assert list(rep["results"]) == ["MC", "KR_dale", "GR_vidamour"]
    assert rep["params"]["k_max"] == 40 and rep["params"]["S"] == 40
    with pytest.raises(InvalidParameter):
        run_measure_suite(EsnConfig(n_nodes=20), ["MC", "KR_dale"], {"rank_washout": 50})


def test_measure_suite_errors():
    with pytest.raises(EmptySuite):
        run_measure_suite(EsnConfig(n_nodes=5), [])
    with pytest.raises(InvalidParameter):
        run_measure_suite(EsnConfig(n_nodes=5), ["MC"], {"nope": 1})
    assert parse_suite("mc, kr-dale,gr-vidamour") == ["MC", "KR_dale", "GR_vidamour"]
    with pytest.raises(InvalidParameter):
        parse_suite("mc,foo")
    with pytest.raises(EmptySuite):
        parse_suite(" , ")


def test_errors_are_library_errors():
    with pytest.raises(RCBenchError):
        run_experiment(dict(NARMA, task={"generator": "narma", "params": {"bogus": 1}}))
