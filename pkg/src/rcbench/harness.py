"""Multi-run experiments and measure suites with complete, reproducible reports.

An experiment spec names a task (generator or recorded dataset), a
reservoir configuration, a washout/train/test split, a run count and a
variation policy. Every run derives its own seeds from ``(master_seed,
run index)`` so runs can execute in any order or in parallel, and the
report echoes every parameter, defaults included, so that feeding
``report["spec"]`` back in reproduces every number.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from . import __version__
from .core import RNG_ALGORITHM, SeedSpec, SplitSpec, TimeSeries, as_array, prediction_dataset, read_csv, read_single_column
from .datasets import find_dataset, load_santa_fe_laser, load_sleep_apnea, load_sunspots, normalize_unit_range
from .errors import DataError, DimensionMismatch, EmptySuite, InvalidParameter, LengthMismatch, RCBenchError
from .esn import TIMING_CONVENTION, Esn, EsnConfig, esn_new, harvest_states, run_free, settle, train_readout
from .measures import (
    SharedConfig,
    gen_rank_vidamour,
    ipc,
    kernel_rank_vidamour,
    kr_gr_dale,
    memory_capacity,
    shared_measure_run,
)
from .metrics import AGGREGATION, QUARTILE_METHOD, error, summary_stats, symbol_error_rate
from .tasks import build_task

SPEC_VERSION = 1
REPORT_VERSION = 1
MODES = ("imitation", "prediction_driven", "prediction_free")
VARIATIONS = ("new_reservoir", "new_input", "both")
SUITE_MEASURES = ("MC", "IPC", "KR_dale", "GR_dale", "KR_vidamour", "GR_vidamour")


def _schema(name: str) -> dict:
    return json.loads(resources.files("rcbench").joinpath(f"data/{name}.schema.json").read_text())


def validate_spec_document(doc: dict) -> None:
    try:
        jsonschema.validate(doc, _schema("experiment_spec"))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidParameter(f"experiment spec invalid at {where}: {exc.message}") from None


def validate_report_document(doc: dict) -> None:
    try:
        jsonschema.validate(doc, _schema("experiment_report"))
    except jsonschema.ValidationError as exc:
        raise InvalidParameter(f"report incomplete: {exc.message}") from None


@dataclass
class ExperimentSpec:
    task: dict
    splits: SplitSpec
    reservoir: dict = field(default_factory=dict)
    ridge_lambda: float = 1e-8
    washout_policy: str = "initial_subsequence"
    n_runs: int = 1
    variation: str = "both"
    mode: str = "imitation"
    metric: str = "NRMSE"
    free_run_horizon: int | None = None
    master_seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))

    def __post_init__(self):
        if self.mode == "prediction_free" and not self.free_run_horizon:
            raise InvalidParameter("prediction_free mode requires free_run_horizon")
        if self.free_run_horizon is not None and self.free_run_horizon > self.splits.test_len:
            raise InvalidParameter("free_run_horizon may not exceed the test length")
        if "generator" in self.task and self.mode != "imitation" and "params" not in self.task:
            self.task = dict(self.task, params={})

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        validate_spec_document(doc)
        task = dict(doc["task"])
        if "generator" in task:
            task.setdefault("params", {})
            task.setdefault("on_divergence", "regenerate")
        else:
            task.setdefault("loader", "csv")
            task.setdefault("channel", None)
            task.setdefault("normalize", False)
        return cls(
            task=task,
            splits=SplitSpec.from_value(doc["splits"]),
            reservoir=dict(doc.get("reservoir", {})),
            ridge_lambda=float(doc.get("ridge_lambda", 1e-8)),
            washout_policy=doc.get("washout_policy", "initial_subsequence"),
            n_runs=int(doc.get("n_runs", 1)),
            variation=doc.get("variation", "both"),
            mode=doc.get("mode", "imitation"),
            metric=doc.get("metric", "NRMSE"),
            free_run_horizon=doc.get("free_run_horizon"),
            master_seed=SeedSpec.from_value(doc.get("master_seed", 0)),
        )

    def esn_config(self, input_dim: int, output_dim: int) -> EsnConfig:
        d = dict(self.reservoir)
        d.setdefault("input_dim", input_dim)
        d.setdefault("output_dim", output_dim)
        cfg = EsnConfig.from_dict(d)
        if cfg.input_dim != input_dim or cfg.output_dim != output_dim:
            raise DimensionMismatch(
                f"reservoir dims ({cfg.input_dim} in, {cfg.output_dim} out) do not match the task "
                f"({input_dim} in, {output_dim} out)"
            )
        return cfg

    def to_dict(self, input_dim: int | None = None, output_dim: int | None = None) -> dict:
        res = dict(self.reservoir)
        if input_dim is not None:
            res.setdefault("input_dim", input_dim)
            res.setdefault("output_dim", output_dim)
        full = EsnConfig.from_dict(res).to_dict()
        full.pop("seed")
        return {
            "schema_version": SPEC_VERSION,
            "task": dict(self.task),
            "reservoir": full,
            "ridge_lambda": self.ridge_lambda,
            "splits": self.splits.to_dict(),
            "washout_policy": self.washout_policy,
            "n_runs": self.n_runs,
            "variation": self.variation,
            "mode": self.mode,
            "metric": self.metric,
            "free_run_horizon": self.free_run_horizon,
            "master_seed": self.master_seed.to_dict(),
        }


def run_seeds(spec: ExperimentSpec, r: int) -> tuple[SeedSpec, SeedSpec]:
    """(reservoir seed, input seed) for run ``r`` under the variation policy."""
    m = spec.master_seed
    res_run = r if spec.variation in ("new_reservoir", "both") else 0
    in_run = r if spec.variation in ("new_input", "both") else 0
    return m.spawn(res_run, "reservoir"), m.spawn(in_run, "input")


# -- data -----------------------------------------------------------------


def load_dataset_series(task: dict) -> TimeSeries:
    loader = task.get("loader", "csv")
    path = task["dataset"]
    if loader == "santa_fe_laser":
        s = load_santa_fe_laser(path).channels
    elif loader == "sunspots":
        s = load_sunspots(path).channels
    elif loader == "sleep_apnea":
        s = load_sleep_apnea(path, None).channels
    elif loader == "single_column":
        s = read_single_column(find_dataset(path))
    else:
        s = read_csv(find_dataset(path))[0]
    if task.get("channel") is not None:
        c = int(task["channel"])
        if c >= s.dim:
            raise DimensionMismatch(f"channel {c} requested from a {s.dim}-channel dataset")
        s = TimeSeries(s.values[:, c])
    if task.get("normalize"):
        s = normalize_unit_range(s)
    return s


@dataclass
class _DatasetPlan:
    series: TimeSeries
    offsets: list[int]
    fallback: bool


def plan_dataset(spec: ExperimentSpec) -> _DatasetPlan:
    """Decide the window each run takes from a recorded dataset."""
    s = load_dataset_series(spec.task)
    need = spec.splits.total + 1
    if need > len(s):
        raise LengthMismatch(f"splits need {need} frames (one extra for the next-step target) but the dataset has {len(s)}")
    room = len(s) - need
    varies_input = spec.variation in ("new_input", "both")
    if not varies_input or spec.n_runs == 1:
        return _DatasetPlan(s, [0] * spec.n_runs, False)
    if room < spec.n_runs - 1:
        if spec.variation == "new_input":
            raise LengthMismatch(
                f"variation new_input needs {spec.n_runs} distinct windows but the dataset leaves room for {room + 1}"
            )
        return _DatasetPlan(s, [0] * spec.n_runs, True)
    offsets = [int(round(r * room / (spec.n_runs - 1))) for r in range(spec.n_runs)]
    return _DatasetPlan(s, offsets, False)


def _run_data(spec: ExperimentSpec, r: int, input_seed: SeedSpec, plan: _DatasetPlan | None):
    """TaskDataset for run ``r`` plus per-run provenance."""
    total = spec.splits.total
    if plan is not None:
        off = plan.offsets[r]
        window = plan.series[off: off + total + 1]
        return prediction_dataset(window), {"data_offset": off}, {}
    gen = build_task(
        spec.task["generator"], spec.task.get("params"), input_seed,
        total if spec.mode == "imitation" else total + 1,
        on_divergence=spec.task.get("on_divergence", "regenerate"),
    )
    info = {}
    if "regenerated" in gen.metadata:
        info["regenerated"] = gen.metadata["regenerated"]
    if gen.kind == "imitation":
        if spec.mode != "imitation":
            raise InvalidParameter(f"task {gen.name!r} is an imitation task; use mode 'imitation'")
        ds = gen.data
    else:
        if spec.mode == "imitation":
            raise InvalidParameter(f"task {gen.name!r} is an autonomous series; use a prediction mode")
        ds = prediction_dataset(gen.data)
    return ds, info, gen.params


def _score(metric: str, target: np.ndarray, observed: np.ndarray, alphabet) -> float:
    if metric == "SER":
        return symbol_error_rate(observed, target, alphabet).value
    return error(metric, target, observed).value


def _run_one(spec: ExperimentSpec, r: int, plan: _DatasetPlan | None) -> tuple[dict, dict, tuple[int, int]]:
    t0 = time.perf_counter()
    res_seed, in_seed = run_seeds(spec, r)
    ds, info, task_params = _run_data(spec, r, in_seed, plan)
    u, y = as_array(ds.inputs), as_array(ds.targets)
    cfg = spec.esn_config(u.shape[1], y.shape[1])
    cfg = replace(cfg, seed=res_seed)
    w, tr, te = spec.splits.washout_len, spec.splits.train_len, spec.splits.test_len
    if ds.valid_from > w:
        raise InvalidParameter(f"washout {w} is shorter than the task's undefined prefix ({ds.valid_from} frames)")
    a, b = w, w + tr
    esn = esn_new(cfg)
    if spec.washout_policy != "initial_subsequence":
        settle(esn, ds.inputs, w, spec.washout_policy)

    alphabet = np.unique(y) if spec.metric == "SER" else None
    if spec.mode == "prediction_free":
        states = harvest_states(esn, TimeSeries(u[:b]), 0)
        readout = train_readout(states[a:b], y[a:b], spec.ridge_lambda)
        horizon = spec.free_run_horizon
        pred = as_array(run_free(esn, readout, TimeSeries(u[b: b + 1]), horizon))
        c = b + horizon
    else:
        states = harvest_states(esn, TimeSeries(u[: b + te]), 0)
        readout = train_readout(states[a:b], y[a:b], spec.ridge_lambda)
        pred = readout.predict(states[b: b + te])
        c = b + te
    target = y[b:c]
    row = {
        "run": r,
        "seeds": {"reservoir": res_seed.to_dict(), "input": in_seed.to_dict()},
        "metric": _score(spec.metric, target, pred, alphabet),
        "baseline_mean": _score(spec.metric, target, np.broadcast_to(target.mean(axis=0), target.shape), alphabet),
        "baseline_persistence": _score(spec.metric, target, y[b - 1: c - 1], alphabet),
        "n_test_points": int(target.shape[0]),
        **info,
        "wall_clock_s": time.perf_counter() - t0,
    }
    return row, task_params, (u.shape[1], y.shape[1])


def _run_tagged(spec: ExperimentSpec, r: int, plan):
    try:
        return _run_one(spec, r, plan)
    except RCBenchError as exc:
        exc.run_index = r
        exc.args = (f"run {r}: {exc.args[0] if exc.args else exc}",) + tuple(exc.args[1:])
        raise


def _run_tagged_doc(spec_doc: dict, r: int, plan):
    return _run_tagged(ExperimentSpec.from_dict(spec_doc), r, plan)


def run_experiment(spec: ExperimentSpec | dict, workers: int = 1) -> dict:
    """Execute every run and assemble the report (a JSON-ready dict)."""
    if isinstance(spec, dict):
        spec = ExperimentSpec.from_dict(spec)
    t0 = time.perf_counter()
    plan = plan_dataset(spec) if "dataset" in spec.task else None
    if workers > 1 and spec.n_runs > 1:
        doc = spec.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_tagged_doc, doc, r, plan) for r in range(spec.n_runs)]
            results = [f.result() for f in futures]
    else:
        results = [_run_tagged(spec, r, plan) for r in range(spec.n_runs)]
    rows = [res[0] for res in results]
    task_params = results[0][1]
    dims = results[0][2]

    flags = {}
    if plan is not None:
        flags["dataset_length"] = len(plan.series)
        flags["dataset_variation_fallback"] = plan.fallback
        if plan.fallback:
            flags["effective_variation"] = "new_reservoir"
    if spec.task.get("generator") == "lorenz63" and task_params.get("convention") == "as_printed":
        flags["lorenz63_convention"] = "as_printed"

    def stats(key):
        return summary_stats([row[key] for row in rows]).to_dict()

    return {
        "format": "rcbench-experiment-report",
        "report_version": REPORT_VERSION,
        "suite_version": __version__,
        "rng": RNG_ALGORITHM,
        "timing_convention": TIMING_CONVENTION,
        "error_aggregation": AGGREGATION,
        "quartile_method": QUARTILE_METHOD,
        "spec": spec.to_dict(*dims),
        "task_params": task_params,
        "flags": flags,
        "runs": rows,
        "summary": {"metric": stats("metric"), "baseline_mean": stats("baseline_mean"),
                    "baseline_persistence": stats("baseline_persistence")},
        "wall_clock_s": time.perf_counter() - t0,
    }


def saturation_sweep(spec: ExperimentSpec | dict, train_lengths: list[int], tolerance: float = 0.01, workers: int = 1) -> dict:
    """Rerun across training lengths and find where the mean metric settles.

    ``saturation_length`` is the first length after which every further
    step changes the mean metric by less than ``tolerance`` (relative);
    ``None`` if the sweep never settles.
    """
    if isinstance(spec, dict):
        spec = ExperimentSpec.from_dict(spec)
    lengths = sorted(set(int(x) for x in train_lengths))
    if not lengths:
        raise InvalidParameter("no training lengths given")
    means = []
    for n in lengths:
        s = replace(spec, splits=SplitSpec(spec.splits.washout_len, n, spec.splits.test_len))
        means.append(run_experiment(s, workers)["summary"]["metric"]["mean"])
    sat = None
    for i in range(len(lengths)):
        rest = means[i:]
        if len(rest) > 1 and all(abs(rest[j + 1] - rest[j]) <= tolerance * abs(rest[j]) for j in range(len(rest) - 1)):
            sat = lengths[i]
            break
    return {
        "format": "rcbench-saturation-sweep",
        "spec": spec.to_dict(),
        "tolerance": tolerance,
        "train_lengths": lengths,
        "mean_metric": means,
        "saturation_length": sat,
    }


# -- measure suite --------------------------------------------------------

_MEASURE_DEFAULTS = {
    "lengths": [500, 2000, 1000],
    "ridge_lambda": 1e-8,
    "k_max": None,
    "mc_epsilon": 0.0,
    "max_degree": 2,
    "max_delay": 10,
    "ipc_threshold": 0.01,
    "ipc_surrogates": 0,
    "S": None,
    "T": 20,
    "tail_len": 10,
    "rank_washout": 100,
    "threshold_fraction": 1e-4,
    "seed": 0,
}


def run_measure_suite(reservoir: EsnConfig | Esn, which, params: dict | None = None) -> dict:
    """Run the requested measures on one reservoir and echo every constant.

    MC and single-stream KR share one drive when both are requested.
    """
    requested = set(which)
    bad = requested - set(SUITE_MEASURES)
    if bad:
        raise InvalidParameter(f"unknown measure(s) {sorted(bad)}; choose from {SUITE_MEASURES}")
    which = [w for w in SUITE_MEASURES if w in requested]
    if not which:
        raise EmptySuite("no measures requested")
    p = dict(_MEASURE_DEFAULTS)
    extra = set(params or {}) - set(p)
    if extra:
        raise InvalidParameter(f"unknown measure parameter(s): {sorted(extra)}")
    p.update(params or {})
    esn = esn_new(reservoir) if isinstance(reservoir, EsnConfig) else reservoir
    seed = SeedSpec.from_value(p["seed"])
    lengths = SplitSpec.from_value(p["lengths"])
    s = 2 * esn.n_nodes if p["S"] is None else int(p["S"])
    p["S"] = s
    p["k_max"] = 2 * esn.n_nodes if p["k_max"] is None else int(p["k_max"])
    results: dict[str, Any] = {}

    if "MC" in which and "KR_dale" in which:
        if lengths.washout_len != p["rank_washout"]:
            raise InvalidParameter("sharing data between MC and KR_dale needs rank_washout equal to the MC washout")
        mc, kr = shared_measure_run(
            esn, SharedConfig(lengths, p["k_max"], s, p["threshold_fraction"], p["ridge_lambda"], p["mc_epsilon"], seed)
        )
        results["MC"] = mc.to_dict()
        results["KR_dale"] = kr.to_dict()
    elif "MC" in which:
        results["MC"] = memory_capacity(esn, p["k_max"], lengths, seed, p["ridge_lambda"], p["mc_epsilon"]).to_dict()
    elif "KR_dale" in which:
        results["KR_dale"] = kr_gr_dale(esn, s, "KR", p["threshold_fraction"], seed, p["rank_washout"]).to_dict()
    if "IPC" in which:
        results["IPC"] = ipc(esn, p["max_degree"], p["max_delay"], p["ipc_threshold"], lengths, seed,
                             p["ridge_lambda"], surrogates=p["ipc_surrogates"]).to_dict()
    if "GR_dale" in which:
        results["GR_dale"] = kr_gr_dale(esn, s, "GR", p["threshold_fraction"], seed, p["rank_washout"]).to_dict()
    if "KR_vidamour" in which:
        results["KR_vidamour"] = kernel_rank_vidamour(esn, s, p["T"], p["threshold_fraction"], seed, p["rank_washout"]).to_dict()
    if "GR_vidamour" in which:
        results["GR_vidamour"] = gen_rank_vidamour(
            esn, s, p["T"], p["tail_len"], p["threshold_fraction"], seed, p["rank_washout"]
        ).to_dict()

    p["seed"] = seed.to_dict()
    p["lengths"] = lengths.to_dict()
    return {
        "format": "rcbench-measure-report",
        "report_version": REPORT_VERSION,
        "suite_version": __version__,
        "rng": RNG_ALGORITHM,
        "timing_convention": TIMING_CONVENTION,
        "reservoir": esn.config.to_dict(),
        "params": p,
        "shared_data": "MC+KR_dale" if "MC" in which and "KR_dale" in which else None,
        "results": {k: results[k] for k in which},
    }


def parse_suite(names: str) -> list[str]:
    """``"mc,kr-dale"`` -> ``["MC", "KR_dale"]``."""
    table = {m.lower().replace("_", "-"): m for m in SUITE_MEASURES}
    out = []
    for tok in names.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        if tok not in table:
            raise InvalidParameter(f"unknown measure {tok!r}; choose from {sorted(table)}")
        out.append(table[tok])
    if not out:
        raise EmptySuite("no measures requested")
    return out


# -- report output --------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_report(report: dict, fmt: str = "json") -> str:
    """Render a report as ``json`` (lossless), ``csv`` or ``markdown``."""
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    kind = report.get("format")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if kind == "rcbench-experiment-report":
            metric = report["spec"]["metric"]
            w.writerow(["run", metric, f"baseline_mean_{metric}", f"baseline_persistence_{metric}",
                        "n_test_points", "reservoir_seed", "input_seed", "wall_clock_s"])
            for row in report["runs"]:
                w.writerow([row["run"], _fmt(row["metric"]), _fmt(row["baseline_mean"]),
                            _fmt(row["baseline_persistence"]), row["n_test_points"],
                            json.dumps(row["seeds"]["reservoir"]), json.dumps(row["seeds"]["input"]),
                            _fmt(row["wall_clock_s"])])
        else:
            w.writerow(["measure", "quantity", "value"])
            for name, res in report["results"].items():
                for key, val in _flat_scalars(res):
                    w.writerow([name, key, _fmt(val)])
        return buf.getvalue()
    if fmt == "markdown":
        return _markdown(report)
    raise InvalidParameter(f"unknown report format {fmt!r}")


def _flat_scalars(res: dict):
    for k, v in res.items():
        if isinstance(v, (int, float, str)) and not isinstance(v, bool):
            yield k, v
        elif isinstance(v, list) and v and all(isinstance(x, (int, float)) for x in v):
            for i, x in enumerate(v):
                yield f"{k}[{i}]", x
        elif isinstance(v, dict) and all(isinstance(x, (int, float)) for x in v.values()):
            for kk, x in v.items():
                yield f"{k}[{kk}]", x


def _pm(s: dict) -> str:
    return f"{s['mean']:.6g} ± {s['sd']:.3g}"


def _markdown(report: dict) -> str:
    lines = []
    if report.get("format") == "rcbench-experiment-report":
        spec = report["spec"]
        task = spec["task"].get("generator") or spec["task"].get("dataset")
        lines += [f"## Experiment: {task} ({spec['mode']})", ""]
        lines += ["| measure | result (mean ± sd) | median [q1, q3] | mean baseline | persistence baseline | runs |",
                  "|---|---|---|---|---|---|"]
        s = report["summary"]
        m = s["metric"]
        lines.append(
            f"| {spec['metric']} | {_pm(m)} | {m['median']:.6g} [{m['q1']:.6g}, {m['q3']:.6g}] | "
            f"{_pm(s['baseline_mean'])} | {_pm(s['baseline_persistence'])} | {m['n']} |"
        )
        lines += ["", "### Parameters", "", "| parameter | value |", "|---|---|"]
        for k, v in spec["reservoir"].items():
            lines.append(f"| reservoir.{k} | {_fmt(v)} |")
        for k, v in report["task_params"].items():
            lines.append(f"| task.{k} | {_fmt(v)} |")
        for k in ("ridge_lambda", "washout_policy", "n_runs", "variation", "free_run_horizon"):
            lines.append(f"| {k} | {_fmt(spec[k])} |")
        sp = spec["splits"]
        lines.append(f"| splits (washout/train/test) | {sp['washout_len']}/{sp['train_len']}/{sp['test_len']} |")
        lines.append(f"| master_seed | {spec['master_seed']['master_seed']} |")
        lines += ["", f"Suite {report['suite_version']}; {report['rng']}."]
    else:
        lines += ["## Reservoir measures", "", "| measure | value | parameters |", "|---|---|---|"]
        for name, res in report["results"].items():
            if name == "MC":
                val, par = res["total"], f"k_max={res['k_max']}, epsilon={res['epsilon']}"
            elif name == "IPC":
                val, par = res["total"], f"max_degree={res['max_degree']}, max_delay={res['max_delay']}, threshold={res['threshold']}"
            else:
                val = res["rank"]
                par = ", ".join(f"{k}={res[k]}" for k in ("S", "T", "tail_len", "washout", "input_range", "threshold_fraction") if k in res)
                par += f"; effective rank {res['effective_rank']:.4g}"
            lines.append(f"| {name} | {_fmt(val)} | {par} |")
        lines += ["", f"Suite {report['suite_version']}; {report['rng']}."]
    return "\n".join(lines) + "\n"


def load_report(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("format") == "rcbench-experiment-report":
        validate_report_document(doc)
    elif doc.get("format") != "rcbench-measure-report":
        raise DataError("not an rcbench report")
    return doc
