"""Batch command line: ``rcbench <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import RNG_ALGORITHM, SeedSpec, TaskDataset, as_array, read_csv, read_series, write_csv
from .datasets import DATA_ENV, data_dir, default_manifest, verify_manifest
from .errors import ChecksumMismatch, DataError, NumericFailure
from .esn import esn_from_dict
from .harness import emit_report, load_report, parse_suite, run_experiment, run_measure_suite, saturation_sweep
from .metrics import MEASURES, mean_error, persistence_error
from .tasks import TASKS, build_task

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def parse_param(text: str) -> tuple[str, object]:
    """``k=v`` with ``v`` read as JSON when possible, else as a string."""
    if "=" not in text:
        raise UsageError(f"--param expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        val = json.loads(raw)
    except json.JSONDecodeError:
        val = raw
    return key.strip(), val


def _params(items) -> dict:
    return dict(parse_param(p) for p in items or [])


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="rcbench", description="Reservoir computing benchmark suite.", formatter_class=fmt)
    p.add_argument("--version", action="version", version=f"rcbench {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("generate", help="write a task dataset as CSV plus a metadata sidecar", formatter_class=fmt)
    g.add_argument("task", choices=sorted(TASKS), help="task generator")
    g.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="generator parameter, repeatable; values are parsed as JSON when possible")
    g.add_argument("--len", type=int, required=True, dest="length", help="number of frames")
    g.add_argument("--seed", type=int, default=0, help="master seed")
    g.add_argument("--stream-id", type=int, default=0, help="stream id under the master seed")
    g.add_argument("--on-divergence", choices=["abort", "regenerate"], default="abort",
                   help="what to do when a NARMA draw diverges")
    g.add_argument("--out", required=True, help="CSV output path; metadata goes next to it with a .json suffix")

    r = sub.add_parser("run", help="run an experiment spec and write its report", formatter_class=fmt)
    r.add_argument("--spec", required=True, help="experiment spec JSON")
    r.add_argument("--out", required=True, help="report output path")
    r.add_argument("--format", choices=["json", "csv", "markdown"], default="json", help="report format")
    r.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    r.add_argument("--sweep-train-lengths", default=None, metavar="N,N,...",
                   help="instead of one experiment, sweep these training lengths and report the saturation length")
    r.add_argument("--tolerance", type=float, default=0.01, help="relative change treated as saturated in a sweep")

    m = sub.add_parser("measure", help="run reservoir property measures", formatter_class=fmt)
    m.add_argument("--esn", required=True, help="reservoir JSON (full weights, or just a config to draw from)")
    m.add_argument("--suite", required=True,
                   help="comma list from mc, ipc, kr-dale, gr-dale, kr-vidamour, gr-vidamour")
    m.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="measure parameter, repeatable (lengths, k_max, max_degree, max_delay, ipc_threshold, "
                        "ipc_surrogates, S, T, tail_len, rank_washout, threshold_fraction, ridge_lambda, "
                        "mc_epsilon, seed)")
    m.add_argument("--out", required=True, help="report output path")
    m.add_argument("--format", choices=["json", "csv", "markdown"], default="json", help="report format")

    b = sub.add_parser("baseline", help="print mean and persistence baselines of a series", formatter_class=fmt)
    b.add_argument("--data", required=True, help="CSV (header optional) or single-column file")
    b.add_argument("--measure", default="nrmse", type=str.upper, choices=[m for m in MEASURES if m != "SER"],
                   help="error measure")
    b.add_argument("--column", default=None, help="column index or header name (default: all numeric columns)")

    v = sub.add_parser("datasets-verify", help="check dataset files against a SHA-256 manifest", formatter_class=fmt)
    v.add_argument("--manifest", default=None, help="manifest JSON; None means the packaged manifest")
    v.add_argument("--dir", default=None, help=f"data directory (default: ${DATA_ENV} or ./data)")
    v.add_argument("--require-all", action="store_true", help="treat missing files as failures")

    rp = sub.add_parser("report", help="re-render a saved report in another format", formatter_class=fmt)
    rp.add_argument("--in", required=True, dest="source", help="report JSON")
    rp.add_argument("--format", choices=["json", "csv", "markdown"], default="markdown", help="output format")
    rp.add_argument("--out", default=None, help="output path (default: stdout)")
    return p


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_generate(args) -> int:
    seed = SeedSpec(args.seed, args.stream_id)
    gen = build_task(args.task, _params(args.param), seed, args.length, on_divergence=args.on_divergence)
    out = Path(args.out)
    if isinstance(gen.data, TaskDataset):
        u, y = as_array(gen.data.inputs), as_array(gen.data.targets)
        cols = [f"input{i}" for i in range(u.shape[1])] + [f"target{i}" for i in range(y.shape[1])]
        write_csv(out, np.hstack([u, y]), cols)
        valid_from = gen.data.valid_from
    else:
        x = as_array(gen.data)
        cols = [f"x{i}" for i in range(x.shape[1])]
        write_csv(out, x, cols)
        valid_from = 0
    meta = {
        "task": gen.name,
        "kind": gen.kind,
        "params": gen.params,
        "length": args.length,
        "columns": cols,
        "valid_from": valid_from,
        "seed": seed.to_dict(),
        "on_divergence": args.on_divergence,
        "generator_version": gen.metadata.get("generator_version"),
        "suite_version": __version__,
        "rng": RNG_ALGORITHM,
        "metadata": {k: v for k, v in gen.metadata.items() if k not in ("generator_version",)},
    }
    out.with_suffix(".json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    return EXIT_OK


def cmd_run(args) -> int:
    doc = json.loads(Path(args.spec).read_text())
    if args.sweep_train_lengths:
        try:
            lengths = [int(x) for x in args.sweep_train_lengths.split(",") if x.strip()]
        except ValueError:
            raise UsageError("--sweep-train-lengths expects comma-separated integers") from None
        report = saturation_sweep(doc, lengths, args.tolerance, args.workers)
        _write(args.out, json.dumps(report, indent=2) + "\n")
        return EXIT_OK
    report = run_experiment(doc, workers=args.workers)
    _write(args.out, emit_report(report, args.format))
    return EXIT_OK


def cmd_measure(args) -> int:
    esn = esn_from_dict(json.loads(Path(args.esn).read_text()))
    report = run_measure_suite(esn, parse_suite(args.suite), _params(args.param))
    _write(args.out, emit_report(report, args.format))
    return EXIT_OK


def cmd_baseline(args) -> int:
    if args.column is not None:
        col = int(args.column) if args.column.lstrip("-").isdigit() else args.column
        series = read_csv(args.data, columns=[col])[0]
    else:
        series = read_series(args.data)
    m = args.measure
    print(f"mean baseline {m}: {mean_error(m, series).value!r}")
    print(f"persistence baseline {m}: {persistence_error(m, series).value!r}")
    print(f"points: {len(series)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    manifest = default_manifest() if args.manifest is None else args.manifest
    directory = args.dir if args.dir is not None else data_dir()
    results = verify_manifest(manifest, directory)
    failed = False
    for res in results:
        print(f"{res.status:9s} {res.name} {res.path}")
        if res.status == "mismatch" or (res.status == "missing" and args.require_all):
            failed = True
    if failed:
        raise ChecksumMismatch("one or more dataset files failed verification")
    return EXIT_OK


def cmd_report(args) -> int:
    report = load_report(Path(args.source).read_text())
    _write(args.out, emit_report(report, args.format))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "run": cmd_run,
    "measure": cmd_measure,
    "baseline": cmd_baseline,
    "datasets-verify": cmd_verify,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"rcbench: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"rcbench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
