"""Command line front end.

Subcommands: ``fit``, ``predict``, ``generate``, ``elbow``, ``bench`` and
``experiment``.  Exit codes: 0 success, 2 configuration error, 3 data error,
4 numerical failure.  ``SB_THREADS`` caps BLAS threads (0 or unset = auto).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import nullcontext

import numpy as np

from . import data as datamod
from .errors import ConfigError, DataError, NumericalError
from .evaluation import m_sweep_reports, noise_experiment, reports_to_csv, reports_to_jsonl, time_fit
from .model import ClusterModel, SBConfig, fit, suggest_m

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def _summary(args, text):
    # keep stdout clean when it carries the data itself
    print(text, file=sys.stderr if args.out in (None, "-") else sys.stdout)


def _load_input(args):
    path = args.input
    if not os.path.exists(path):
        raise CliError(f"input file not found: {path}", EXIT_DATA)
    return datamod.load_csv(path, has_header=not args.no_header, label_column=args.label_column)


def _features(loaded):
    return loaded.x if isinstance(loaded, datamod.LabeledDataset) else loaded


def cmd_fit(args):
    if args.nodes < args.clusters:
        raise CliError(f"--nodes ({args.nodes}) must be >= --clusters ({args.clusters})", EXIT_CONFIG)
    if args.bigm <= 1:
        raise CliError(f"--bigm must be > 1, got {args.bigm}", EXIT_CONFIG)
    x = _features(_load_input(args))
    if args.nodes > x.shape[0]:
        raise CliError(f"--nodes ({args.nodes}) exceeds the number of rows ({x.shape[0]})", EXIT_CONFIG)
    cfg = SBConfig(args.clusters, args.nodes, m_factor=args.bigm, seed=args.seed, restarts=args.restarts)
    model = fit(x, cfg)
    lines = ["row,label"] + [f"{i},{int(v)}" for i, v in enumerate(model.point_labels)]
    _write(args.out, "\n".join(lines) + "\n")
    if args.model_out:
        model.save(args.model_out)
    _summary(args, f"K={cfg.n_clusters} m={cfg.n_regions} gamma={model.gamma!r} wcss={model.wcss!r}")
    return 0


def cmd_predict(args):
    if not os.path.exists(args.model):
        raise CliError(f"model file not found: {args.model}", EXIT_DATA)
    try:
        model = ClusterModel.load(args.model)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{args.model}: invalid model document ({exc})", EXIT_DATA) from None
    x = _features(_load_input(args))
    labels = model.predict(x)
    lines = ["row,label"] + [f"{i},{int(v)}" for i, v in enumerate(labels)]
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_generate(args):
    if args.name not in datamod.GENERATORS:
        raise CliError(
            f"unknown dataset {args.name!r}; valid names: {', '.join(sorted(datamod.GENERATORS))}", EXIT_CONFIG
        )
    ds = datamod.generate(args.name, rng=args.seed)
    _write(args.out, datamod.dataset_to_csv(ds.x, ds.y))
    counts = ", ".join(str(c) for c in ds.class_counts)
    _summary(args, f"{ds.name}: n={ds.n} classes={ds.n_classes} counts=[{counts}]")
    return 0


def _dataset_from_args(args):
    if args.input:
        loaded = _load_input(args)
        if isinstance(loaded, datamod.LabeledDataset):
            return loaded
        return datamod.LabeledDataset(loaded, np.zeros(loaded.shape[0], dtype=np.intp), "input")
    if args.dataset not in datamod.GENERATORS:
        raise CliError(
            f"unknown dataset {args.dataset!r}; valid names: {', '.join(sorted(datamod.GENERATORS))}", EXIT_CONFIG
        )
    return datamod.generate(args.dataset, rng=args.seed)


def cmd_elbow(args):
    ds = _dataset_from_args(args)
    m, curve = suggest_m(ds.x, args.clusters, args.candidates, rng=args.seed, restarts=args.restarts)
    if args.format == "json":
        text = json.dumps({"curve": [[k, w] for k, w in curve], "recommended": m}, indent=1) + "\n"
    else:
        text = "m,wcss\n" + "".join(f"{k},{w!r}\n" for k, w in curve)
    _write(args.out, text)
    _summary(args, f"recommended m={m}")
    return 0


def _finite(v):
    return v if np.isfinite(v) else None


def cmd_bench(args):
    table = time_fit(
        args.values,
        sweep=args.sweep,
        reps=args.reps,
        fixed_m=args.fixed_m,
        fixed_n=args.fixed_n,
        n_clusters=args.clusters,
        dim=args.dim,
        seed=args.seed,
    )
    if args.format == "json":
        doc = {
            "variable": table.variable,
            "rows": [list(r) for r in table.rows],
            "slope": _finite(table.slope),
            "intercept": _finite(table.intercept),
            "r2": _finite(table.r2),
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = table.to_csv()
    _write(args.out, text)
    _summary(args, f"slope={table.slope:.6g} intercept={table.intercept:.6g} r2={table.r2:.4f}")
    return 0


def cmd_experiment(args):
    if args.name == "noise":
        reports = noise_experiment(seed=args.seed)
    else:
        ds = _dataset_from_args(args)
        k = args.clusters or ds.n_classes
        m_values = args.m or [k]
        reports = m_sweep_reports(ds, k, m_values, reps=args.reps, seed=args.seed)
    text = reports_to_jsonl(reports) if args.format == "json" else reports_to_csv(reports)
    _write(args.out, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bridgecluster", description="Bridge-affinity spectral clustering")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_flags(p, required=True):
        p.add_argument("--input", required=required, help="CSV file of observations")
        p.add_argument("--no-header", action="store_true", help="input has no header row")
        p.add_argument("--label-column", type=int, default=None, help="index of a label column to exclude")

    p = sub.add_parser("fit", help="cluster a CSV file")
    data_flags(p)
    p.add_argument("--out", default="-", help="labels CSV (row,label); default stdout")
    p.add_argument("-k", "--clusters", type=int, required=True)
    p.add_argument("-m", "--nodes", type=int, required=True, help="number of Voronoi regions")
    p.add_argument("--bigm", type=float, default=1e4, help="affinity spread factor M")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--model-out", default=None, help="write the fitted model as JSON")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="label new points with a saved model")
    data_flags(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("name")
    p.add_argument("--out", default="-")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("elbow", help="WCSS curve and suggested number of regions")
    data_flags(p, required=False)
    p.add_argument("--dataset", default="moons")
    p.add_argument("-k", "--clusters", type=int, required=True)
    p.add_argument("--candidates", type=_int_list, required=True, help="comma-separated region counts")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_elbow)

    p = sub.add_parser("bench", help="fit-time sweep over n or m")
    p.add_argument("--sweep", choices=("n", "m"), default="n")
    p.add_argument("--values", type=_int_list, required=True)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--fixed-m", type=int, default=10)
    p.add_argument("--fixed-n", type=int, default=5000)
    p.add_argument("-k", "--clusters", type=int, default=5)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("experiment", help="noise-robustness or m-sweep experiment")
    p.add_argument("name", choices=("noise", "msweep"))
    data_flags(p, required=False)
    p.add_argument("--dataset", default="moons")
    p.add_argument("-k", "--clusters", type=int, default=None)
    p.add_argument("-m", "--m", type=_int_list, default=None, help="comma-separated region counts")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_experiment)
    return parser


def _thread_limit():
    raw = os.environ.get("SB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"SB_THREADS must be an integer, got {raw!r}", EXIT_CONFIG) from None
    if n < 0:
        raise CliError("SB_THREADS must be >= 0", EXIT_CONFIG)
    if n == 0:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit():
            return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
