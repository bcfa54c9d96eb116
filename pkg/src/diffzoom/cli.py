"""Command-line front end.

Config files are flat ``key = value`` text with ``#`` comments; repeated
``--override key=value`` flags apply on top, and the DIFFZOOM_SEED
environment variable overrides the seed from the file. Unknown keys are
errors, not warnings.

Exit codes: 0 all asserted checks passed, 1 a check failed, 2 config or
usage error. Every error prints one line ``CODE: human text``.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path as FsPath

import numpy as np

from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_argmax_boundary,
    run_sup_estimation,
    run_zoom_at_fixed_time,
    run_zoom_at_supremum,
    write_samples_csv,
)
from .model import ModelError
from .reference import LAW_NAMES, make_law
from .simulate import SeedPlan, simulate_path
from .experiments import CSV_SCHEMA_VERSION

__all__ = ["main"]

MODEL_PARAM_KEYS = {"sigma0", "mu0", "theta", "x0"}

CONFIG_KEYS = {
    "model": str,
    "delta": float,
    "horizon": float,
    "eps": "float_list",
    "n_paths": int,
    "seed": int,
    "resolution": int,
    "truncation_k": int,
    "zoom_time": float,
    "window": float,
    "threads": int,
    "ks_threshold": float,
    "alpha": float,
    "n_slices": int,
    "boundary_tol": float,
    "uniform_ks_threshold": float,
    "conjecture_ks_threshold": float,
    "conjecture_samples": int,
    "max_excluded_fraction": float,
}


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def _convert(key: str, raw: str):
    if key in MODEL_PARAM_KEYS:
        return float(raw)
    if key not in CONFIG_KEYS:
        raise CliError("UNKNOWN_KEY", f"unknown config key '{key}'")
    kind = CONFIG_KEYS[key]
    try:
        if kind == "float_list":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        if kind is int:
            return int(raw, 0)
        return kind(raw)
    except ValueError as exc:
        raise CliError("CONFIG_INVALID", f"bad value for '{key}': {exc}")


def parse_config_file(path: str) -> dict:
    p = FsPath(path)
    if not p.is_file():
        raise CliError("CONFIG_NOT_FOUND", f"config file '{path}' not found")
    out = {}
    for lineno, line in enumerate(p.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError("CONFIG_INVALID",
                           f"{path}:{lineno}: expected 'key = value'")
        key, raw = (tok.strip() for tok in line.split("=", 1))
        out[key] = _convert(key, raw)
    return out


def build_experiment_config(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        raw.update(parse_config_file(args.config))
    if "DIFFZOOM_SEED" in os.environ:
        raw["seed"] = _convert("seed", os.environ["DIFFZOOM_SEED"])
    for item in args.override or ():
        if "=" not in item:
            raise CliError("CONFIG_INVALID",
                           f"override '{item}' is not key=value")
        key, val = (tok.strip() for tok in item.split("=", 1))
        raw[key] = _convert(key, val)
    if args.seed is not None:
        raw["seed"] = args.seed

    params = {k: raw.pop(k) for k in list(raw) if k in MODEL_PARAM_KEYS}
    cfg = ExperimentConfig()
    if params:
        cfg.params = params
    for key, val in raw.items():
        if key == "seed":
            cfg.master_seed = val
        elif key == "eps":
            cfg.epsilons = val
        else:
            setattr(cfg, key, val)
    return cfg


def _emit(report, out_dir: str, name: str):
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.json").write_text(report.to_json() + "\n")
    write_samples_csv(report, out / f"{name}_samples.csv")
    status = "pass" if report.passed else "FAIL"
    n_checks = len([c for c in report.checks if c.passed is not None])
    print(f"{report.experiment}: {status} "
          f"({n_checks} asserted checks, "
          f"{report.timing['wall_seconds']:.1f}s) -> {out / (name + '.json')}")


EXPERIMENTS = {
    "zoom-fixed": ("zoom_fixed", run_zoom_at_fixed_time),
    "zoom-sup": ("zoom_sup", run_zoom_at_supremum),
    "estimate-sup": ("estimate_sup", run_sup_estimation),
    "argmax": ("argmax", run_argmax_boundary),
}


def cmd_experiment(args) -> int:
    cfg = build_experiment_config(args)
    names = (list(EXPERIMENTS) if args.command == "all"
             else [args.command])
    ok = True
    for sub in names:
        name, fn = EXPERIMENTS[sub]
        report = fn(cfg)
        _emit(report, args.out, name)
        ok = ok and report.passed
    return 0 if ok else 1


def cmd_simulate(args) -> int:
    cfg = build_experiment_config(args)
    model = cfg.make_model()
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k in range(cfg.n_paths):
        path = simulate_path(model, cfg.horizon, cfg.n_steps,
                             SeedPlan(cfg.master_seed, k))
        fname = out / f"path_{k:05d}.csv"
        with open(fname, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"schema_v{CSV_SCHEMA_VERSION}", "t", "x"])
            for t, x in zip(path.times, path.values):
                w.writerow(["", repr(float(t)), repr(float(x))])
    print(f"simulate: wrote {cfg.n_paths} path files to {out}")
    return 0


def cmd_reference(args) -> int:
    try:
        law = make_law(args.law, t=args.t)
    except ValueError as exc:
        raise CliError("CONFIG_INVALID", str(exc))
    xs = np.linspace(args.xmin, args.xmax, args.points)
    ys = law.cdf(xs)
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fname = out / f"reference_{args.law}.csv"
    with open(fname, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"schema_v{CSV_SCHEMA_VERSION}", "x", "cdf"])
        for x, y in zip(xs, ys):
            w.writerow(["", repr(float(x)), repr(float(y))])
    print(f"reference: wrote {law.name} cdf table to {fname}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffzoom",
        description="Monte Carlo study of diffusion behavior at small "
                    "scales and estimation of the supremum",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="config override (repeatable)")
        p.add_argument("--seed", type=lambda s: int(s, 0),
                       help="master seed (beats config and DIFFZOOM_SEED)")
        p.add_argument("--out", default="out", help="output directory")

    for name in ("zoom-fixed", "zoom-sup", "estimate-sup", "argmax", "all"):
        add_common(sub.add_parser(name))

    p = sub.add_parser("simulate", help="dump raw paths as CSV (debugging)")
    add_common(p)

    p = sub.add_parser("reference", help="emit a reference cdf table as CSV")
    p.add_argument("--law", required=True, choices=LAW_NAMES)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--xmin", type=float, default=0.0)
    p.add_argument("--xmax", type=float, default=5.0)
    p.add_argument("--points", type=int, default=500)
    p.add_argument("--out", default="out")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "reference":
            return cmd_reference(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_experiment(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (ConfigError, ModelError) as exc:
        print(f"CONFIG_INVALID: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
