"""Command-line front end.

Subcommands ``run``, ``convergence``, ``boost`` and ``problems``.  Settings
come from an optional ``key = value`` file and are overridden by flags.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .driver import ConfigError, RunConfig, run_boost_study, run_convergence, run_once
from .euler import NonPhysicalState
from .mesh import EmptyMesh, InvertedCell
from .problems import CATALOG
from .scheme import MaxStepsExceeded

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_TRUE = {"1", "on", "true", "yes"}
_FALSE = {"0", "off", "false", "no"}


def parse_bool(text) -> bool:
    t = str(text).strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ConfigError(f"expected on/off, got {text!r}")


def _opt_float(text):
    return None if str(text).strip().lower() in ("", "none", "default") else float(text)


# option name -> converter; solver options map onto SolverConfig fields
SOLVER_OPTIONS = {
    "degree": int,
    "flux": str,
    "roe_alpha": float,
    "mesh": str,
    "smoothing": parse_bool,
    "perturb": float,
    "seed": int,
    "cfl": _opt_float,
    "beta": float,
    "limiter": str,
    "tvb_m": float,
    "positivity": parse_bool,
    "pos_eps": float,
    "adapt": parse_bool,
    "h_min": float,
    "h_max": float,
    "cells": int,
    "predictor": str,
    "manage_edges": parse_bool,
    "max_steps": int,
}
RUN_OPTIONS = {
    "problem": str,
    "boost": float,
    "out": str,
    "snapshot_every": int,
    "modal": parse_bool,
}


def _convert(key, value):
    conv = SOLVER_OPTIONS.get(key) or RUN_OPTIONS.get(key)
    if conv is None:
        raise ConfigError(f"unknown option {key!r}")
    try:
        return conv(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().replace("-", "_")
        out[key] = _convert(key, value.strip())
    return out


def build_config(settings: dict) -> RunConfig:
    run_kw = {k: v for k, v in settings.items() if k in RUN_OPTIONS}
    solver = {k: v for k, v in settings.items() if k in SOLVER_OPTIONS}
    return RunConfig(solver=solver, **run_kw)


def _int_list(text):
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value settings file (flags override it)")
    for key in list(RUN_OPTIONS) + list(SOLVER_OPTIONS):
        p.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="VALUE")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aledg", description="1-D ALE-DG Euler solver")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one simulation")
    _add_common(p)
    p = sub.add_parser("convergence", help="error/rate table on a problem with an exact solution")
    _add_common(p)
    p.add_argument("--degrees", type=_int_list, default=[1, 2, 3])
    p.add_argument("--ns", type=_int_list, default=[100, 200, 400, 800], help="cell counts")
    p.add_argument("--metric", default="poly", choices=("poly", "average"))
    p = sub.add_parser("boost", help="static vs moving runs in boosted frames")
    _add_common(p)
    p.add_argument("--boosts", type=_float_list, default=[0.0, 10.0, 100.0])
    sub.add_parser("problems", help="list the problem catalog")
    return ap


def _settings(args) -> dict:
    settings = read_config_file(args.config) if args.config else {}
    for key in list(RUN_OPTIONS) + list(SOLVER_OPTIONS):
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = _convert(key, val)
    return settings


def _emit(text, out, name):
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text)
    sys.stdout.write(text)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.command == "problems":
        for name, p in sorted(CATALOG.items()):
            print(f"{name:18s} domain={p.domain} t_end={p.t_end:g} gamma={p.gamma:g} "
                  f"cells={p.n_cells} flux={p.flux}")
        return EXIT_OK
    try:
        cfg = build_config(_settings(args))
        if args.command == "run":
            cfg.solver_config()  # validate before any output is written
            _, summary = run_once(cfg)
            sys.stdout.write(summary.text())
        elif args.command == "convergence":
            cfg.solver_config()
            report = run_convergence(cfg, args.degrees, args.ns, args.metric)
            _emit(report.text(), cfg.out, "convergence.txt")
        else:
            cfg.solver_config()
            report = run_boost_study(cfg, args.boosts)
            _emit(report.text(), cfg.out, "boost.txt")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonPhysicalState, InvertedCell, EmptyMesh, MaxStepsExceeded) as exc:
        where = ""
        if hasattr(exc, "step"):
            where = f" at step {exc.step}, t={exc.time:.6g}"
        print(f"numerical failure{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main_exit():  # console-script entry point
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_exit()
