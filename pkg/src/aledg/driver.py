"""Experiment drivers: single runs with snapshots, convergence studies and
the frame-boost study.  The command-line tool is a thin layer over these."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .euler import cons_to_prim
from .problems import ProblemSpec, catalog, error_norms
from .scheme import RunResult, SolverConfig, run

SOLVER_FIELDS = tuple(f.name for f in dataclasses.fields(SolverConfig))


class ConfigError(ValueError):
    """Invalid run configuration (unknown key, bad value, bad problem)."""


@dataclass
class RunConfig:
    """Everything needed to reproduce one run.

    ``solver`` holds only the solver settings that were given explicitly;
    the rest come from the problem's defaults.
    """

    problem: str = "sod"
    boost: float = 0.0
    out: Optional[str] = None
    snapshot_every: int = 0  # 0 -> initial and final only
    modal: bool = False
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.solver) - set(SOLVER_FIELDS)
        if unknown:
            raise ConfigError(f"unknown solver option(s): {', '.join(sorted(unknown))}")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be >= 0")

    def problem_spec(self) -> ProblemSpec:
        try:
            p = catalog(self.problem)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        return p.with_boost(self.boost) if self.boost else p

    def solver_config(self, **extra) -> SolverConfig:
        kw = dict(self.solver)
        kw.update(extra)
        try:
            cfg = SolverConfig.for_problem(self.problem_spec(), **kw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
        if cfg.cells < 4:
            raise ConfigError("at least 4 cells are required")
        return cfg


# ---------------------------------------------------------------------------
# snapshots
# ---------------------------------------------------------------------------

def snapshot_text(mesh, t, gamma, modal=False) -> str:
    """Header ``# t=... cells=... gamma=...`` then ``x_center h rho v p`` rows."""
    prim = cons_to_prim(mesh.averages, gamma, check=False)
    cols = [mesh.centers, mesh.h, prim[:, 0], prim[:, 1], prim[:, 2]]
    if modal:
        cols += [mesh.coeffs[:, m, c] for m in range(mesh.degree + 1) for c in range(3)]
    lines = [f"# t={t!r} cells={mesh.n_cells} gamma={gamma!r}"]
    data = np.column_stack(cols)
    lines += [" ".join(f"{v:.17g}" for v in row) for row in data]
    return "\n".join(lines) + "\n"


def read_snapshot(path):
    """Parse a snapshot into ``(meta, rows)``."""
    with open(path) as fh:
        head = fh.readline()
    meta = dict(tok.split("=", 1) for tok in head.lstrip("#").split())
    meta = {"t": float(meta["t"]), "cells": int(meta["cells"]), "gamma": float(meta["gamma"])}
    return meta, np.loadtxt(path, comments="#", ndmin=2)


@dataclass
class RunSummary:
    problem: str
    steps: int
    cells: int
    t: float
    wall_time: float
    min_rho: float
    min_p: float
    totals_drift: float
    adapt_drift: float
    fallback_cells: int
    l1_rho: Optional[float] = None

    def text(self) -> str:
        rows = [f"{k} = {v}" for k, v in dataclasses.asdict(self).items() if v is not None]
        return "\n".join(rows) + "\n"


def run_once(cfg: RunConfig) -> tuple[RunResult, RunSummary]:
    """Run one simulation; write snapshots and ``summary.txt`` when ``out`` is set."""
    problem = cfg.problem_spec()
    solver = cfg.solver_config()
    out = Path(cfg.out) if cfg.out else None
    snaps = []

    def cb(t, mesh, n):
        if cfg.snapshot_every and n % cfg.snapshot_every == 0:
            snaps.append((n, t, snapshot_text(mesh, t, problem.gamma, cfg.modal)))

    result = run(problem, solver, callback=cb)
    l1 = None
    if problem.has_oracle:
        l1 = error_norms(result.mesh, problem.exact_solution(result.t), "rho", problem.gamma).l1
    summary = RunSummary(
        problem.name, result.steps, result.mesh.n_cells, result.t, result.wall_time,
        result.min_rho, result.min_p, result.totals_drift, result.adapt_drift,
        result.fallback_cells, l1,
    )
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        for n, _t, text in snaps:
            (out / f"snap_{n:07d}.dat").write_text(text)
        (out / "final.dat").write_text(snapshot_text(result.mesh, result.t, problem.gamma, cfg.modal))
        (out / "summary.txt").write_text(summary.text())
    return result, summary


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceRow:
    degree: int
    cells: int
    error: float
    rate: Optional[float]
    steps: int


@dataclass
class ConvergenceReport:
    """L2 density errors per degree and resolution with observed rates."""

    problem: str
    metric: str
    rows: list = field(default_factory=list)

    def for_degree(self, k) -> list:
        return [r for r in self.rows if r.degree == k]

    def rates(self, k) -> list:
        return [r.rate for r in self.for_degree(k) if r.rate is not None]

    def text(self) -> str:
        out = [f"# problem={self.problem} metric={self.metric}", "# k N error rate steps"]
        for r in self.rows:
            rate = "-" if r.rate is None else f"{r.rate:.3f}"
            out.append(f"{r.degree} {r.cells} {r.error:.4e} {rate} {r.steps}")
        return "\n".join(out) + "\n"


def observed_rates(errors: Sequence[float]) -> list:
    """``log2(e_{i-1} / e_i)`` for successive doublings; one fewer than errors."""
    e = np.asarray(errors, dtype=float)
    return list(np.log2(e[:-1] / e[1:]))


def run_convergence(cfg: RunConfig, degrees=(1, 2, 3), cells=(100, 200, 400, 800),
                    metric="poly") -> ConvergenceReport:
    """N-sweep for each degree on a problem with an exact solution.

    ``metric`` is ``"poly"`` (L2 of the polynomial solution) or ``"average"``
    (L2 of cell averages).
    """
    if metric not in ("poly", "average"):
        raise ConfigError(f"metric must be 'poly' or 'average', got {metric!r}")
    problem = cfg.problem_spec()
    if not problem.has_oracle:
        raise ConfigError(f"problem {problem.name!r} has no exact solution")
    cells = sorted(int(n) for n in cells)
    report = ConvergenceReport(problem.name, metric)
    for k in degrees:
        errs = []
        for n in cells:
            solver = cfg.solver_config(degree=int(k), cells=n)
            res = run(problem, solver)
            norms = error_norms(res.mesh, problem.exact_solution(res.t), "rho", problem.gamma)
            err = norms.l2_poly if metric == "poly" else norms.l2
            rate = None if not errs else float(np.log2(errs[-1] / err))
            errs.append(err)
            report.rows.append(ConvergenceRow(int(k), n, err, rate, res.steps))
    return report


# ---------------------------------------------------------------------------
# frame boost
# ---------------------------------------------------------------------------

@dataclass
class BoostRow:
    boost: float
    static_steps: int
    moving_steps: int
    moving_deviation: float  # L1 density deviation from the V = 0 moving run
    face_deviation: float  # max |x_V - V t - x_0| over faces


@dataclass
class BoostReport:
    problem: str
    rows: list = field(default_factory=list)

    def text(self) -> str:
        out = [f"# problem={self.problem}", "# V static_steps moving_steps l1_deviation face_deviation"]
        for r in self.rows:
            out.append(f"{r.boost:g} {r.static_steps} {r.moving_steps} "
                       f"{r.moving_deviation:.3e} {r.face_deviation:.3e}")
        return "\n".join(out) + "\n"


def _moving_deviation(ref: RunResult, res: RunResult, shift: float):
    if ref.mesh.n_cells != res.mesh.n_cells:
        return float("inf"), float("inf")
    faces = res.mesh.faces - shift
    dev = float(np.sum(ref.mesh.h * np.abs(res.mesh.averages[:, 0] - ref.mesh.averages[:, 0])))
    return dev, float(np.max(np.abs(faces - ref.mesh.faces)))


def run_boost_study(cfg: RunConfig, boosts=(0.0, 10.0, 100.0), moving="ale-avg") -> BoostReport:
    """Static and moving runs for each frame velocity ``V``.

    Edge maintenance is switched off so the moving mesh translates as a
    whole and profiles can be compared cell by cell.
    """
    base = dataclasses.replace(cfg, boost=0.0)
    report = BoostReport(base.problem)
    ref = None
    for V in boosts:
        c = dataclasses.replace(base, boost=float(V))
        problem = c.problem_spec()
        st = run(problem, c.solver_config(mesh="static", manage_edges=False))
        mv = run(problem, c.solver_config(mesh=moving, manage_edges=False))
        if ref is None:
            ref = (float(V), mv)
        dev, fdev = _moving_deviation(ref[1], mv, (float(V) - ref[0]) * mv.t)
        report.rows.append(BoostRow(float(V), st.steps, mv.steps, dev, fdev))
    return report

