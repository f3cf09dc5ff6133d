"""Single-step ALE-DG update and the time-marching loop."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import basis
from .adaptivity import AdaptConfig, adapt
from .euler import NonPhysicalState, ale_flux_array, check_physical, pressure
from .fluxes import FluxScheme, rusanov_speed
from .limiters import LimiterConfig, LimiterMode, positivity_limit, tvd_limit
from .mesh import (
    EmptyMesh,
    InvertedCell,
    Mesh,
    TimeStepParams,
    VelocityKind,
    VelocityPolicy,
    compute_dt,
    face_traces,
    face_velocities,
    manage_edges,
    pad_faces,
    validate,
)
from .predictor import PredictorKind, PredictorTrace, predict, time_rule


class MaxStepsExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class StepContext:
    degree: int
    flux: FluxScheme
    gamma: float

    @property
    def space_rule(self):
        return basis.gauss_rule(self.degree + 1)

    @property
    def time_rule(self):
        return time_rule(self.degree)


def step(mesh: Mesh, trace: PredictorTrace, ctx: StepContext, dt: float) -> Mesh:
    """Advance coefficients and geometry by ``dt`` using predicted states."""
    k = ctx.degree
    xq = ctx.space_rule
    wt = ctx.time_rule.normalized_weights
    g = ctx.gamma
    wf = mesh.face_velocities

    # volume term; the h/2 metric and the 2/h derivative factor cancel
    gv = ale_flux_array(trace.volume, trace.wq[:, None, :], g)  # (N, R, Q, 3)
    D = basis.vandermonde_deriv(k, xq.points)  # (Q, k+1)
    vol = np.einsum("r,q,nrqc,ql->nlc", wt, xq.weights, gv, D)

    ul, ur = pad_faces(mesh, trace.left, trace.right)  # (N+1, R, 3)
    check_physical(ul, g, "left face trace")
    check_physical(ur, g, "right face trace")
    ghat, _ = ctx.flux(ul, ur, wf[:, None], g)
    G = np.einsum("r,frc->fc", wt, ghat)  # (N+1, 3)

    ls = np.arange(k + 1)
    phi_right = np.sqrt(2 * ls + 1.0)
    phi_left = phi_right * (-1.0) ** ls
    rhs = vol + G[:-1, None, :] * phi_left[None, :, None] - G[1:, None, :] * phi_right[None, :, None]

    h0 = mesh.h
    out = mesh.copy()
    out.faces = mesh.faces + dt * wf
    validate(out)
    h1 = out.h
    out.coeffs = (h0[:, None, None] * mesh.coeffs + dt * rhs) / h1[:, None, None]
    return out


_DEFAULT_CFL = {0: 0.9, 1: 0.9, 2: 0.8, 3: 0.7}


def default_cfl(degree: int) -> float:
    """Largest round value below the measured linear stability limit.

    ``0.9 / (2k + 1)`` is linearly unstable for the predictor-corrector
    scheme at ``k = 2`` and ``k = 3``.
    """
    return _DEFAULT_CFL[degree]


@dataclass
class SolverConfig:
    degree: int = 1
    flux: str = "hllc"
    roe_alpha: float = 0.1
    mesh: str = "ale-avg"
    smoothing: bool = True
    perturb: float = 0.0
    seed: int = 12345
    cfl: Optional[float] = None
    beta: float = 0.15
    limiter: str = "tvd"
    tvb_m: float = 0.0
    positivity: bool = False
    pos_eps: float = 1e-13
    adapt: bool = False
    h_min: float = 0.0
    h_max: float = float("inf")
    cells: int = 100
    predictor: Optional[str] = None
    manage_edges: bool = False
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not 0 <= self.degree <= 3:
            raise ValueError(f"degree must be 0..3, got {self.degree}")
        if self.cfl is None:
            self.cfl = default_cfl(self.degree)
        if self.cells < 1:
            raise ValueError("need at least one cell")
        # validate enums early
        self.flux_scheme
        self.velocity_policy
        self.limiter_config
        self.step_params

    @classmethod
    def for_problem(cls, problem, **overrides) -> "SolverConfig":
        """Problem defaults (flux, limiter, adaptivity, cells), then overrides."""
        kw = dict(
            flux=problem.flux,
            roe_alpha=problem.roe_alpha,
            limiter=problem.limiter,
            positivity=problem.positivity,
            adapt=problem.adaptive,
            h_min=problem.adapt_h_min,
            h_max=problem.adapt_h_max,
            cells=problem.n_cells,
            manage_edges=problem.manage_edges,
            smoothing=problem.smoothing,
        )
        kw.update(overrides)
        return cls(**kw)

    @property
    def flux_scheme(self) -> FluxScheme:
        return FluxScheme(self.flux, self.roe_alpha)

    @property
    def velocity_policy(self) -> VelocityPolicy:
        return VelocityPolicy(VelocityKind(self.mesh), self.smoothing, self.perturb)

    @property
    def limiter_config(self) -> LimiterConfig:
        return LimiterConfig(LimiterMode(self.limiter), self.tvb_m, self.positivity, self.pos_eps)

    @property
    def adapt_config(self) -> AdaptConfig:
        return AdaptConfig(self.adapt, self.h_min, self.h_max)

    @property
    def step_params(self) -> TimeStepParams:
        return TimeStepParams(self.cfl, self.beta)


@dataclass
class RunResult:
    mesh: Mesh
    t: float
    steps: int
    dts: list = field(default_factory=list)
    min_rho: float = np.inf
    min_p: float = np.inf
    fallback_cells: int = 0
    adapt_drift: float = 0.0
    initial_totals: np.ndarray = None
    wall_time: float = 0.0

    initial_content: np.ndarray = None

    @property
    def totals_drift(self) -> float:
        """Change of the integrated conserved variables over the run,
        relative to the initial absolute content (meaningful for closed
        domains only)."""
        return _drift(self.initial_totals, self.mesh.totals(), self.initial_content)


def _drift(before, after, scale) -> float:
    # a component with no initial content (e.g. momentum at rest) is
    # measured against the largest one
    scale = np.asarray(scale, dtype=float)
    scale = np.where(scale > 1e-12 * scale.max(), scale, scale.max())
    return float(np.max(np.abs(after - before) / np.maximum(scale, 1e-300)))


def _limit(mesh: Mesh, gamma, lim: LimiterConfig) -> Mesh:
    if lim.mode is not LimiterMode.OFF:
        mesh = tvd_limit(mesh, gamma, lim)
    if lim.positivity:
        mesh = positivity_limit(mesh, gamma, lim)
    return mesh


def _advance(mesh, t, t_end, config, ctx, policy, params, acfg, lim, rng, kind, domain, h0, res):
    """One time step: algorithm steps 1 to 7 plus edge maintenance."""
    g = ctx.gamma
    mesh = mesh.copy()
    mesh.face_velocities = face_velocities(mesh, policy, g, rng)
    ul, ur = face_traces(mesh)
    check_physical(ul, g, "face trace")
    check_physical(ur, g, "face trace")
    speeds = rusanov_speed(ul, ur, mesh.face_velocities, g)
    dt = compute_dt(mesh, params, config.degree, speeds)
    if t + dt >= t_end or (t_end - t - dt) < 1e-12 * t_end:
        dt = t_end - t
    trace = predict(mesh.coeffs, mesh.faces, mesh.face_velocities, dt, g, kind)
    res.fallback_cells += int(trace.fallback.sum())
    mesh = step(mesh, trace, ctx, dt)
    mesh = _limit(mesh, g, lim)
    if config.manage_edges:
        mesh = manage_edges(mesh, domain, (h0, h0))
    if acfg.enabled:
        before = mesh.totals()
        scale = mesh.content()
        adapted = adapt(mesh, acfg)
        if adapted is not mesh:
            res.adapt_drift = max(res.adapt_drift, _drift(before, adapted.totals(), scale))
            # L2 transfer can leave negative pressure at check points
            if lim.positivity:
                adapted = positivity_limit(adapted, g, lim)
        mesh = adapted
    return mesh, dt


def run(problem, config: SolverConfig, mesh: Optional[Mesh] = None,
        callback: Optional[Callable] = None, t_end: Optional[float] = None) -> RunResult:
    """March ``problem`` to its final time.

    Per step: face velocities, time step, predictor, update, TVD/TVB limiter,
    positivity limiter, edge maintenance, adaptation.  ``callback(t, mesh,
    step)`` is invoked after every completed step.
    """
    from .problems import project_initial

    start = time.perf_counter()
    g = problem.gamma
    t_end = problem.t_end if t_end is None else t_end
    if mesh is None:
        mesh = project_initial(problem, config.cells, config.degree)
    lim = config.limiter_config
    mesh = _limit(mesh, g, lim)
    ctx = StepContext(config.degree, config.flux_scheme, g)
    policy = config.velocity_policy
    params = config.step_params
    acfg = config.adapt_config
    rng = np.random.default_rng(config.seed)
    kind = PredictorKind(config.predictor) if config.predictor else None
    a, b = problem.domain
    h0 = (b - a) / config.cells

    res = RunResult(mesh, 0.0, 0, initial_totals=mesh.totals(), initial_content=mesh.content())
    t = 0.0
    nstep = 0
    while t < t_end:
        if nstep >= config.max_steps:
            raise MaxStepsExceeded(f"max_steps={config.max_steps} reached at t={t:.6g}")
        try:
            mesh, dt = _advance(mesh, t, t_end, config, ctx, policy, params, acfg, lim, rng,
                                kind, (a, b), h0, res)
        except (NonPhysicalState, InvertedCell, EmptyMesh) as exc:
            # keep the typed error, tagged with where it happened
            exc.step = nstep + 1
            exc.time = t
            raise
        nstep += 1
        t = t_end if dt == t_end - t else t + dt
        res.dts.append(dt)
        ubar = mesh.averages
        res.min_rho = min(res.min_rho, float(ubar[:, 0].min()))
        res.min_p = min(res.min_p, float(pressure(ubar, g).min()))
        if callback is not None:
            callback(t, mesh, nstep)
    res.mesh = mesh
    res.t = t
    res.steps = nstep
    res.wall_time = time.perf_counter() - start
    return res
