"""Catalog of one-dimensional test problems, exact solutions and error norms."""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import basis
from .euler import prim_to_cons
from .mesh import BoundaryKind, Mesh
from .riemann import exact_riemann

T = BoundaryKind.TRANSMISSIVE


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    domain: tuple
    gamma: float
    t_end: float
    initial: Callable  # x -> (n, 3) primitive
    boundary: tuple = (T, T)
    n_cells: int = 100
    breakpoints: tuple = ()
    flux: str = "hllc"
    roe_alpha: float = 0.0
    limiter: str = "tvd"
    positivity: bool = False
    adapt_h_min: float = 0.0
    adapt_h_max: float = float("inf")
    manage_edges: bool = False
    smoothing: bool = True
    boost: float = 0.0
    riemann: Optional[tuple] = None  # (left, right, x0)
    exact: Optional[Callable] = None  # (x, t) -> (n, 3) primitive

    def __post_init__(self):
        a, b = self.domain
        if not b > a:
            raise ValueError("domain must have b > a")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")

    @property
    def adaptive(self) -> bool:
        return self.adapt_h_min > 0.0 or np.isfinite(self.adapt_h_max)

    @property
    def has_oracle(self) -> bool:
        return self.exact is not None or self.riemann is not None

    def primitive(self, x):
        w = np.asarray(self.initial(np.asarray(x, dtype=float)), dtype=float)
        if self.boost:
            w = w.copy()
            w[..., 1] += self.boost
        return w

    def with_boost(self, V: float) -> "ProblemSpec":
        return replace(self, boost=float(V))

    def exact_solution(self, t=None):
        """Callable ``x -> primitive`` at time ``t`` (default final time)."""
        t = self.t_end if t is None else t
        V = self.boost
        if self.riemann is not None:
            left, right, x0 = self.riemann
            sol = exact_riemann(left, right, self.gamma)

            def f(x):
                w = sol.sample((np.asarray(x, dtype=float) - V * t - x0) / t)
                w[..., 1] += V
                return w

            return f
        if self.exact is not None:
            def f(x):
                w = np.asarray(self.exact(np.asarray(x, dtype=float) - V * t, t), dtype=float)
                w = w.copy()
                w[..., 1] += V
                return w

            return f
        raise ValueError(f"problem {self.name!r} has no closed-form solution")


def _piecewise(x, x0, left, right):
    x = np.asarray(x, dtype=float)
    return np.where((x < x0)[..., None], np.asarray(left, float), np.asarray(right, float))


def _gaussian_ic(x):
    return np.stack([1.0 + np.exp(-10.0 * x * x), np.ones_like(x), np.ones_like(x)], axis=-1)


def _gaussian_exact(x, t):
    return _gaussian_ic(np.asarray(x) - t)


def _isentropic_ic(x):
    rho = 1.0 + 0.9999995 * np.sin(np.pi * x)
    return np.stack([rho, np.zeros_like(x), rho**3], axis=-1)


def isentropic_exact(x, t, period=2.0):
    """Characteristic solution via the two Burgers invariants ``v +/- c``.

    Valid before wave breaking (``t < 1 / (sqrt(3) pi)``).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s3 = np.sqrt(3.0)

    def w0(y, sign):
        return sign * s3 * (1.0 + 0.9999995 * np.sin(np.pi * y))

    def dw0(y, sign):
        return sign * s3 * 0.9999995 * np.pi * np.cos(np.pi * y)

    inv = []
    for sign in (1.0, -1.0):
        y = x - w0(x, sign) * t
        for _ in range(100):
            F = y + w0(y, sign) * t - x
            y_new = y - F / (1.0 + dw0(y, sign) * t)
            if np.max(np.abs(y_new - y)) < 1e-15:
                y = y_new
                break
            y = y_new
        inv.append(w0(y, sign))
    wp, wm = inv
    v = 0.5 * (wp + wm)
    rho = 0.5 * (wp - wm) / s3
    return np.stack([rho, v, rho**3], axis=-1)


def _shu_osher_ic(x):
    x = np.asarray(x, dtype=float)
    left = np.broadcast_to([3.857143, 2.629369, 10.333333], x.shape + (3,))
    right = np.stack([1.0 + 0.2 * np.sin(5.0 * x), np.zeros_like(x), np.ones_like(x)], axis=-1)
    return np.where((x < -4.0)[..., None], left, right)


def _titarev_toro_ic(x):
    x = np.asarray(x, dtype=float)
    left = np.broadcast_to([1.515695, 0.523346, 1.805], x.shape + (3,))
    right = np.stack(
        [1.0 + 0.1 * np.sin(20.0 * np.pi * x), np.zeros_like(x), np.ones_like(x)], axis=-1
    )
    return np.where((x <= -4.5)[..., None], left, right)


def _blast_ic(x):
    x = np.asarray(x, dtype=float)
    p = np.where(x < 0.1, 1000.0, np.where(x < 0.9, 0.01, 100.0))
    return np.stack([np.ones_like(x), np.zeros_like(x), p], axis=-1)


def _riemann_problem(name, left, right, x0, domain, t_end, gamma=1.4, **kw):
    return ProblemSpec(
        name=name,
        domain=domain,
        gamma=gamma,
        t_end=t_end,
        initial=lambda x: _piecewise(x, x0, left, right),
        breakpoints=(x0,),
        riemann=(left, right, x0),
        **kw,
    )


def _build_catalog():
    R = BoundaryKind.REFLECTIVE
    P = BoundaryKind.PERIODIC
    cat = {
        "gaussian_advect": ProblemSpec(
            "gaussian_advect", (-10.0, 10.0), 1.4, 1.0, _gaussian_ic,
            flux="hllc", limiter="off", exact=_gaussian_exact,
        ),
        "isentropic_gamma3": ProblemSpec(
            "isentropic_gamma3", (-1.0, 1.0), 3.0, 0.1, _isentropic_ic,
            boundary=(P, P), flux="roe", limiter="off", positivity=True,
            exact=isentropic_exact,
        ),
        "single_contact": _riemann_problem(
            "single_contact", (2.0, 1.0, 1.0), (1.0, 1.0, 1.0), 0.5, (0.0, 1.0), 0.5,
            flux="roe",
        ),
        "sod": _riemann_problem(
            "sod", (1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 0.5, (0.0, 1.0), 0.2, flux="roe",
        ),
        "lax": _riemann_problem(
            "lax", (0.445, 0.698, 3.528), (0.5, 0.0, 0.571), 0.0, (-10.0, 10.0), 1.3,
            flux="hllc", manage_edges=True,
        ),
        "shu_osher": ProblemSpec(
            "shu_osher", (-5.0, 5.0), 1.4, 1.8, _shu_osher_ic, n_cells=200,
            breakpoints=(-4.0,), flux="roe", roe_alpha=0.1, manage_edges=True,
        ),
        "titarev_toro": ProblemSpec(
            "titarev_toro", (-5.0, 5.0), 1.4, 5.0, _titarev_toro_ic, n_cells=1000,
            breakpoints=(-4.5,), flux="hllc", manage_edges=True,
        ),
        "p123": _riemann_problem(
            "p123", (1.0, -2.0, 0.4), (1.0, 2.0, 0.4), 0.5, (0.0, 1.0), 0.15,
            flux="hllc", positivity=True, adapt_h_max=0.05,
        ),
        "blast": ProblemSpec(
            "blast", (0.0, 1.0), 1.4, 0.038, _blast_ic, boundary=(R, R), n_cells=400,
            breakpoints=(0.1, 0.9), flux="hllc", positivity=True, adapt_h_min=0.001,
            smoothing=False,
        ),
        "leblanc": _riemann_problem(
            "leblanc", (1.0, 0.0, 0.1), (0.001, 0.0, 1e-7), 3.0, (0.0, 9.0), 6.0,
            gamma=5.0 / 3.0, n_cells=1400, flux="rusanov", positivity=True,
        ),
    }
    return cat


CATALOG = _build_catalog()


def catalog(name: str) -> ProblemSpec:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(sorted(CATALOG))}") from None


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def project_initial(problem: ProblemSpec, n_cells: int, degree: int, npts: int = 8) -> Mesh:
    """Uniform mesh with the L2 projection of the initial condition.

    Cells containing a breakpoint are integrated piecewise so discontinuous
    data are projected exactly.
    """
    a, b = problem.domain
    faces = np.linspace(a, b, n_cells + 1)
    rule = basis.gauss_rule(npts) if npts <= 5 else _leg(npts)
    coeffs = np.zeros((n_cells, degree + 1, 3))
    xi_breaks = []
    h = np.diff(faces)
    centers = 0.5 * (faces[1:] + faces[:-1])
    # default: whole-cell quadrature
    xs = centers[:, None] + 0.5 * h[:, None] * rule.points[None, :]
    u = prim_to_cons(problem.primitive(xs), problem.gamma)  # (N, Q, 3)
    V = basis.vandermonde(degree, rule.points)
    coeffs[:] = 0.5 * np.einsum("q,qm,nqc->nmc", rule.weights, V, u)
    for xb in problem.breakpoints:
        j = np.searchsorted(faces, xb) - 1
        if j < 0 or j >= n_cells:
            continue
        xi_b = (xb - centers[j]) / (0.5 * h[j])
        if abs(abs(xi_b) - 1.0) < 1e-12:
            continue
        xi_breaks.append((j, xi_b))
    for j, xi_b in xi_breaks:
        acc = np.zeros((degree + 1, 3))
        for lo, hi in ((-1.0, xi_b), (xi_b, 1.0)):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            xi = mid + half * rule.points
            # nudge inside the sub-interval to pick the correct side
            xphys = centers[j] + 0.5 * h[j] * xi
            uu = prim_to_cons(problem.primitive(xphys), problem.gamma)
            acc += 0.5 * half * np.einsum("q,qm,qc->mc", rule.weights, basis.vandermonde(degree, xi), uu)
        coeffs[j] = acc
    return Mesh(faces, coeffs, left_bc=problem.boundary[0], right_bc=problem.boundary[1])


def _leg(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return basis.QuadratureRule(x, w)


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

_COMPONENT = {"rho": 0, "density": 0, "v": 1, "velocity": 1, "p": 2, "pressure": 2}


@dataclass(frozen=True)
class ErrorNorms:
    l1: float
    l2: float
    linf: float
    l1_poly: float
    l2_poly: float


def exact_cell_averages(exact, faces, npts=8):
    """Cell averages of a primitive-valued function (primitive averages)."""
    if hasattr(exact, "cell_averages"):
        return exact.cell_averages(faces)
    rule = _leg(npts)
    faces = np.asarray(faces, dtype=float)
    c = 0.5 * (faces[1:] + faces[:-1])
    h = np.diff(faces)
    xs = c[:, None] + 0.5 * h[:, None] * rule.points[None, :]
    vals = np.asarray(exact(xs.ravel())).reshape(xs.shape + (3,))
    return 0.5 * np.einsum("q,nqc->nc", rule.weights, vals)


def numerical_primitive_averages(mesh: Mesh, gamma):
    """Density, velocity and pressure derived from the conserved averages."""
    from .euler import cons_to_prim

    return cons_to_prim(mesh.averages, gamma, check=False)


def error_norms(mesh: Mesh, exact, component="rho", gamma=1.4) -> ErrorNorms:
    """Errors of one primitive component.

    ``l1``, ``l2`` and ``linf`` compare cell averages (density averages are
    exact for the conserved mass; velocity and pressure use the primitive
    state of the averaged conserved vector).  ``l1_poly`` and ``l2_poly``
    compare the polynomial solution pointwise with ``k + 2`` Gauss points
    per cell.
    """
    from .euler import cons_to_prim

    ci = _COMPONENT[component]
    h = mesh.h
    num = numerical_primitive_averages(mesh, gamma)[:, ci]
    ex = exact_cell_averages(exact, mesh.faces)[:, ci]
    e = num - ex
    l1 = float(np.sum(h * np.abs(e)))
    l2 = float(np.sqrt(np.sum(h * e * e)))
    linf = float(np.max(np.abs(e))) if len(e) else 0.0

    rule = basis.gauss_rule(min(mesh.degree + 2, 5))
    xs = mesh.centers[:, None] + 0.5 * h[:, None] * rule.points[None, :]
    uq = basis.evaluate(mesh.coeffs, rule.points)
    wq = cons_to_prim(uq, gamma, check=False)[..., ci]
    exq = np.asarray(exact(xs.ravel())).reshape(xs.shape + (3,))[..., ci]
    wts = 0.5 * h[:, None] * rule.weights[None, :]
    d = wq - exq
    return ErrorNorms(l1, l2, linf, float(np.sum(wts * np.abs(d))), float(np.sqrt(np.sum(wts * d * d))))


# ---------------------------------------------------------------------------
# reference solutions
# ---------------------------------------------------------------------------

@dataclass
class ReferenceField:
    """Piecewise-constant reference solution sampled on cells."""

    faces: np.ndarray
    prim: np.ndarray  # (n, 3) rho, v, p

    @property
    def centers(self):
        return 0.5 * (self.faces[1:] + self.faces[:-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.clip(np.searchsorted(self.faces, x) - 1, 0, len(self.prim) - 1)
        return self.prim[j]

    def cell_averages(self, faces):
        faces = np.asarray(faces, dtype=float)
        h = np.diff(self.faces)
        cum = np.concatenate([np.zeros((1, 3)), np.cumsum(h[:, None] * self.prim, axis=0)])

        def integral(x):
            x = np.clip(x, self.faces[0], self.faces[-1])
            j = np.clip(np.searchsorted(self.faces, x) - 1, 0, len(self.prim) - 1)
            return cum[j] + (x - self.faces[j])[:, None] * self.prim[j]

        I = integral(faces)
        return (I[1:] - I[:-1]) / np.diff(faces)[:, None]


def write_reference(path, problem_name, resolution, x, prim):
    """Atomically write ``# problem`` / ``# resolution`` header and rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(f"# problem {problem_name}\n# resolution {resolution}\n")
        np.savetxt(fh, np.column_stack([x, prim]), fmt="%.17g")
    os.replace(tmp, path)


def read_reference(path):
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, val = line[1:].strip().partition(" ")
            meta[key] = val
    rows = np.loadtxt(path, comments="#", ndmin=2)
    return meta, rows


def reference_solution(problem: ProblemSpec, resolution: int, cache_dir=None, **run_kw) -> ReferenceField:
    """High-resolution self-run (k=1, static mesh, Rusanov), cached on disk.

    ``resolution`` is the number of reference cells.  The cache file stores
    cell centers and primitive averages; lengths are rebuilt from the
    uniform static mesh.
    """
    from .scheme import SolverConfig, run

    a, b = problem.domain
    path = None
    if cache_dir is not None:
        tag = f"{problem.name}_n{resolution}"
        if problem.boost:
            tag += f"_V{problem.boost:g}"
        path = Path(cache_dir) / f"{tag}.ref"
        if path.exists():
            meta, rows = read_reference(path)
            if meta.get("problem") == problem.name and int(meta.get("resolution", -1)) == resolution:
                return ReferenceField(np.linspace(a, b, resolution + 1), rows[:, 1:4])
    cfg = SolverConfig(
        degree=1, flux="rusanov", mesh="static", cells=resolution,
        limiter=problem.limiter, positivity=problem.positivity, adapt=False,
        manage_edges=False, **run_kw,
    )
    result = run(problem, cfg)
    m = result.mesh
    prim = numerical_primitive_averages(m, problem.gamma)
    if path is not None:
        write_reference(path, problem.name, resolution, m.centers, prim)
    return ReferenceField(m.faces.copy(), prim)
