"""Post-step limiters: characteristic TVD/TVB slope limiter on non-uniform
meshes and a positivity-preserving scaling limiter."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import basis
from .euler import NonPhysicalState, eigen_arrays, pressure
from .mesh import BoundaryKind, Mesh, ghost

SQRT3 = np.sqrt(3.0)


class AverageNotPhysical(NonPhysicalState):
    """A cell average already violates positivity; no limiter can fix it."""


class LimiterMode(str, Enum):
    OFF = "off"
    TVD = "tvd"
    TVB = "tvb"


@dataclass(frozen=True)
class LimiterConfig:
    mode: LimiterMode = LimiterMode.TVD
    tvb_m: float = 0.0
    positivity: bool = False
    pos_eps: float = 1e-13

    def __post_init__(self):
        object.__setattr__(self, "mode", LimiterMode(self.mode))
        if self.tvb_m < 0:
            raise ValueError("TVB constant must be non-negative")
        if not 0.0 < self.pos_eps < 1e-3:
            raise ValueError("positivity floor must be small and positive")


def minmod(a, b, c):
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    s = np.sign(a)
    same = (s == np.sign(b)) & (s == np.sign(c))
    m = np.minimum(np.minimum(np.abs(a), np.abs(b)), np.abs(c))
    out = np.where(same, s * m, 0.0)
    return float(out) if out.ndim == 0 else out


def minmod_b(a, b, c, M, h):
    """TVB minmod: ``a`` untouched when ``|a| <= M h^2``."""
    a = np.asarray(a, dtype=float)
    h = np.asarray(h, dtype=float)
    out = np.where(np.abs(a) <= M * h * h, a, minmod(a, b, c))
    return float(out) if out.ndim == 0 else out


def _neighbours(mesh: Mesh):
    """Cell averages and lengths padded with one ghost on each side."""
    ubar = mesh.averages
    h = mesh.h
    if mesh.periodic:
        ug = np.concatenate([ubar[-1:], ubar, ubar[:1]])
        hg = np.concatenate([h[-1:], h, h[:1]])
    else:
        ug = np.concatenate([ghost(ubar[:1], mesh.left_bc), ubar, ghost(ubar[-1:], mesh.right_bc)])
        hg = np.concatenate([h[:1], h, h[-1:]])
    return ug, hg


def tvd_limit(mesh: Mesh, gamma, cfg: LimiterConfig) -> Mesh:
    """Limit slopes in characteristic variables; returns a new mesh."""
    if cfg.mode is LimiterMode.OFF or mesh.degree < 1:
        return mesh
    out = mesh.copy()
    ug, hg = _neighbours(mesh)
    ubar = ug[1:-1]
    h = hg[1:-1]
    _, R, L = eigen_arrays(ubar, gamma)
    s = SQRT3 * mesh.coeffs[:, 1, :]
    Lmul = lambda x: np.einsum("nij,nj->ni", L, x)  # noqa: E731
    s_star = Lmul(s)
    dm = Lmul(ubar - ug[:-2]) / (0.5 * (hg[:-2] + h))[:, None]
    dp = Lmul(ug[2:] - ubar) / (0.5 * (h + hg[2:]))[:, None]
    a = s_star / h[:, None]
    if cfg.mode is LimiterMode.TVB:
        lim = minmod_b(a, dm, dp, cfg.tvb_m, h[:, None])
    else:
        lim = minmod(a, dm, dp)
    s_lim = h[:, None] * lim
    scale = np.maximum(np.abs(s_star), np.abs(s_lim))
    changed = np.any(np.abs(s_lim - s_star) > 1e-14 * scale + 1e-300, axis=1)
    if np.any(changed):
        new_slope = np.einsum("nij,nj->ni", R[changed], s_lim[changed]) / SQRT3
        out.coeffs[changed, 1, :] = new_slope
        out.coeffs[changed, 2:, :] = 0.0
    return out


def check_points(degree: int) -> np.ndarray:
    return np.concatenate([[-1.0], basis.gauss_rule(degree + 1).points, [1.0]])


def positivity_limit(mesh: Mesh, gamma, cfg: LimiterConfig) -> Mesh:
    """Scale each cell polynomial toward its average so rho, p >= eps.

    Density is scaled first, then all components jointly for pressure using
    bisection for the per-point scaling factor.  Targets sit a few roundoff
    units above ``eps`` so re-evaluating the limited polynomial stays >= eps.
    """
    eps = cfg.pos_eps
    ubar = mesh.averages
    pbar = pressure(ubar, gamma)
    if not (np.all(ubar[:, 0] > eps) and np.all(pbar > eps)):
        j = int(np.argmin(np.minimum(ubar[:, 0], pbar)))
        raise AverageNotPhysical(
            f"cell {j} average not physical: rho={ubar[j, 0]:.3e}, p={pbar[j]:.3e}"
        )
    if mesh.degree < 1:
        return mesh
    out = mesh.copy()
    c = out.coeffs
    V = basis.vandermonde(mesh.degree, check_points(mesh.degree))

    vals = np.einsum("qm,nmc->nqc", V, c)
    ulp = 64 * np.finfo(float).eps
    rmin = vals[:, :, 0].min(axis=1)
    rtarget = eps + ulp * ubar[:, 0]
    bad = rmin < rtarget
    if np.any(bad):
        theta1 = np.ones(len(rmin))
        theta1[bad] = (ubar[bad, 0] - rtarget[bad]) / (ubar[bad, 0] - rmin[bad])
        theta1 = np.clip(theta1, 0.0, 1.0)
        c[:, 1:, 0] *= theta1[:, None]
        vals = np.einsum("qm,nmc->nqc", V, c)

    pq = pressure(vals, gamma)
    ptarget = eps + ulp * np.abs(vals[:, :, 2]).max(axis=1)
    badp = pq < ptarget[:, None]
    if np.any(badp):
        cells = np.nonzero(badp.any(axis=1))[0]
        ub = ubar[cells][:, None, :]
        uq = vals[cells]
        lo = np.zeros(uq.shape[:2])
        hi = np.ones(uq.shape[:2])
        need = badp[cells]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            ok = pressure(ub + mid[..., None] * (uq - ub), gamma) >= ptarget[cells, None]
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        t = np.where(need, lo, 1.0).min(axis=1)
        c[cells, 1:, :] *= t[:, None, None]
    return out
