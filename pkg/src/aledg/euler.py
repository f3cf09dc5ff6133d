"""Ideal-gas Euler state algebra.

Two layers live here.  The array layer works on numpy arrays whose last axis
holds the three conserved components ``(rho, rho*v, E)`` (or the primitive
triple ``(rho, v, p)``) and is what the solver kernels call.  The typed layer
(:class:`ConservedState`, :class:`PrimitiveState`, :class:`EigenSystem`)
wraps single states for callers that prefer named fields.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonPhysicalState(ValueError):
    """Density or pressure is not strictly positive."""


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")


@dataclass(frozen=True)
class ConservedState:
    rho: float
    mom: float
    ener: float

    def to_array(self) -> np.ndarray:
        return np.array([self.rho, self.mom, self.ener], dtype=float)

    @classmethod
    def from_array(cls, a) -> "ConservedState":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    vel: float
    pre: float

    def to_array(self) -> np.ndarray:
        return np.array([self.rho, self.vel, self.pre], dtype=float)

    @classmethod
    def from_array(cls, a) -> "PrimitiveState":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class EigenSystem:
    lambdas: np.ndarray  # (v - c, v, v + c)
    right: np.ndarray  # columns are r1, r2, r3
    left: np.ndarray  # inverse of ``right``


# ---------------------------------------------------------------------------
# array layer
# ---------------------------------------------------------------------------

def pressure(u, gamma):
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        return (gamma - 1.0) * (u[..., 2] - 0.5 * u[..., 1] ** 2 / rho)


def check_physical(u, gamma, where="state"):
    """Raise :class:`NonPhysicalState` unless every state has rho, p > 0."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    p = pressure(u, gamma)
    if not (np.all(rho > 0.0) and np.all(p > 0.0)):
        bad = np.argwhere(~((rho > 0.0) & (p > 0.0)))
        raise NonPhysicalState(
            f"non-physical {where}: min rho={np.nanmin(rho):.6g}, "
            f"min p={np.nanmin(p):.6g} (first bad index {tuple(int(i) for i in bad[0])})"
        )


def cons_to_prim(u, gamma, check=True):
    u = np.asarray(u, dtype=float)
    if check:
        check_physical(u, gamma)
    w = np.empty_like(u)
    w[..., 0] = u[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        w[..., 1] = u[..., 1] / u[..., 0]
    w[..., 2] = pressure(u, gamma)
    return w


def prim_to_cons(w, gamma):
    w = np.asarray(w, dtype=float)
    u = np.empty_like(w)
    rho, v, p = w[..., 0], w[..., 1], w[..., 2]
    u[..., 0] = rho
    u[..., 1] = rho * v
    u[..., 2] = p / (gamma - 1.0) + 0.5 * rho * v * v
    return u


def sound_speed(u, gamma):
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.sqrt(gamma * pressure(u, gamma) / u[..., 0])


def flux(u, gamma):
    """Physical flux ``(rho v, p + rho v^2, (E + p) v)``."""
    u = np.asarray(u, dtype=float)
    rho, m, E = u[..., 0], u[..., 1], u[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        v = m / rho
    p = (gamma - 1.0) * (E - 0.5 * m * v)
    f = np.empty_like(u)
    f[..., 0] = m
    f[..., 1] = p + m * v
    f[..., 2] = (E + p) * v
    return f


def ale_flux_array(u, w, gamma):
    """ALE flux ``f(u) - w u``; ``w`` broadcasts against ``u[..., 0]``."""
    u = np.asarray(u, dtype=float)
    return flux(u, gamma) - np.asarray(w, dtype=float)[..., None] * u


def jacobian(u, gamma):
    """Analytic flux Jacobian dF/dU, shape ``u.shape + (3,)``."""
    u = np.asarray(u, dtype=float)
    g = gamma
    rho, m, E = u[..., 0], u[..., 1], u[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        v = m / rho
        H = g * E / rho - 0.5 * (g - 1.0) * v * v
    A = np.zeros(u.shape + (3,))
    A[..., 0, 1] = 1.0
    A[..., 1, 0] = 0.5 * (g - 3.0) * v * v
    A[..., 1, 1] = (3.0 - g) * v
    A[..., 1, 2] = g - 1.0
    A[..., 2, 0] = v * (0.5 * (g - 1.0) * v * v - H)
    A[..., 2, 1] = H - (g - 1.0) * v * v
    A[..., 2, 2] = g * v
    return A


def eigenvectors(v, c, H, gamma):
    """Right/left eigenvector matrices for arrays of (v, c, H).

    Returns ``R, L`` of shape ``v.shape + (3, 3)`` with ``L = R^{-1}`` in
    closed form.
    """
    v = np.asarray(v, dtype=float)
    c = np.asarray(c, dtype=float)
    H = np.asarray(H, dtype=float)
    gm1 = gamma - 1.0
    R = np.empty(v.shape + (3, 3))
    R[..., 0, :] = 1.0
    R[..., 1, 0] = v - c
    R[..., 1, 1] = v
    R[..., 1, 2] = v + c
    R[..., 2, 0] = H - v * c
    R[..., 2, 1] = 0.5 * v * v
    R[..., 2, 2] = H + v * c

    b1 = gm1 / (c * c)
    b2 = 0.5 * v * v * b1
    L = np.empty_like(R)
    L[..., 0, 0] = 0.5 * (b2 + v / c)
    L[..., 0, 1] = -0.5 * (b1 * v + 1.0 / c)
    L[..., 0, 2] = 0.5 * b1
    L[..., 1, 0] = 1.0 - b2
    L[..., 1, 1] = b1 * v
    L[..., 1, 2] = -b1
    L[..., 2, 0] = 0.5 * (b2 - v / c)
    L[..., 2, 1] = -0.5 * (b1 * v - 1.0 / c)
    L[..., 2, 2] = 0.5 * b1
    return R, L


def eigen_arrays(u, gamma):
    """Eigenvalues and eigenvector matrices evaluated at conserved states."""
    u = np.asarray(u, dtype=float)
    check_physical(u, gamma, "eigensystem state")
    v = u[..., 1] / u[..., 0]
    p = pressure(u, gamma)
    c = np.sqrt(gamma * p / u[..., 0])
    H = (u[..., 2] + p) / u[..., 0]
    R, L = eigenvectors(v, c, H, gamma)
    lam = np.stack([v - c, v, v + c], axis=-1)
    return lam, R, L


# ---------------------------------------------------------------------------
# typed layer
# ---------------------------------------------------------------------------

def to_primitive(u: ConservedState, gas: GasModel) -> PrimitiveState:
    return PrimitiveState.from_array(cons_to_prim(u.to_array(), gas.gamma))


def to_conserved(w: PrimitiveState, gas: GasModel) -> ConservedState:
    if not (w.rho > 0.0 and w.pre > 0.0):
        raise NonPhysicalState(f"invalid primitive state {w}")
    return ConservedState.from_array(prim_to_cons(w.to_array(), gas.gamma))


def physical_flux(u: ConservedState, gas: GasModel) -> np.ndarray:
    a = u.to_array()
    check_physical(a, gas.gamma)
    return flux(a, gas.gamma)


def ale_flux(u: ConservedState, w: float, gas: GasModel) -> np.ndarray:
    return physical_flux(u, gas) - w * u.to_array()


def eigensystem(w: PrimitiveState, gas: GasModel) -> EigenSystem:
    if not (w.rho > 0.0 and w.pre > 0.0):
        raise NonPhysicalState(f"cannot form eigensystem at {w}")
    g = gas.gamma
    c = np.sqrt(g * w.pre / w.rho)
    E = w.pre / (g - 1.0) + 0.5 * w.rho * w.vel**2
    H = (E + w.pre) / w.rho
    R, L = eigenvectors(w.vel, c, H, g)
    return EigenSystem(np.array([w.vel - c, w.vel, w.vel + c]), R, L)
