"""Cell-local space-time predictor over one step.

For ``k = 1`` the predictor is the linear Taylor expansion along the mesh
trajectory.  For ``k = 2, 3`` the solution at ``k+1`` Gauss nodes, which
move with the in-cell mesh velocity, is evolved with a continuous explicit
Runge-Kutta (CERK) scheme; ``du_m/dt = -(A(u_m) - w_m I) du/dx``.  Nodes sit
at fixed reference coordinates, so the spatial derivative at a stage is
``(2 / h(t)) * sum_m c_m phi_m'(xi)`` with ``c`` the modal form of the
current nodal values.

Everything is vectorized over cells.  No neighbour data is used.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction as Fr

import numpy as np

from . import basis
from .euler import pressure
from .mesh import Cell, ref_velocity


class PredictorKind(str, Enum):
    CONSTANT = "constant"
    TAYLOR1 = "taylor1"
    CERK2 = "cerk2"
    CERK3 = "cerk3"


DEFAULT_PREDICTOR = {
    0: PredictorKind.CONSTANT,
    1: PredictorKind.TAYLOR1,
    2: PredictorKind.CERK2,
    3: PredictorKind.CERK3,
}


@dataclass(frozen=True)
class CerkTableau:
    """Stage times, coupling matrix and weight polynomials of a CERK scheme.

    ``weights[s]`` lists the polynomial coefficients of ``b_s(theta)`` in
    increasing powers, starting at ``theta**0``.
    """

    theta: tuple
    coupling: tuple
    weights: tuple

    @property
    def stages(self) -> int:
        return len(self.theta)

    def b(self, theta):
        """Weights ``b_s(theta)``, shape ``(stages,) + theta.shape``."""
        th = np.asarray(theta, dtype=float)
        return np.stack(
            [sum(float(c) * th**p for p, c in enumerate(ws)) for ws in self.weights]
        )


_CERK2 = CerkTableau(
    theta=(Fr(0), Fr(1)),
    coupling=((), (Fr(1),)),
    weights=(
        (Fr(0), Fr(1), Fr(-1, 2)),
        (Fr(0), Fr(0), Fr(1, 2)),
    ),
)

_CERK3 = CerkTableau(
    theta=(Fr(0), Fr(12, 23), Fr(4, 5), Fr(1)),
    coupling=(
        (),
        (Fr(12, 23),),
        (Fr(-68, 375), Fr(368, 375)),
        (Fr(31, 144), Fr(529, 1152), Fr(125, 384)),
    ),
    weights=(
        (Fr(0), Fr(1), Fr(-65, 48), Fr(41, 72)),
        (Fr(0), Fr(0), Fr(529, 384), Fr(-529, 576)),
        (Fr(0), Fr(0), Fr(125, 128), Fr(-125, 192)),
        (Fr(0), Fr(0), Fr(-1), Fr(1)),
    ),
)


def cerk_tableau(kind) -> CerkTableau:
    kind = PredictorKind(kind)
    if kind is PredictorKind.CERK2:
        return _CERK2
    if kind is PredictorKind.CERK3:
        return _CERK3
    raise ValueError(f"{kind.value} has no CERK tableau")


def time_rule(degree: int) -> basis.QuadratureRule:
    """Time quadrature on [-1, 1]: midpoint for k <= 1, two-point Gauss above."""
    return basis.gauss_rule(1 if degree <= 1 else 2)


@dataclass
class PredictorTrace:
    """Predicted states for every cell.

    ``volume`` is ``(N, R, Q, 3)`` at spatial Gauss points and time points;
    ``left`` / ``right`` are ``(N, R, 3)`` at the cell's left (xi=-1) and
    right (xi=+1) faces; ``wq`` is the mesh velocity at the spatial points.
    """

    theta: np.ndarray
    volume: np.ndarray
    left: np.ndarray
    right: np.ndarray
    wq: np.ndarray
    fallback: np.ndarray


def jacobian_apply(u, du, gamma):
    """``A(u) @ du`` for the Euler flux Jacobian, broadcasting over leading axes."""
    g = gamma
    rho = u[..., 0]
    v = u[..., 1] / rho
    H = g * u[..., 2] / rho - 0.5 * (g - 1.0) * v * v
    out = np.empty_like(du)
    out[..., 0] = du[..., 1]
    out[..., 1] = 0.5 * (g - 3.0) * v * v * du[..., 0] + (3.0 - g) * v * du[..., 1] + (g - 1.0) * du[..., 2]
    out[..., 2] = (
        v * (0.5 * (g - 1.0) * v * v - H) * du[..., 0]
        + (H - (g - 1.0) * v * v) * du[..., 1]
        + g * v * du[..., 2]
    )
    return out


def _physical(u, gamma):
    """Per-cell flag: all states in the trailing axes physical."""
    rho = u[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        p = pressure(u, gamma)
    ok = (rho > 0.0) & (p > 0.0) & np.isfinite(p)
    return ok.reshape(ok.shape[0], -1).all(axis=1)


def _constant(coeffs, theta, wq):
    k = coeffs.shape[1] - 1
    xq = basis.gauss_rule(k + 1).points
    vol = basis.evaluate(coeffs, xq)
    faces = basis.evaluate(coeffs, [-1.0, 1.0])
    R = len(theta)
    return (
        np.repeat(vol[:, None], R, axis=1),
        np.repeat(faces[:, None, 0], R, axis=1),
        np.repeat(faces[:, None, 1], R, axis=1),
    )


def _taylor(coeffs, h, wl, wr, dt, theta, gamma):
    k = coeffs.shape[1] - 1
    xq = basis.gauss_rule(k + 1).points
    pts = np.concatenate([xq, [-1.0, 1.0]])
    u0 = basis.evaluate(coeffs, pts)  # (N, P, 3)
    center = basis.evaluate(coeffs, [0.0])[:, 0]  # (N, 3)
    dudx = (2.0 / h)[:, None] * np.einsum(
        "m,nmc->nc", basis.vandermonde_deriv(k, [0.0])[0], coeffs
    )
    adu = jacobian_apply(center, dudx, gamma)  # (N, 3)
    wp = ref_velocity(wl, wr, pts)  # (N, P)
    rate = -(adu[:, None, :] - wp[..., None] * dudx[:, None, :])  # (N, P, 3)
    tau = theta * dt
    vals = u0[:, None] + tau[None, :, None, None] * rate[:, None]  # (N, R, P, 3)
    Q = len(xq)
    return vals[:, :, :Q], vals[:, :, Q], vals[:, :, Q + 1]


def _cerk(coeffs, h, wl, wr, dt, theta, gamma, tab):
    k = coeffs.shape[1] - 1
    nm = basis.nodal_map(k)
    D = basis.vandermonde_deriv(k, nm.nodes)  # (k+1, k+1)
    DV = D @ nm.forward  # nodal values -> d/dxi at nodes
    wm = ref_velocity(wl, wr, nm.nodes)[..., None]  # (N, k+1, 1)
    dh = wr - wl
    U0 = nm.to_nodal(coeffs)  # (N, k+1, 3)
    ok = np.ones(len(h), dtype=bool)

    def rhs(U, t):
        ht = h + t * dh
        dudx = (2.0 / ht)[:, None, None] * np.einsum("ij,njc->nic", DV, U)
        return -(jacobian_apply(U, dudx, gamma) - wm * dudx)

    ks = []
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for s in range(tab.stages):
            U = U0.copy()
            for a, kk in zip(tab.coupling[s], ks):
                U += dt * float(a) * kk
            if s:
                ok &= _physical(U, gamma)
            ks.append(rhs(U, float(tab.theta[s]) * dt))
        b = tab.b(theta)  # (S, R)
        K = np.stack(ks)  # (S, N, k+1, 3)
        nodal = U0[:, None] + dt * np.einsum("sr,snic->nric", b, K)
    # nodes coincide with the spatial quadrature points
    modal = nm.to_modal(nodal)
    faces = basis.evaluate(modal, [-1.0, 1.0])
    return nodal, faces[:, :, 0], faces[:, :, 1], ok


def predict(coeffs, faces, wf, dt, gamma, kind=None, theta=None) -> PredictorTrace:
    """Space-time predictor for all cells.

    Parameters
    ----------
    coeffs : (N, k+1, 3) modal coefficients at ``t_n``
    faces : (N+1,) face positions at ``t_n``
    wf : (N+1,) frozen face velocities
    dt : step size
    kind : PredictorKind, defaults by degree
    theta : time points as fractions of ``dt``; defaults to the time rule
    """
    coeffs = np.asarray(coeffs, dtype=float)
    k = coeffs.shape[1] - 1
    kind = PredictorKind(kind) if kind is not None else DEFAULT_PREDICTOR[k]
    if theta is None:
        theta = 0.5 * (time_rule(k).points + 1.0)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    h = np.diff(faces)
    wl, wr = wf[:-1], wf[1:]
    xq = basis.gauss_rule(k + 1).points
    wq = ref_velocity(wl, wr, xq)

    fallback = np.zeros(len(h), dtype=bool)
    if kind is PredictorKind.CONSTANT or k == 0:
        vol, left, right = _constant(coeffs, theta, wq)
        return PredictorTrace(theta, vol, left, right, wq, fallback)
    if kind is PredictorKind.TAYLOR1:
        with np.errstate(divide="ignore", invalid="ignore"):
            vol, left, right = _taylor(coeffs, h, wl, wr, dt, theta, gamma)
        ok = np.ones(len(h), dtype=bool)
    else:
        if k < 2:
            raise ValueError(f"{kind.value} needs degree >= 2, got {k}")
        vol, left, right, ok = _cerk(coeffs, h, wl, wr, dt, theta, gamma, cerk_tableau(kind))
    ok &= _physical(vol, gamma) & _physical(left, gamma) & _physical(right, gamma)
    if not ok.all():
        # zeroth-order-in-time fallback for offending cells
        fallback = ~ok
        cv, cl, cr = _constant(coeffs[fallback], theta, wq[fallback])
        vol[fallback], left[fallback], right[fallback] = cv, cl, cr
    return PredictorTrace(theta, vol, left, right, wq, fallback)


def _single(cell: Cell):
    return (
        cell.coeffs[None],
        np.array([cell.x_left, cell.x_right]),
        np.array([cell.w_left, cell.w_right]),
    )


def taylor_predict(cell: Cell, gamma, dt, theta=None) -> PredictorTrace:
    c, f, w = _single(cell)
    return predict(c, f, w, dt, gamma, PredictorKind.TAYLOR1, theta)


def cerk_predict(cell: Cell, gamma, dt, theta=None, kind=None) -> PredictorTrace:
    c, f, w = _single(cell)
    k = c.shape[1] - 1
    kind = kind or (PredictorKind.CERK2 if k == 2 else PredictorKind.CERK3)
    return predict(c, f, w, dt, gamma, kind, theta)
