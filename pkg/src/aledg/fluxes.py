"""Numerical fluxes for the ALE flux ``g(u, w) = f(u) - w u`` at moving faces.

All kernels are vectorized: ``ul`` and ``ur`` have shape ``(..., 3)`` and
``w`` broadcasts against ``ul[..., 0]``.  Each returns ``(flux, speed)``
where ``speed`` is the largest signal-speed estimate in the face frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .euler import (
    ConservedState,
    GasModel,
    NonPhysicalState,
    ale_flux_array,
    check_physical,
    eigenvectors,
    pressure,
)


class RoeAverageFailure(NonPhysicalState):
    pass


class FluxKind(str, Enum):
    RUSANOV = "rusanov"
    ROE = "roe"
    HLLC = "hllc"


@dataclass(frozen=True)
class FluxScheme:
    kind: FluxKind = FluxKind.HLLC
    roe_fix_alpha: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "kind", FluxKind(self.kind))
        if self.roe_fix_alpha < 0:
            raise ValueError("roe_fix_alpha must be non-negative")

    def __call__(self, ul, ur, w, gamma):
        if self.kind is FluxKind.RUSANOV:
            return rusanov_flux(ul, ur, w, gamma)
        if self.kind is FluxKind.ROE:
            return roe_flux(ul, ur, w, gamma, self.roe_fix_alpha)
        return hllc_flux(ul, ur, w, gamma)


@dataclass(frozen=True)
class FaceFluxResult:
    flux: np.ndarray
    max_speed: float


def _vcp(u, gamma):
    v = u[..., 1] / u[..., 0]
    p = pressure(u, gamma)
    c = np.sqrt(gamma * p / u[..., 0])
    return v, c, p


def rusanov_speed(ul, ur, w, gamma):
    """``max(|v_l - w| + c_l, |v_r - w| + c_r)``."""
    vl, cl, _ = _vcp(ul, gamma)
    vr, cr, _ = _vcp(ur, gamma)
    return np.maximum(np.abs(vl - w) + cl, np.abs(vr - w) + cr)


def rusanov_flux(ul, ur, w, gamma, check=True):
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    w = np.asarray(w, dtype=float)
    if check:
        check_physical(ul, gamma, "left face state")
        check_physical(ur, gamma, "right face state")
    lam = rusanov_speed(ul, ur, w, gamma)
    g = 0.5 * (ale_flux_array(ul, w, gamma) + ale_flux_array(ur, w, gamma))
    g -= 0.5 * lam[..., None] * (ur - ul)
    return g, lam


def roe_average(ul, ur, gamma):
    """Roe-averaged ``(v, c, H)`` from the parameter vector sqrt(rho)(1, v, H)."""
    sl = np.sqrt(ul[..., 0])
    sr = np.sqrt(ur[..., 0])
    pl = pressure(ul, gamma)
    pr = pressure(ur, gamma)
    Hl = (ul[..., 2] + pl) / ul[..., 0]
    Hr = (ur[..., 2] + pr) / ur[..., 0]
    z1 = 0.5 * (sl + sr)
    z2 = 0.5 * (ul[..., 1] / sl + ur[..., 1] / sr)
    z3 = 0.5 * (sl * Hl + sr * Hr)
    v = z2 / z1
    H = z3 / z1
    c2 = (gamma - 1.0) * (H - 0.5 * v * v)
    if np.any(c2 <= 0.0):
        raise RoeAverageFailure("Roe-averaged sound speed squared is not positive")
    return v, np.sqrt(c2), H


def contact_eigenvalue_fix(a, delta):
    """Smoothed ``|lambda_2|``: ``a`` if ``a > delta`` else ``(delta + a^2/delta)/2``."""
    a = np.asarray(a, dtype=float)
    delta = np.asarray(delta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        fixed = 0.5 * (delta + a * a / delta)
    return np.where(a > delta, a, fixed)


def roe_matrix(ul, ur, w, gamma):
    """``A_w = R (Lambda - w I) R^{-1}`` at the Roe state (used by tests)."""
    v, c, H = roe_average(np.asarray(ul, float), np.asarray(ur, float), gamma)
    R, L = eigenvectors(v, c, H, gamma)
    lam = np.stack([v - c, v, v + c], axis=-1) - np.asarray(w)[..., None]
    return np.einsum("...ij,...j,...jk->...ik", R, lam, L)


def roe_flux(ul, ur, w, gamma, alpha=0.1, check=True):
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    w = np.asarray(w, dtype=float)
    if check:
        check_physical(ul, gamma, "left face state")
        check_physical(ur, gamma, "right face state")
    v, c, H = roe_average(ul, ur, gamma)
    R, L = eigenvectors(v, c, H, gamma)
    strengths = np.einsum("...ij,...j->...i", L, ur - ul)
    a1 = np.abs(v - c - w)
    a2 = np.abs(v - w)
    a3 = np.abs(v + c - w)
    if alpha > 0.0:
        a2 = contact_eigenvalue_fix(a2, alpha * c)
    absl = np.stack([a1, a2, a3], axis=-1)
    diss = np.einsum("...ij,...j->...i", R, absl * strengths)
    g = 0.5 * (ale_flux_array(ul, w, gamma) + ale_flux_array(ur, w, gamma) - diss)
    return g, np.abs(v - w) + c


def hllc_flux(ul, ur, w, gamma, check=True):
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    w = np.asarray(w, dtype=float)
    if check:
        check_physical(ul, gamma, "left face state")
        check_physical(ur, gamma, "right face state")
    rl, rr = ul[..., 0], ur[..., 0]
    vl, cl, pl = _vcp(ul, gamma)
    vr, cr, pr = _vcp(ur, gamma)
    ql = vl - w
    qr = vr - w
    vh, ch, _ = roe_average(ul, ur, gamma)
    sl = np.minimum(ql - cl, vh - w - ch)
    sr = np.maximum(qr + cr, vh - w + ch)
    with np.errstate(divide="ignore", invalid="ignore"):
        sm = (rr * qr * (sr - qr) - rl * ql * (sl - ql) + pl - pr) / (
            rr * (sr - qr) - rl * (sl - ql)
        )
        pstar = rl * (ql - sl) * (ql - sm) + pl

        def star_flux(u, rho, q, p, s):
            fac = 1.0 / (s - sm)
            us = np.empty_like(u)
            us[..., 0] = fac * (s - q) * rho
            us[..., 1] = fac * ((s - q) * u[..., 1] + pstar - p)
            us[..., 2] = fac * ((s - q) * u[..., 2] - p * q + pstar * sm)
            g = sm[..., None] * us
            g[..., 1] += pstar
            g[..., 2] += (sm + w) * pstar
            return g

        gl = ale_flux_array(ul, w, gamma)
        gr = ale_flux_array(ur, w, gamma)
        gls = star_flux(ul, rl, ql, pl, sl)
        grs = star_flux(ur, rr, qr, pr, sr)
    degenerate = np.abs(sr - sl) < 1e-14
    g = np.where(
        (sl > 0.0)[..., None] | degenerate[..., None],
        gl,
        np.where(
            ((sl <= 0.0) & (0.0 < sm))[..., None],
            gls,
            np.where(((sm <= 0.0) & (0.0 <= sr))[..., None], grs, gr),
        ),
    )
    return g, np.maximum(np.abs(sl), np.abs(sr))


def hllc_star_pressures(ul, ur, w, gamma):
    """Left and right expressions for ``p*`` (equal given the contact speed)."""
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    rl, rr = ul[..., 0], ur[..., 0]
    vl, cl, pl = _vcp(ul, gamma)
    vr, cr, pr = _vcp(ur, gamma)
    ql, qr = vl - w, vr - w
    vh, ch, _ = roe_average(ul, ur, gamma)
    sl = np.minimum(ql - cl, vh - w - ch)
    sr = np.maximum(qr + cr, vh - w + ch)
    sm = (rr * qr * (sr - qr) - rl * ql * (sl - ql) + pl - pr) / (
        rr * (sr - qr) - rl * (sl - ql)
    )
    return rl * (ql - sl) * (ql - sm) + pl, rr * (qr - sr) * (qr - sm) + pr


# typed single-face wrappers


def _wrap(fn, ul: ConservedState, ur: ConservedState, w, gas: GasModel, *args):
    g, s = fn(ul.to_array(), ur.to_array(), w, gas.gamma, *args)
    return FaceFluxResult(np.asarray(g), float(s))


def rusanov(ul: ConservedState, ur: ConservedState, w: float, gas: GasModel) -> FaceFluxResult:
    return _wrap(rusanov_flux, ul, ur, w, gas)


def roe(ul: ConservedState, ur: ConservedState, w: float, gas: GasModel,
        alpha: float = 0.1) -> FaceFluxResult:
    return _wrap(roe_flux, ul, ur, w, gas, alpha)


def hllc(ul: ConservedState, ur: ConservedState, w: float, gas: GasModel) -> FaceFluxResult:
    return _wrap(hllc_flux, ul, ur, w, gas)
