"""Exact Riemann solver for the ideal-gas Euler equations.

Used only as an error oracle for the shock-tube problems.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .euler import NonPhysicalState


class VacuumGenerated(ValueError):
    pass


def _wave(p, rho, pk, ck, gamma):
    """Pressure function f_K and its derivative for one side."""
    if p > pk:
        A = 2.0 / ((gamma + 1.0) * rho)
        B = (gamma - 1.0) / (gamma + 1.0) * pk
        sq = np.sqrt(A / (p + B))
        f = (p - pk) * sq
        df = sq * (1.0 - 0.5 * (p - pk) / (B + p))
    else:
        ex = (gamma - 1.0) / (2.0 * gamma)
        f = 2.0 * ck / (gamma - 1.0) * ((p / pk) ** ex - 1.0)
        df = (p / pk) ** (-(gamma + 1.0) / (2.0 * gamma)) / (rho * ck)
    return f, df


@dataclass(frozen=True)
class RiemannSolution:
    left: tuple
    right: tuple
    gamma: float
    p_star: float
    v_star: float
    rho_star_left: float
    rho_star_right: float
    left_wave: str  # "shock" or "rarefaction"
    right_wave: str

    def sample(self, xi) -> np.ndarray:
        """Primitive ``(rho, v, p)`` at similarity coordinates ``xi = x/t``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty(xi.shape + (3,))
        for i, s in np.ndenumerate(xi):
            out[i] = self._sample_one(s)
        return out

    def _sample_one(self, s):
        g = self.gamma
        rl, vl, pl = self.left
        rr, vr, pr = self.right
        ps, us = self.p_star, self.v_star
        if s <= us:
            cl = np.sqrt(g * pl / rl)
            if self.left_wave == "shock":
                sl = vl - cl * np.sqrt((g + 1) / (2 * g) * ps / pl + (g - 1) / (2 * g))
                return (rl, vl, pl) if s <= sl else (self.rho_star_left, us, ps)
            head = vl - cl
            cs = cl * (ps / pl) ** ((g - 1) / (2 * g))
            tail = us - cs
            if s <= head:
                return rl, vl, pl
            if s >= tail:
                return self.rho_star_left, us, ps
            fac = 2.0 / (g + 1) + (g - 1) / ((g + 1) * cl) * (vl - s)
            return (
                rl * fac ** (2 / (g - 1)),
                2.0 / (g + 1) * (cl + 0.5 * (g - 1) * vl + s),
                pl * fac ** (2 * g / (g - 1)),
            )
        cr = np.sqrt(g * pr / rr)
        if self.right_wave == "shock":
            sr = vr + cr * np.sqrt((g + 1) / (2 * g) * ps / pr + (g - 1) / (2 * g))
            return (rr, vr, pr) if s >= sr else (self.rho_star_right, us, ps)
        head = vr + cr
        cs = cr * (ps / pr) ** ((g - 1) / (2 * g))
        tail = us + cs
        if s >= head:
            return rr, vr, pr
        if s <= tail:
            return self.rho_star_right, us, ps
        fac = 2.0 / (g + 1) - (g - 1) / ((g + 1) * cr) * (vr - s)
        return (
            rr * fac ** (2 / (g - 1)),
            2.0 / (g + 1) * (-cr + 0.5 * (g - 1) * vr + s),
            pr * fac ** (2 * g / (g - 1)),
        )

    def shock_speeds(self):
        """Speeds of the shocks present, keyed by side."""
        g = self.gamma
        out = {}
        rl, vl, pl = self.left
        rr, vr, pr = self.right
        if self.left_wave == "shock":
            cl = np.sqrt(g * pl / rl)
            out["left"] = vl - cl * np.sqrt((g + 1) / (2 * g) * self.p_star / pl + (g - 1) / (2 * g))
        if self.right_wave == "shock":
            cr = np.sqrt(g * pr / rr)
            out["right"] = vr + cr * np.sqrt((g + 1) / (2 * g) * self.p_star / pr + (g - 1) / (2 * g))
        return out


def exact_riemann(left, right, gamma, tol=1e-14, max_iter=200) -> RiemannSolution:
    """Solve the Riemann problem for primitive states ``(rho, v, p)``."""
    rl, vl, pl = map(float, left)
    rr, vr, pr = map(float, right)
    if min(rl, pl, rr, pr) <= 0.0:
        raise NonPhysicalState("Riemann states must have positive density and pressure")
    g = gamma
    cl = np.sqrt(g * pl / rl)
    cr = np.sqrt(g * pr / rr)
    if 2.0 * (cl + cr) / (g - 1.0) <= vr - vl:
        raise VacuumGenerated("initial data generate vacuum")

    def fn(p):
        f1, d1 = _wave(p, rl, pl, cl, g)
        f2, d2 = _wave(p, rr, pr, cr, g)
        return f1 + f2 + vr - vl, d1 + d2

    # bracket: fn is increasing in p
    lo, hi = 0.0, max(pl, pr)
    while fn(hi)[0] < 0.0:
        hi *= 2.0
    # two-rarefaction guess is exact for those waves and good otherwise
    ex = (g - 1.0) / (2.0 * g)
    p = ((cl + cr - 0.5 * (g - 1.0) * (vr - vl)) / (cl / pl**ex + cr / pr**ex)) ** (1.0 / ex)
    p = min(max(p, 1e-300), hi)
    for _ in range(max_iter):
        f, d = fn(p)
        if f < 0.0:
            lo = p
        else:
            hi = p
        step = f / d
        pn = p - step
        if not (lo < pn < hi):
            pn = 0.5 * (lo + hi)
        if abs(pn - p) <= tol * 0.5 * (pn + p):
            p = pn
            break
        p = pn
    f1, _ = _wave(p, rl, pl, cl, g)
    f2, _ = _wave(p, rr, pr, cr, g)
    u = 0.5 * (vl + vr) + 0.5 * (f2 - f1)

    def star_rho(rk, pk):
        if p > pk:
            r = p / pk
            gr = (g - 1.0) / (g + 1.0)
            return rk * (r + gr) / (gr * r + 1.0)
        return rk * (p / pk) ** (1.0 / g)

    return RiemannSolution(
        (rl, vl, pl), (rr, vr, pr), g, p, u,
        star_rho(rl, pl), star_rho(rr, pr),
        "shock" if p > pl else "rarefaction",
        "shock" if p > pr else "rarefaction",
    )
