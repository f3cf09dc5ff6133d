"""Cell merging and splitting with conservative L2 solution transfer."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import basis
from .mesh import Cell, Mesh


class Mark(IntEnum):
    NONE = 0
    REFINE = 1
    COARSEN = -1


@dataclass(frozen=True)
class AdaptConfig:
    enabled: bool = False
    h_min: float = 0.0
    h_max: float = float("inf")

    def __post_init__(self):
        if self.enabled and not (0.0 <= self.h_min < self.h_max):
            raise ValueError("adaptation needs 0 <= h_min < h_max")


def _neighbour_arrays(a, periodic, fill):
    if periodic:
        return np.roll(a, 1), np.roll(a, -1)
    left = np.concatenate([[fill], a[:-1]])
    right = np.concatenate([a[1:], [fill]])
    return left, right


def mark(mesh: Mesh, cfg: AdaptConfig) -> np.ndarray:
    """Three marking sweeps; returns an array of :class:`Mark` values."""
    h = mesh.h
    lev = mesh.levels
    per = mesh.periodic
    n = len(h)
    m = np.full(n, Mark.NONE, dtype=int)

    # sweep 1: size bounds and 2:1 level balance
    ll, lr = _neighbour_arrays(lev, per, np.iinfo(int).min)
    m[h > cfg.h_max] = Mark.REFINE
    m[lev < np.maximum(ll, lr) - 1] = Mark.REFINE
    m[h < cfg.h_min] = Mark.COARSEN

    def both_refine(m):
        ml, mr = _neighbour_arrays(m, per, Mark.NONE)
        return (ml == Mark.REFINE) & (mr == Mark.REFINE)

    # sweep 2
    hl, hr = _neighbour_arrays(h, per, np.inf)
    grow = (m == Mark.NONE) & (both_refine(m) | (((h > 2 * hl) | (h > 2 * hr)) & (h > 2 * cfg.h_min)))
    m[grow] = Mark.REFINE

    # sweep 3
    m[(m == Mark.NONE) & both_refine(m)] = Mark.REFINE
    ml, mr = _neighbour_arrays(m, per, Mark.NONE)
    m[(m == Mark.REFINE) & ((ml == Mark.COARSEN) | (mr == Mark.COARSEN))] = Mark.NONE
    return m


def refine(cell: Cell) -> tuple[Cell, Cell]:
    """Split at the midpoint, projecting the parent polynomial onto each half."""
    k = cell.coeffs.shape[0] - 1
    xm = cell.center
    wm = 0.5 * (cell.w_left + cell.w_right)
    halves = []
    for shift in (-1.0, 1.0):
        # child eta in [-1, 1] maps to parent xi = (eta + shift) / 2
        coeffs = basis.l2_project(lambda eta: basis.evaluate(cell.coeffs, 0.5 * (eta + shift)), k)
        halves.append(coeffs)
    left = Cell(cell.x_left, xm, cell.w_left, wm, cell.level + 1, halves[0])
    right = Cell(xm, cell.x_right, wm, cell.w_right, cell.level + 1, halves[1])
    return left, right


def merge(left: Cell, right: Cell) -> Cell:
    """L2 projection of the two-piece polynomial onto the union interval."""
    if abs(left.x_right - right.x_left) > 1e-12 * max(left.h, right.h):
        raise ValueError("cells to merge are not adjacent")
    k = left.coeffs.shape[0] - 1
    H = right.x_right - left.x_left
    rule = basis.gauss_rule(k + 2)
    acc = np.zeros_like(left.coeffs)
    for c in (left, right):
        # eta of each sub-cell quadrature point in the merged reference cell
        eta = (c.x_left - left.x_left + 0.5 * c.h * (rule.points + 1.0)) * 2.0 / H - 1.0
        vals = basis.evaluate(c.coeffs, rule.points)
        V = basis.vandermonde(k, eta)
        acc += (c.h / H) * 0.5 * np.einsum("q,qm,qc->mc", rule.weights, V, vals)
    return Cell(left.x_left, right.x_right, left.w_left, right.w_right,
                min(left.level, right.level) - 1, acc)


def adapt(mesh: Mesh, cfg: AdaptConfig) -> Mesh:
    """Mark, then merge coarsen-marked cells and split refine-marked ones."""
    if not cfg.enabled:
        return mesh
    marks = mark(mesh, cfg)
    if not np.any(marks != Mark.NONE):
        return mesh
    h = mesh.h
    n = mesh.n_cells
    used = np.zeros(n, dtype=bool)
    partner = {}
    for j in np.nonzero(marks == Mark.COARSEN)[0]:
        if used[j]:
            continue
        cands = [i for i in (j - 1, j + 1)
                 if 0 <= i < n and not used[i] and marks[i] != Mark.REFINE]
        if not cands:
            continue
        i = min(cands, key=lambda i: (h[i], i))
        a, b = min(i, j), max(i, j)
        used[a] = used[b] = True
        partner[a] = b
    cells = mesh.cells()
    out = []
    j = 0
    while j < n:
        if j in partner:
            out.append(merge(cells[j], cells[j + 1]))
            j += 2
            continue
        if marks[j] == Mark.REFINE:
            out.extend(refine(cells[j]))
        else:
            out.append(cells[j])
        j += 1
    return Mesh.from_cells(out, mesh.left_bc, mesh.right_bc)
