"""Moving 1-D mesh: geometry, face-velocity policies and the time-step bound."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import basis
from .euler import GasModel, PrimitiveState, pressure


class InvertedCell(RuntimeError):
    """A cell length became non-positive after moving the faces."""


class EmptyMesh(ValueError):
    pass


class BoundaryKind(str, Enum):
    TRANSMISSIVE = "transmissive"
    REFLECTIVE = "reflective"
    PERIODIC = "periodic"


class VelocityKind(str, Enum):
    STATIC = "static"
    AVERAGE = "ale-avg"  # ADG
    RIEMANN = "ale-riemann"  # RDG


@dataclass(frozen=True)
class VelocityPolicy:
    kind: VelocityKind = VelocityKind.AVERAGE
    smoothing: bool = True
    perturb: float = 0.0  # w <- (1 + perturb * r) w, r ~ U[-1, 1]

    def __post_init__(self):
        object.__setattr__(self, "kind", VelocityKind(self.kind))


@dataclass(frozen=True)
class TimeStepParams:
    cfl: float = 0.9
    beta: float = 0.15

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must be in (0, 1], got {self.cfl}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")


@dataclass
class Cell:
    x_left: float
    x_right: float
    w_left: float
    w_right: float
    level: int
    coeffs: np.ndarray

    @property
    def h(self) -> float:
        return self.x_right - self.x_left

    @property
    def center(self) -> float:
        return 0.5 * (self.x_left + self.x_right)


@dataclass
class Mesh:
    """Cells stored as arrays.

    ``faces`` has ``N + 1`` increasing positions, ``coeffs`` is
    ``(N, k+1, 3)`` modal coefficients of the conserved variables and
    ``face_velocities`` holds one velocity per face.
    """

    faces: np.ndarray
    coeffs: np.ndarray
    levels: np.ndarray = None
    face_velocities: np.ndarray = None
    left_bc: BoundaryKind = BoundaryKind.TRANSMISSIVE
    right_bc: BoundaryKind = BoundaryKind.TRANSMISSIVE

    def __post_init__(self):
        self.faces = np.asarray(self.faces, dtype=float)
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        n = len(self.faces) - 1
        if n < 1 or self.coeffs.shape[0] != n:
            raise EmptyMesh(f"mesh needs >= 1 cell with matching coeffs (faces={len(self.faces)})")
        if self.levels is None:
            self.levels = np.zeros(n, dtype=int)
        if self.face_velocities is None:
            self.face_velocities = np.zeros(n + 1)
        self.left_bc = BoundaryKind(self.left_bc)
        self.right_bc = BoundaryKind(self.right_bc)
        if (self.left_bc is BoundaryKind.PERIODIC) != (self.right_bc is BoundaryKind.PERIODIC):
            raise ValueError("periodic boundaries must be set on both sides")

    @property
    def n_cells(self) -> int:
        return len(self.faces) - 1

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.faces)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.faces[1:] + self.faces[:-1])

    @property
    def periodic(self) -> bool:
        return self.left_bc is BoundaryKind.PERIODIC

    @property
    def averages(self) -> np.ndarray:
        return self.coeffs[:, 0, :]

    def copy(self) -> "Mesh":
        return replace(
            self,
            faces=self.faces.copy(),
            coeffs=self.coeffs.copy(),
            levels=self.levels.copy(),
            face_velocities=self.face_velocities.copy(),
        )

    def totals(self) -> np.ndarray:
        """Integrated mass, momentum and energy."""
        return (self.h[:, None] * self.averages).sum(axis=0)

    def content(self) -> np.ndarray:
        """Integrated absolute value of each conserved variable's average."""
        return (self.h[:, None] * np.abs(self.averages)).sum(axis=0)

    def cell(self, j: int) -> Cell:
        return Cell(
            float(self.faces[j]),
            float(self.faces[j + 1]),
            float(self.face_velocities[j]),
            float(self.face_velocities[j + 1]),
            int(self.levels[j]),
            self.coeffs[j].copy(),
        )

    def cells(self) -> list[Cell]:
        return [self.cell(j) for j in range(self.n_cells)]

    @classmethod
    def from_cells(cls, cells, left_bc=BoundaryKind.TRANSMISSIVE,
                   right_bc=BoundaryKind.TRANSMISSIVE) -> "Mesh":
        if not cells:
            raise EmptyMesh("no cells")
        faces = [cells[0].x_left] + [c.x_right for c in cells]
        wf = [cells[0].w_left] + [c.w_right for c in cells]
        return cls(
            np.array(faces),
            np.stack([c.coeffs for c in cells]),
            np.array([c.level for c in cells], dtype=int),
            np.array(wf),
            left_bc,
            right_bc,
        )


def validate(mesh: Mesh, rtol=1e-12):
    h = mesh.h
    if np.any(h <= 0.0):
        j = int(np.argmin(h))
        raise InvertedCell(f"cell {j} has length {h[j]:.3e}")


# ---------------------------------------------------------------------------
# traces and ghosts
# ---------------------------------------------------------------------------

def ghost(u, kind: BoundaryKind):
    """Boundary ghost state for the trace ``u`` next to a wall/outflow."""
    if kind is BoundaryKind.REFLECTIVE:
        g = np.array(u, dtype=float, copy=True)
        g[..., 1] = -g[..., 1]
        return g
    return np.array(u, dtype=float, copy=True)


def _ghost_source(mesh: Mesh, traces, j, kind):
    # transmissive ghosts use the boundary cell average; copying the
    # high-order trace feeds round-off back in at inflow for k = 3
    if kind is BoundaryKind.TRANSMISSIVE:
        avg = mesh.coeffs[j, 0]
        return np.broadcast_to(avg, (1,) + traces.shape[1:]).copy()
    return ghost(traces[j:j + 1] if j >= 0 else traces[j:], kind)


def pad_faces(mesh: Mesh, right_of_face, left_of_face):
    """Assemble left/right states at all ``N + 1`` faces.

    ``right_of_face`` is ``(N, ...)`` with each cell's value at its left
    face; ``left_of_face`` each cell's value at its right face.
    """
    if mesh.periodic:
        ul = np.concatenate([left_of_face[-1:], left_of_face], axis=0)
        ur = np.concatenate([right_of_face, right_of_face[:1]], axis=0)
    else:
        ul = np.concatenate([_ghost_source(mesh, right_of_face, 0, mesh.left_bc), left_of_face], axis=0)
        ur = np.concatenate([right_of_face, _ghost_source(mesh, left_of_face, -1, mesh.right_bc)], axis=0)
    return ul, ur


def face_traces(mesh: Mesh):
    """DG solution on both sides of every face at the current time."""
    vals = basis.evaluate(mesh.coeffs, [-1.0, 1.0])  # (N, 2, 3)
    return pad_faces(mesh, vals[:, 0], vals[:, 1])


# ---------------------------------------------------------------------------
# velocities
# ---------------------------------------------------------------------------

def raw_velocities(ul, ur, kind: VelocityKind, gamma):
    """Face velocities from conserved traces, before smoothing."""
    kind = VelocityKind(kind)
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    if kind is VelocityKind.STATIC:
        return np.zeros(ul.shape[:-1])
    vl = ul[..., 1] / ul[..., 0]
    vr = ur[..., 1] / ur[..., 0]
    if kind is VelocityKind.AVERAGE:
        return 0.5 * (vl + vr)
    return linearized_riemann_velocity(
        ul[..., 0], vl, pressure(ul, gamma), ur[..., 0], vr, pressure(ur, gamma), gamma
    )


def linearized_riemann_velocity(rl, vl, pl, rr, vr, pr, gamma):
    from .euler import NonPhysicalState

    if np.any(np.asarray(pl) / rl <= 0) or np.any(np.asarray(pr) / rr <= 0):
        raise NonPhysicalState("sound speed not computable for face velocity")
    zl = rl * np.sqrt(gamma * pl / rl)
    zr = rr * np.sqrt(gamma * pr / rr)
    return (zl * vl + zr * vr) / (zl + zr) + (pl - pr) / (zl + zr)


def raw_face_velocity(left: PrimitiveState, right: PrimitiveState,
                      policy: VelocityPolicy, gas: GasModel) -> float:
    policy = policy if isinstance(policy, VelocityPolicy) else VelocityPolicy(policy)
    if policy.kind is VelocityKind.STATIC:
        return 0.0
    if policy.kind is VelocityKind.AVERAGE:
        return 0.5 * (left.vel + right.vel)
    return float(linearized_riemann_velocity(
        left.rho, left.vel, left.pre, right.rho, right.vel, right.pre, gas.gamma))


def smooth_velocities(raw, periodic=False):
    """Three-face running average; boundary faces keep their raw value.

    For a periodic mesh the first and last entries are the same face and the
    stencil wraps.
    """
    raw = np.asarray(raw, dtype=float)
    if periodic:
        core = raw[:-1]
        sm = (np.roll(core, 1) + core + np.roll(core, -1)) / 3.0
        return np.append(sm, sm[0])
    out = raw.copy()
    if len(raw) > 2:
        out[1:-1] = (raw[:-2] + raw[1:-1] + raw[2:]) / 3.0
    return out


def face_velocities(mesh: Mesh, policy: VelocityPolicy, gamma, rng=None):
    """Frozen per-face velocities for the coming step."""
    if policy.kind is VelocityKind.STATIC:
        return np.zeros(mesh.n_cells + 1)
    ul, ur = face_traces(mesh)
    w = raw_velocities(ul, ur, policy.kind, gamma)
    if mesh.periodic:
        w[-1] = w[0]
    if mesh.left_bc is BoundaryKind.REFLECTIVE:
        w[0] = 0.0
    if mesh.right_bc is BoundaryKind.REFLECTIVE:
        w[-1] = 0.0
    if policy.smoothing:
        w = smooth_velocities(w, mesh.periodic)
    if policy.perturb > 0.0:
        if rng is None:
            raise ValueError("random perturbation requested without a generator")
        r = rng.uniform(-1.0, 1.0, size=w.shape)
        if mesh.periodic:
            r[-1] = r[0]
        w = (1.0 + policy.perturb * r) * w
    # walls stay put regardless of smoothing
    if mesh.left_bc is BoundaryKind.REFLECTIVE:
        w[0] = 0.0
    if mesh.right_bc is BoundaryKind.REFLECTIVE:
        w[-1] = 0.0
    return w


def in_cell_velocity(cell: Cell, x, t=0.0):
    """Linear interpolation of the face velocities at ``x``, time ``t`` into the step."""
    xl = cell.x_left + t * cell.w_left
    xr = cell.x_right + t * cell.w_right
    x = np.asarray(x, dtype=float)
    tol = 1e-12 * (xr - xl)
    if np.any(x < xl - tol) or np.any(x > xr + tol):
        raise ValueError(f"x={x} outside cell [{xl}, {xr}] at t={t}")
    h = xr - xl
    out = (xr - x) / h * cell.w_left + (x - xl) / h * cell.w_right
    return float(out) if out.ndim == 0 else out


def ref_velocity(wl, wr, xi):
    """In-cell velocity at fixed reference points; constant over a step."""
    xi = np.asarray(xi, dtype=float)
    return 0.5 * (1.0 - xi) * np.asarray(wl)[..., None] + 0.5 * (1.0 + xi) * np.asarray(wr)[..., None]


# ---------------------------------------------------------------------------
# time step and motion
# ---------------------------------------------------------------------------

def compute_dt(mesh: Mesh, params: TimeStepParams, degree: int, speeds, w=None) -> float:
    """Time step from the positivity/size-change bound scaled by cfl/(2k+1).

    ``speeds`` holds one Rusanov speed per face.
    """
    if mesh.n_cells < 1:
        raise EmptyMesh("cannot compute a time step on an empty mesh")
    w = mesh.face_velocities if w is None else w
    h = mesh.h
    lam = np.asarray(speeds, dtype=float)
    beta = params.beta
    bound = (1.0 - 0.5 * beta) * h / (0.5 * (lam[:-1] + lam[1:]))
    dw = np.abs(w[1:] - w[:-1])
    with np.errstate(divide="ignore"):
        size = np.where(dw > 0.0, beta * h / dw, np.inf)
    return params.cfl / (2 * degree + 1) * float(min(bound.min(), size.min()))


def advance_faces(mesh: Mesh, dt: float) -> Mesh:
    out = mesh.copy()
    out.faces = mesh.faces + dt * mesh.face_velocities
    validate(out)
    return out


def manage_edges(mesh: Mesh, domain, spacing) -> Mesh:
    """Keep a transmissive domain covered as the edge faces move.

    A cell with the edge cell's average state is added when a boundary face
    has moved inward by at least ``spacing`` (left, right); cells lying
    wholly outside ``domain`` are dropped.
    """
    a, b = domain
    hl, hr = spacing
    m = mesh
    changed = False
    faces, coeffs, levels, wf = m.faces, m.coeffs, m.levels, m.face_velocities
    if m.left_bc is BoundaryKind.TRANSMISSIVE:
        keep = faces[1:] > a
        if not keep[0] and keep.sum() >= 2:
            first = int(np.argmax(keep))
            faces, coeffs = faces[first:], coeffs[first:]
            levels, wf = levels[first:], wf[first:]
            changed = True
        if faces[0] - a >= hl:
            new = np.zeros_like(coeffs[:1])
            new[0, 0] = coeffs[0, 0]
            faces = np.concatenate([[a], faces])
            coeffs = np.concatenate([new, coeffs])
            levels = np.concatenate([[0], levels])
            wf = np.concatenate([[wf[0]], wf])
            changed = True
    if m.right_bc is BoundaryKind.TRANSMISSIVE:
        keep = faces[:-1] < b
        if not keep[-1] and keep.sum() >= 2:
            last = len(keep) - int(np.argmax(keep[::-1]))
            faces, coeffs = faces[: last + 1], coeffs[:last]
            levels, wf = levels[:last], wf[: last + 1]
            changed = True
        if b - faces[-1] >= hr:
            new = np.zeros_like(coeffs[:1])
            new[0, 0] = coeffs[-1, 0]
            faces = np.concatenate([faces, [b]])
            coeffs = np.concatenate([coeffs, new])
            levels = np.concatenate([levels, [0]])
            wf = np.concatenate([wf, [wf[-1]]])
            changed = True
    if not changed:
        return mesh
    return Mesh(faces, coeffs, levels, wf, m.left_bc, m.right_bc)
