"""Explicit single-step discontinuous Galerkin scheme on moving meshes for the
one-dimensional Euler equations."""

from .euler import GasModel, NonPhysicalState, cons_to_prim, prim_to_cons
from .mesh import BoundaryKind, InvertedCell, Mesh, VelocityKind
from .problems import CATALOG, ProblemSpec, catalog, error_norms, project_initial
from .riemann import exact_riemann
from .scheme import MaxStepsExceeded, RunResult, SolverConfig, run

__all__ = [
    "BoundaryKind",
    "CATALOG",
    "GasModel",
    "InvertedCell",
    "MaxStepsExceeded",
    "Mesh",
    "NonPhysicalState",
    "ProblemSpec",
    "RunResult",
    "SolverConfig",
    "VelocityKind",
    "catalog",
    "cons_to_prim",
    "error_norms",
    "exact_riemann",
    "prim_to_cons",
    "project_initial",
    "run",
]

__version__ = "0.1.0"
