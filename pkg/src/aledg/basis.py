"""Scaled Legendre modal basis, Gauss rules and nodal/modal maps on [-1, 1].

The basis is ``phi_m(xi) = sqrt(2m+1) P_m(xi)`` so that
``int_{-1}^{1} phi_l phi_m dxi = 2 delta_lm``.  With this normalization the
zeroth coefficient of a cell polynomial is its cell average.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_DEGREE = 3

_S3, _S5, _S7 = np.sqrt(3.0), np.sqrt(5.0), np.sqrt(7.0)


def _p(m, x):
    if m == 0:
        return np.ones_like(x)
    if m == 1:
        return _S3 * x
    if m == 2:
        return _S5 * 0.5 * (3.0 * x * x - 1.0)
    return _S7 * 0.5 * (5.0 * x**3 - 3.0 * x)


def _dp(m, x):
    if m == 0:
        return np.zeros_like(x)
    if m == 1:
        return np.full_like(x, _S3)
    if m == 2:
        return _S5 * 3.0 * x
    return _S7 * 0.5 * (15.0 * x * x - 3.0)


def _check_index(m):
    if not (isinstance(m, (int, np.integer)) and 0 <= m <= MAX_DEGREE):
        raise ValueError(f"basis index must be in 0..{MAX_DEGREE}, got {m!r}")


def eval_basis(m, xi):
    """Value of the ``m``-th scaled Legendre polynomial at ``xi``."""
    _check_index(m)
    x = np.asarray(xi, dtype=float)
    out = _p(m, x)
    return float(out) if out.ndim == 0 else out


def eval_basis_deriv(m, xi):
    """d/dxi of the ``m``-th basis function (no 2/h chain-rule factor)."""
    _check_index(m)
    x = np.asarray(xi, dtype=float)
    out = _dp(m, x)
    return float(out) if out.ndim == 0 else out


def vandermonde(degree, xi):
    """Matrix ``V[i, m] = phi_m(xi_i)`` for ``m = 0..degree``."""
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    return np.stack([_p(m, x) for m in range(degree + 1)], axis=-1)


def vandermonde_deriv(degree, xi):
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    return np.stack([_dp(m, x) for m in range(degree + 1)], axis=-1)


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.weights / self.weights.sum()


_GAUSS = {
    1: ([0.0], [2.0]),
    2: ([-1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0)], [1.0, 1.0]),
    3: (
        [-np.sqrt(0.6), 0.0, np.sqrt(0.6)],
        [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
    ),
    4: (
        [
            -np.sqrt(3.0 / 7.0 + 2.0 / 7.0 * np.sqrt(1.2)),
            -np.sqrt(3.0 / 7.0 - 2.0 / 7.0 * np.sqrt(1.2)),
            np.sqrt(3.0 / 7.0 - 2.0 / 7.0 * np.sqrt(1.2)),
            np.sqrt(3.0 / 7.0 + 2.0 / 7.0 * np.sqrt(1.2)),
        ],
        [
            (18.0 - np.sqrt(30.0)) / 36.0,
            (18.0 + np.sqrt(30.0)) / 36.0,
            (18.0 + np.sqrt(30.0)) / 36.0,
            (18.0 - np.sqrt(30.0)) / 36.0,
        ],
    ),
}


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> QuadratureRule:
    """``n``-point Gauss-Legendre rule on [-1, 1], ``1 <= n <= 5``."""
    if n in _GAUSS:
        x, w = _GAUSS[n]
        return QuadratureRule(np.array(x), np.array(w))
    if n == 5:
        # only needed for the k+2 point projections at k = 3
        x, w = np.polynomial.legendre.leggauss(5)
        return QuadratureRule(x, w)
    raise ValueError(f"unsupported Gauss rule size {n}")


@dataclass(frozen=True)
class NodalModalMap:
    """Conversion between nodal values and modal coefficients.

    ``forward`` maps nodal values to modal coefficients and ``backward`` is
    the Vandermonde matrix mapping modes back to nodes.
    """

    nodes: np.ndarray
    forward: np.ndarray = field(repr=False)
    backward: np.ndarray = field(repr=False)

    def to_modal(self, values):
        """Nodal array ``(..., k+1, ncomp)`` -> modal array of the same shape."""
        return np.einsum("mi,...ic->...mc", self.forward, values)

    def to_nodal(self, coeffs):
        return np.einsum("im,...mc->...ic", self.backward, coeffs)


@lru_cache(maxsize=None)
def nodal_map(degree: int) -> NodalModalMap:
    """Map on the ``degree+1`` Gauss-Legendre nodes."""
    nodes = gauss_rule(degree + 1).points
    V = vandermonde(degree, nodes)
    Vinv = np.linalg.inv(V)
    assert np.allclose(Vinv @ V, np.eye(degree + 1), atol=1e-12)
    return NodalModalMap(nodes, Vinv, V)


def nodal_to_modal(values, degree):
    return nodal_map(degree).to_modal(np.asarray(values, dtype=float))


def modal_to_nodal(coeffs, degree):
    return nodal_map(degree).to_nodal(np.asarray(coeffs, dtype=float))


def evaluate(coeffs, xi):
    """Evaluate modal coefficients ``(..., k+1, ncomp)`` at points ``xi``.

    Returns ``(..., len(xi), ncomp)``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    V = vandermonde(coeffs.shape[-2] - 1, xi)
    return np.einsum("qm,...mc->...qc", V, coeffs)


def l2_project(f, degree, npts=None):
    """Modal coefficients of the L2 projection of ``f`` onto degree ``degree``.

    ``f`` is called with an array of reference points; it may return shape
    ``(n,)`` or ``(n, ncomp)``.  Uses ``degree + 2`` Gauss points unless
    ``npts`` is given.
    """
    rule = gauss_rule(npts or degree + 2)
    vals = np.asarray(f(rule.points), dtype=float)
    V = vandermonde(degree, rule.points)
    # (1/2) int f phi_m
    return 0.5 * np.einsum("q,qm,q...->m...", rule.weights, V, vals)
