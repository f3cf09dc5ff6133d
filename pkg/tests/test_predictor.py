import numpy as np
import pytest

from aledg import basis
from aledg.euler import prim_to_cons
from aledg.mesh import Cell
from aledg.predictor import (
    PredictorKind,
    cerk_predict,
    cerk_tableau,
    predict,
    taylor_predict,
    time_rule,
)

G = 1.4


def test_cerk2_weights():
    np.testing.assert_allclose(cerk_tableau("cerk2").b(1.0), [0.5, 0.5])
    np.testing.assert_allclose(cerk_tableau("cerk2").b(0.0), [0.0, 0.0])


def test_cerk3_weights_sum_to_one():
    tab = cerk_tableau("cerk3")
    assert sum(tab.b(1.0)) == pytest.approx(1.0, abs=1e-15)
    # first-same-as-last: b_s(1) reproduces the last coupling row
    np.testing.assert_allclose(tab.b(1.0)[:3], [float(a) for a in tab.coupling[3]])
    assert tab.b(1.0)[3] == pytest.approx(0.0)


def test_no_tableau_for_taylor():
    with pytest.raises(ValueError):
        cerk_tableau("taylor1")


def test_time_rules():
    assert len(time_rule(1).points) == 1
    assert len(time_rule(3).points) == 2


def _cell(k, f, wl=0.0, wr=0.0):
    coeffs = basis.l2_project(lambda xi: prim_to_cons(f(xi), G), k, npts=5)
    return Cell(-0.05, 0.05, wl, wr, 0, coeffs)


@pytest.mark.parametrize("k,kind", [(1, "taylor1"), (2, "cerk2"), (3, "cerk3")])
def test_contact_advected_with_mesh(k, kind):
    # v = w constant, p constant: density nodal values are frozen
    v0 = 0.8
    cell = _cell(k, lambda xi: np.column_stack([1.0 + 0.3 * xi, np.full_like(xi, v0), np.ones_like(xi)]),
                 v0, v0)
    fn = taylor_predict if kind == "taylor1" else cerk_predict
    tr = fn(cell, G, 0.01, theta=[0.0, 0.5, 1.0])
    rho0 = basis.evaluate(cell.coeffs, basis.gauss_rule(k + 1).points)[:, 0]
    np.testing.assert_allclose(tr.volume[0, :, :, 0], np.broadcast_to(rho0, (3, k + 1)), atol=1e-13)
    # mass flux relative to the mesh vanishes
    m_rel = tr.volume[0, :, :, 1] - v0 * tr.volume[0, :, :, 0]
    assert np.max(np.abs(m_rel)) < 1e-13


def test_theta_zero_reproduces_polynomial():
    cell = _cell(2, lambda xi: np.column_stack([1 + 0.2 * np.sin(xi), 0.1 * xi, 1 + 0.1 * xi**2]))
    tr = cerk_predict(cell, G, 0.02, theta=[0.0])
    np.testing.assert_allclose(tr.left[0, 0], basis.evaluate(cell.coeffs, [-1.0])[0], atol=1e-13)
    np.testing.assert_allclose(tr.right[0, 0], basis.evaluate(cell.coeffs, [1.0])[0], atol=1e-13)


def _march(kind, coeffs, dt, nsub, k):
    # repeated single-cell predictions on a fixed cell (zero mesh velocity)
    faces = np.array([-0.05, 0.05])
    w = np.zeros(2)
    c = coeffs[None]
    for _ in range(nsub):
        tr = predict(c, faces, w, dt / nsub, G, kind, theta=[1.0])
        c = basis.nodal_to_modal(tr.volume[:, 0], k)
    return c[0]


@pytest.mark.parametrize("kind,order", [("cerk2", 2), ("cerk3", 3)])
def test_predictor_self_convergence(kind, order):
    k = 2 if kind == "cerk2" else 3
    cell = _cell(k, lambda xi: np.column_stack([1 + 0.2 * np.sin(xi), 0.3 + 0.1 * xi, 1 + 0.1 * xi**2]))
    T = 0.004
    ref = _march("cerk3", cell.coeffs, T, 256, k)
    errs = []
    for n in (1, 2, 4):
        errs.append(np.max(np.abs(_march(kind, cell.coeffs, T, n, k) - ref)))
    slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(slopes >= order - 0.1), slopes


def test_fallback_on_non_physical_prediction():
    # strong expansion with low pressure: a huge dt drives the predicted
    # density negative, so the cell falls back to its frozen polynomial
    k = 2
    cell = _cell(k, lambda xi: np.column_stack([np.ones_like(xi), 5.0 * xi, np.full_like(xi, 1e-3)]))
    tr = cerk_predict(cell, G, 1.0, theta=[0.5, 1.0])
    assert tr.fallback.all()
    vals = basis.evaluate(cell.coeffs, basis.gauss_rule(k + 1).points)
    np.testing.assert_allclose(tr.volume[0, 1], vals)


def test_cerk_needs_degree_two():
    cell = _cell(1, lambda xi: np.column_stack([np.ones_like(xi), xi * 0, np.ones_like(xi)]))
    with pytest.raises(ValueError):
        cerk_predict(cell, G, 0.01, kind=PredictorKind.CERK2)


def test_degree_zero_is_constant():
    coeffs = np.array([[prim_to_cons([1.0, 0.5, 1.0], G)]])
    tr = predict(coeffs, np.array([0.0, 1.0]), np.zeros(2), 0.1, G)
    np.testing.assert_allclose(tr.left[0, 0], coeffs[0, 0])
