import numpy as np
import pytest

from aledg import basis
from aledg.euler import pressure, prim_to_cons
from aledg.limiters import (
    AverageNotPhysical,
    LimiterConfig,
    check_points,
    minmod,
    minmod_b,
    positivity_limit,
    tvd_limit,
)
from aledg.mesh import Mesh

G = 1.4


def test_minmod_values():
    assert minmod(1.0, 2.0, 3.0) == 1.0
    assert minmod(-1.0, -0.5, -3.0) == -0.5
    assert minmod(1.0, -2.0, 3.0) == 0.0
    assert minmod(0.0, 1.0, 1.0) == 0.0


def test_minmod_b_threshold():
    h = 0.1
    assert minmod_b(0.5, -1.0, 1.0, M=100.0, h=h) == 0.5  # |a| <= M h^2 = 1
    assert minmod_b(2.0, -1.0, 1.0, M=100.0, h=h) == 0.0


def _mesh_from_prim(fun, n=20, k=2):
    faces = np.linspace(0.0, 1.0, n + 1)
    coeffs = np.zeros((n, k + 1, 3))
    for j in range(n):
        a, b = faces[j], faces[j + 1]
        coeffs[j] = basis.l2_project(
            lambda xi: prim_to_cons(fun(0.5 * (a + b) + 0.5 * (b - a) * xi), G), k, npts=5
        )
    return Mesh(faces, coeffs)


def test_tvd_keeps_linear_data():
    m = _mesh_from_prim(lambda x: np.column_stack([1 + 0.5 * x, np.zeros_like(x), np.ones_like(x)]), k=1)
    out = tvd_limit(m, G, LimiterConfig("tvd"))
    np.testing.assert_allclose(out.coeffs[1:-1], m.coeffs[1:-1], atol=1e-14)


def test_tvd_flattens_extremum_and_drops_high_modes():
    m = _mesh_from_prim(lambda x: np.column_stack([1 + np.exp(-200 * (x - 0.525) ** 2), np.zeros_like(x),
                                                   np.ones_like(x)]))
    out = tvd_limit(m, G, LimiterConfig("tvd"))
    j = 10  # peak cell
    assert np.all(out.coeffs[j, 1:] == 0.0)
    np.testing.assert_allclose(out.averages, m.averages)


def test_tvb_leaves_smooth_extremum_alone():
    m = _mesh_from_prim(lambda x: np.column_stack([1 + 0.01 * np.sin(2 * np.pi * x), np.zeros_like(x),
                                                   np.ones_like(x)]), k=1)
    out = tvd_limit(m, G, LimiterConfig("tvb", tvb_m=1e4))
    np.testing.assert_allclose(out.coeffs, m.coeffs)


def test_positivity_linear_density_crossing_zero():
    eps = 1e-10
    coeffs = np.zeros((1, 2, 3))
    coeffs[0, 0] = [0.5, 0.0, 2.0]
    coeffs[0, 1, 0] = 0.8 / np.sqrt(3)  # rho(xi) = 0.5 + 0.8 xi, negative at xi = -1
    m = Mesh(np.array([0.0, 1.0]), coeffs)
    out = positivity_limit(m, G, LimiterConfig("off", positivity=True, pos_eps=eps))
    vals = basis.evaluate(out.coeffs[0], check_points(1))
    target = eps + 64 * np.finfo(float).eps * 0.5
    assert eps <= vals[:, 0].min() == pytest.approx(target, abs=1e-15)
    np.testing.assert_allclose(out.averages, m.averages, atol=1e-15)
    # theta solves 0.5 - theta * 0.8 = target
    assert out.coeffs[0, 1, 0] * np.sqrt(3) == pytest.approx(0.5 - target, rel=1e-12)


def test_positivity_pressure_scaling():
    coeffs = np.zeros((1, 3, 3))
    coeffs[0, 0] = prim_to_cons([1.0, 0.0, 0.1], G)
    coeffs[0, 1, 2] = -0.2  # energy slope large enough to go negative
    coeffs[0, 2, 1] = 0.3
    m = Mesh(np.array([0.0, 1.0]), coeffs)
    out = positivity_limit(m, G, LimiterConfig("off", positivity=True, pos_eps=1e-12))
    vals = basis.evaluate(out.coeffs[0], check_points(2))
    assert pressure(vals, G).min() >= 1e-12 * 0.999
    np.testing.assert_allclose(out.averages, m.averages)


def test_positivity_rejects_bad_average():
    coeffs = np.zeros((1, 2, 3))
    coeffs[0, 0] = [1.0, 2.0, 1.0]
    with pytest.raises(AverageNotPhysical):
        positivity_limit(Mesh(np.array([0.0, 1.0]), coeffs), G, LimiterConfig(positivity=True))


def test_config_validation():
    with pytest.raises(ValueError):
        LimiterConfig("tvb", tvb_m=-1.0)
    with pytest.raises(ValueError):
        LimiterConfig(mode="weno")
