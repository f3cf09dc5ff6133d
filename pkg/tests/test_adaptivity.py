import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aledg import basis
from aledg.adaptivity import AdaptConfig, Mark, adapt, mark, merge, refine
from aledg.mesh import Cell, Mesh


def _mesh(faces, k=1, levels=None):
    faces = np.asarray(faces, dtype=float)
    coeffs = np.zeros((len(faces) - 1, k + 1, 3))
    coeffs[:, 0] = [1.0, 0.0, 2.5]
    return Mesh(faces, coeffs, levels=None if levels is None else np.asarray(levels))


def test_neighbours_of_refined_cells_refine():
    # R N R: the middle cell joins
    m = _mesh([0.0, 0.3, 0.4, 0.7, 0.8])
    marks = mark(m, AdaptConfig(True, 0.0, 0.25))
    assert list(marks[:3]) == [Mark.REFINE, Mark.REFINE, Mark.REFINE]


def test_coarsen_below_h_min_and_level_balance():
    m = _mesh([0.0, 0.01, 0.5, 1.0], levels=[0, 0, 2])
    marks = mark(m, AdaptConfig(True, 0.05, 10.0))
    assert marks[0] == Mark.COARSEN
    assert marks[1] == Mark.REFINE or marks[1] == Mark.NONE
    m2 = _mesh(np.linspace(0, 1, 4), levels=[0, 0, 2])
    assert mark(m2, AdaptConfig(True, 0.0, 10.0))[1] == Mark.REFINE


def test_size_jump_refines_large_neighbour():
    m = _mesh([0.0, 0.1, 0.5, 0.6])
    marks = mark(m, AdaptConfig(True, 0.01, 10.0))
    assert marks[1] == Mark.REFINE


def test_refine_children_means():
    # parent rho = 1 + xi: child averages 0.5 and 1.5
    coeffs = np.zeros((2, 3))
    coeffs[0] = [1.0, 0.0, 1.0]
    coeffs[1, 0] = 1.0 / np.sqrt(3)
    left, right = refine(Cell(0.0, 2.0, 0.0, 1.0, 0, coeffs))
    assert left.coeffs[0, 0] == pytest.approx(0.5)
    assert right.coeffs[0, 0] == pytest.approx(1.5)
    assert (left.x_right, left.w_right, left.level) == (1.0, 0.5, 1)


@settings(max_examples=40, deadline=None)
@given(
    k=st.integers(0, 3),
    c=arrays(np.float64, (4, 3), elements=st.floats(-2, 2)),
    xl=st.floats(-5, 5),
    h=st.floats(1e-3, 10),
)
def test_merge_of_refined_halves_is_identity(k, c, xl, h):
    coeffs = c[: k + 1]
    parent = Cell(xl, xl + h, 0.1, 0.3, 1, coeffs.copy())
    back = merge(*refine(parent))
    np.testing.assert_allclose(back.coeffs, coeffs, atol=1e-13 * (1 + np.abs(coeffs).max()))
    assert back.level == parent.level
    assert (back.w_left, back.w_right) == (0.1, 0.3)


@settings(max_examples=30, deadline=None)
@given(
    k=st.integers(0, 3),
    c=arrays(np.float64, (2, 4, 3), elements=st.floats(-2, 2)),
    h1=st.floats(1e-2, 2), h2=st.floats(1e-2, 2),
)
def test_merge_conserves(k, c, h1, h2):
    a = Cell(0.0, h1, 0.0, 0.0, 0, c[0, : k + 1])
    b = Cell(h1, h1 + h2, 0.0, 0.0, 0, c[1, : k + 1])
    m = merge(a, b)
    np.testing.assert_allclose(m.h * m.coeffs[0], h1 * a.coeffs[0] + h2 * b.coeffs[0], atol=1e-12)


def test_merge_requires_adjacent():
    z = np.zeros((2, 3))
    with pytest.raises(ValueError):
        merge(Cell(0, 1, 0, 0, 0, z), Cell(1.5, 2, 0, 0, 0, z))


def test_adapt_conserves_totals(rng):
    faces = np.concatenate([[0.0], np.cumsum(rng.uniform(0.002, 0.1, 30))])
    m = _mesh(faces, k=2)
    m.coeffs[:, 1:] = rng.normal(scale=0.05, size=m.coeffs[:, 1:].shape)
    out = adapt(m, AdaptConfig(True, 0.01, 0.06))
    assert out.n_cells != m.n_cells
    np.testing.assert_allclose(out.totals(), m.totals(), rtol=1e-13, atol=1e-13 * m.content().max())
    assert out.faces[0] == m.faces[0] and out.faces[-1] == m.faces[-1]


def test_adapt_disabled_is_noop():
    m = _mesh(np.linspace(0, 1, 5))
    assert adapt(m, AdaptConfig(False)) is m


def test_config_validation():
    with pytest.raises(ValueError):
        AdaptConfig(True, 0.5, 0.1)


def test_l2_projection_helper_consistent():
    # refining a polynomial of degree k is exact: re-evaluation matches
    coeffs = basis.l2_project(lambda x: np.column_stack([1 + x**2, x, np.ones_like(x)]), 2)
    left, right = refine(Cell(0.0, 1.0, 0, 0, 0, coeffs))
    eta = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(basis.evaluate(left.coeffs, eta), basis.evaluate(coeffs, 0.5 * (eta - 1)), atol=1e-14)
