import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aledg.euler import ConservedState, GasModel, NonPhysicalState, ale_flux_array, prim_to_cons
from aledg.fluxes import (
    FluxScheme,
    contact_eigenvalue_fix,
    hllc,
    hllc_flux,
    hllc_star_pressures,
    roe,
    roe_flux,
    roe_matrix,
    rusanov,
    rusanov_flux,
    rusanov_speed,
)

from conftest import random_states

G = 1.4
SOD_L = np.array([1.0, 0.0, 2.5])
SOD_R = np.array([0.125, 0.0, 0.25])

KERNELS = {
    "rusanov": lambda ul, ur, w: rusanov_flux(ul, ur, w, G),
    "roe": lambda ul, ur, w: roe_flux(ul, ur, w, G, alpha=0.0),
    "roe_fixed": lambda ul, ur, w: roe_flux(ul, ur, w, G, alpha=0.1),
    "hllc": lambda ul, ur, w: hllc_flux(ul, ur, w, G),
}


def boost_matrix(V):
    # u -> u in a frame moving at -V (velocity shifted by +V)
    return np.array([[1.0, 0.0, 0.0], [V, 1.0, 0.0], [0.5 * V * V, V, 1.0]])


def test_rusanov_speed_sod():
    lam = rusanov_speed(SOD_L, SOD_R, 0.0, G)
    assert lam == pytest.approx(np.sqrt(1.4), rel=1e-12)
    assert np.sqrt(1.4 * 0.1 / 0.125) == pytest.approx(1.0583, abs=1e-4)


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_consistency(name, rng):
    u = random_states(rng, 20)
    w = rng.uniform(-1, 1, 20)
    g, _ = KERNELS[name](u, u, w)
    np.testing.assert_allclose(g, ale_flux_array(u, w, G), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", ["rusanov", "roe", "roe_fixed"])
def test_galilean_boost(name, rng):
    ul, ur = random_states(rng, 16), random_states(rng, 16)
    w = rng.uniform(-1, 1, 16)
    V = 7.5
    B = boost_matrix(V)
    g, s = KERNELS[name](ul, ur, w)
    gb, sb = KERNELS[name](ul @ B.T, ur @ B.T, w + V)
    np.testing.assert_allclose(gb, g @ B.T, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(sb, s, rtol=1e-10)


def test_hllc_boost_mass_and_momentum(rng):
    # the printed star energy uses the relative velocity in its pressure
    # work term, so only mass and momentum are frame independent
    ul, ur = random_states(rng, 16), random_states(rng, 16)
    w = rng.uniform(-1, 1, 16)
    B = boost_matrix(7.5)
    g, _ = hllc_flux(ul, ur, w, G)
    gb, _ = hllc_flux(ul @ B.T, ur @ B.T, w + 7.5, G)
    np.testing.assert_allclose(gb[:, :2], (g @ B.T)[:, :2], rtol=1e-10, atol=1e-10)


def test_hllc_boost_energy_offset():
    # in the left-star branch the boosted energy flux differs by
    # -S_M V (p* - p_l) / (S_l - S_M); it vanishes at a contact (p* = p_l)
    from aledg.euler import pressure
    from aledg.fluxes import roe_average

    ul = prim_to_cons([1.0, 0.2, 1.0], G)
    ur = prim_to_cons([0.5, 0.1, 0.6], G)
    w, V = 0.05, 3.0
    B = boost_matrix(V)
    g, _ = hllc_flux(ul, ur, np.array(w), G)
    gb, _ = hllc_flux(ul @ B.T, ur @ B.T, np.array(w + V), G)
    rl, pl = ul[0], pressure(ul, G)
    rr, pr = ur[0], pressure(ur, G)
    ql, qr = ul[1] / rl - w, ur[1] / rr - w
    vh, ch, _ = roe_average(ul, ur, G)
    sl = min(ql - np.sqrt(G * pl / rl), vh - w - ch)
    sr = max(qr + np.sqrt(G * pr / rr), vh - w + ch)
    sm = (rr * qr * (sr - qr) - rl * ql * (sl - ql) + pl - pr) / (rr * (sr - qr) - rl * (sl - ql))
    assert sl <= 0 < sm
    pstar = rl * (ql - sl) * (ql - sm) + pl
    offset = -sm * V * (pstar - pl) / (sl - sm)
    assert gb[2] - (B @ g)[2] == pytest.approx(offset, rel=1e-10)


def test_roe_matrix_jump_property(rng):
    ul, ur = random_states(rng, 25), random_states(rng, 25)
    w = rng.uniform(-1, 1, 25)
    A = roe_matrix(ul, ur, w, G)
    lhs = ale_flux_array(ur, w, G) - ale_flux_array(ul, w, G)
    np.testing.assert_allclose(lhs, np.einsum("nij,nj->ni", A, ur - ul), rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("name", ["roe", "hllc"])
def test_steady_moving_contact(name):
    v0, p0 = 0.7, 1.3
    ul = prim_to_cons([2.0, v0, p0], G)
    ur = prim_to_cons([1.0, v0, p0], G)
    g, _ = KERNELS[name](ul, ur, np.array(v0))
    np.testing.assert_allclose(g, [0.0, p0, p0 * v0], atol=1e-14)


def test_rusanov_diffuses_contact():
    ul = prim_to_cons([2.0, 0.7, 1.3], G)
    ur = prim_to_cons([1.0, 0.7, 1.3], G)
    g, _ = rusanov_flux(ul, ur, np.array(0.7), G)
    assert g[0] > 1e-3


def test_eigenvalue_fix_values():
    delta = 0.3
    assert contact_eigenvalue_fix(0.0, delta) == pytest.approx(delta / 2)
    assert contact_eigenvalue_fix(delta, delta) == pytest.approx(delta)
    assert contact_eigenvalue_fix(2.0, delta) == 2.0
    # continuous and increasing on [0, delta]
    a = np.linspace(0, delta, 50)
    f = contact_eigenvalue_fix(a, delta)
    assert np.all(np.diff(f) > 0)
    assert np.all(f >= a)


def test_fix_only_changes_near_contact_speed():
    # far from the contact speed the fix is inactive
    ul = prim_to_cons([1.0, 3.0, 1.0], G)
    ur = prim_to_cons([0.9, 3.1, 0.95], G)
    g0, _ = roe_flux(ul, ur, np.array(0.0), G, alpha=0.0)
    g1, _ = roe_flux(ul, ur, np.array(0.0), G, alpha=0.1)
    np.testing.assert_allclose(g0, g1)
    g2, _ = roe_flux(ul, ur, np.array(3.05), G, alpha=0.1)
    g3, _ = roe_flux(ul, ur, np.array(3.05), G, alpha=0.0)
    assert not np.allclose(g2, g3)


def test_hllc_star_pressures_agree(rng):
    ul, ur = random_states(rng, 30), random_states(rng, 30)
    w = rng.uniform(-1, 1, 30)
    pl, pr = hllc_star_pressures(ul, ur, w, G)
    np.testing.assert_allclose(pl, pr, rtol=1e-10)


def test_supersonic_upwinding():
    ul = prim_to_cons([1.0, 5.0, 1.0], G)
    ur = prim_to_cons([0.5, 5.0, 0.4], G)
    for name in ("roe", "hllc"):
        g, _ = KERNELS[name](ul, ur, np.array(0.0))
        np.testing.assert_allclose(g, ale_flux_array(ul, 0.0, G), rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    rl=st.floats(0.05, 5), vl=st.floats(-3, 3), pl=st.floats(0.05, 5),
    rr=st.floats(0.05, 5), vr=st.floats(-3, 3), pr=st.floats(0.05, 5),
    w=st.floats(-3, 3),
)
def test_fluxes_finite_for_physical_states(rl, vl, pl, rr, vr, pr, w):
    ul = prim_to_cons([rl, vl, pl], G)
    ur = prim_to_cons([rr, vr, pr], G)
    for name in ("rusanov", "hllc"):
        g, s = KERNELS[name](ul, ur, np.array(w))
        assert np.all(np.isfinite(g)) and s > 0


def test_non_physical_input_raises():
    bad = np.array([1.0, 0.0, -1.0])
    for fn in (rusanov_flux, hllc_flux, roe_flux):
        with pytest.raises(NonPhysicalState):
            fn(bad, SOD_R, 0.0, G)


def test_flux_scheme_dispatch_and_typed_wrappers():
    gas = GasModel(G)
    ul, ur = ConservedState(*SOD_L), ConservedState(*SOD_R)
    for kind, fn in (("rusanov", rusanov), ("roe", roe), ("hllc", hllc)):
        g, s = FluxScheme(kind, 0.1)(SOD_L, SOD_R, 0.0, G)
        res = fn(ul, ur, 0.0, gas)
        np.testing.assert_allclose(res.flux, g)
        assert res.max_speed == pytest.approx(float(s))
    with pytest.raises(ValueError):
        FluxScheme("bogus")
