import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdgkit.profile import HALF, QUARTER, g_from_psi, ode_residual_g, phi_residual, solve_phi


def test_boundary_values(profile):
    inv = profile.invariants()
    # endpoint values of φ and φ′
    assert abs(profile.phi[0] - np.pi / 2) <= 1e-6
    assert abs(profile.phi[-1]) <= 1e-6
    assert abs(profile.dphi[0] + 3) <= 1e-3
    assert abs(profile.dphi[-1] + 7 / 4) <= 1e-6
    assert inv["riccati_lower_violations"] == 0
    assert inv["riccati_upper_violations"] == 0


def test_profile_normalised_and_positive(profile):
    assert profile.g[-1] == pytest.approx(1.0, abs=1e-10)
    assert profile.g[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(profile.g[1:] > 0)


def test_residuals_small(profile):
    assert phi_residual(profile) < 1e-8


def test_g_equation_second_order():
    # finite-difference consistency of the tabulated g away from the wall
    res = [ode_residual_g(solve_phi(n), 0.85) for n in (256, 512)]
    assert res[1] < 3e-5
    assert np.log2(res[0] / res[1]) > 1.9


def test_g_from_psi_consistent(profile):
    other = g_from_psi(profile)
    assert np.max(np.abs(other.g - profile.g)) < 1e-8


def test_refinement_stable():
    coarse, fine = solve_phi(256), solve_phi(512)
    th = np.linspace(QUARTER + 0.01, HALF, 50)
    assert np.max(np.abs(coarse.evaluate(th).g - fine.evaluate(th).g)) < 1e-7


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.0, max_value=np.pi))
def test_extension_symmetries(profile, theta):
    g, dg, _ = profile.g_extended(np.array([theta]))
    gm, dgm, _ = profile.g_extended(np.array([np.pi - theta]))
    gs, _, _ = profile.g_extended(np.array([np.pi / 2 - theta]))
    assert g[0] == pytest.approx(gm[0], abs=1e-12)
    if theta <= np.pi / 2:
        assert g[0] == pytest.approx(-gs[0], abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=QUARTER + 1e-6, max_value=HALF))
def test_g_monotone_interior(profile, theta):
    assert profile.evaluate(np.array([theta])).dg[0] >= 0.0


def test_concave_away_from_wall(profile):
    # convex in a layer next to the wall, concave beyond it
    th = np.linspace(QUARTER + 0.27, HALF, 200)
    assert np.all(profile.evaluate(th).ddg <= 0)
    assert profile.invariants()["ddg_max"] > 0


def test_cos_bounds(profile):
    inv = profile.invariants()
    assert inv["upper_cos_margin"] >= 0
    assert 0 < inv["fitted_C"] <= 1
    assert inv["lower_cos_margin"] >= -1e-12
