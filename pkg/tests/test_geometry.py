import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdgkit.errors import OutsideCollar
from bdgkit.geometry import (BlockSymmetric, Plane, ProfileSurface, QuadraticBump, Scaled, Sphere,
                             curvature_expansion_z, curvature_spectrum, fermi_project)
from bdgkit.profile import HALF, QUARTER


def test_sphere_spectrum():
    rho = 10.0
    u, v = np.array([0.5, 2.0, 3.0]), np.array([1.0, 0.2, 3.5])
    sp = curvature_spectrum(Sphere(rho), u, v)
    assert np.allclose(sp.kappas, 1 / rho, rtol=1e-10)
    assert np.allclose(sp.H, 8 / rho, rtol=1e-10)
    assert np.allclose(sp.A_sq, 8 / rho ** 2, rtol=1e-10)
    assert np.allclose(sp.sum_cubes, 8 / rho ** 3, rtol=1e-10)


def test_axis_limits():
    # at the origin of the paraboloid every principal curvature equals 2c
    sp = curvature_spectrum(QuadraticBump(0.3), np.array([0.0, 1e-12]), np.array([0.0, 0.0]))
    assert np.allclose(sp.kappas, 0.6, rtol=1e-8)


def test_plane_flat():
    sp = curvature_spectrum(Plane(), np.array([1.0]), np.array([2.0]))
    assert np.all(sp.kappas == 0)


def test_scaling():
    base = Sphere(10.0)
    u, v = np.array([1.0]), np.array([2.0])
    alpha = 0.1
    a = curvature_spectrum(Scaled(base, alpha), u / alpha, v / alpha)
    b = curvature_spectrum(base, u, v)
    assert np.allclose(a.kappas, alpha * b.kappas, rtol=1e-12)


def test_z_expansion_sphere():
    rho = 5.0
    sp = curvature_spectrum(Sphere(rho), np.array([1.0]), np.array([1.0]))
    z = np.array([0.3])
    ex = curvature_expansion_z(sp, z)
    # parallel surfaces of a sphere are spheres of radius ρ − z
    assert ex.H_z[0] == pytest.approx(8 / (rho - z[0]), rel=1e-12)


def test_swap_antisymmetry(profile):
    surf = BlockSymmetric(ProfileSurface(profile))
    r, th = np.array([3.0, 9.0]), np.array([1.0, 1.3])
    u, v = r * np.cos(th), r * np.sin(th)
    a, b = curvature_spectrum(surf, u, v), curvature_spectrum(surf, v, u)
    assert np.allclose(a.sum_cubes, -b.sum_cubes, rtol=1e-12)
    assert np.allclose(a.H, -b.H, atol=1e-12)


def _embed(surface, y, z):
    j = surface.derivs(y[..., 0], y[..., 1])
    W = np.sqrt(1 + np.sum(j.d ** 2, axis=-1))
    n = np.concatenate([j.d, -np.ones(W.shape + (1,))], axis=-1) / W[..., None]
    return np.concatenate([y, j.val[..., None]], axis=-1) + z[..., None] * n


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2))
def test_fermi_roundtrip_sphere(yu, yv, z):
    surf = Sphere(10.0)
    x = _embed(surf, np.array([yu, yv]), np.array(z))
    fc = fermi_project(x, surf, check_collar=False)
    assert fc.z == pytest.approx(z, abs=1e-10)
    assert fc.u == pytest.approx(yu, abs=1e-9)
    assert fc.v == pytest.approx(yv, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(5, 30), st.floats(QUARTER + 0.05, HALF - 0.05), st.floats(-0.5, 0.5))
def test_fermi_roundtrip_cone(profile, r, th, z):
    surf = Scaled(BlockSymmetric(ProfileSurface(profile)), 0.1)
    y = np.array([r * np.cos(th), r * np.sin(th)])
    fc = fermi_project(_embed(surf, y, np.array(z)), surf, check_collar=False)
    assert fc.z == pytest.approx(z, abs=1e-9)
    assert np.hypot(fc.u - y[0], fc.v - y[1]) < 1e-8


def test_collar_enforced():
    with pytest.raises(OutsideCollar):
        fermi_project(np.array([0.0, 0.0, 9.0]), Sphere(10.0))
