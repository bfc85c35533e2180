import numpy as np
import pytest

from bdgkit.errors import NewtonDiverged
from bdgkit.geometry import curvature_spectrum
from bdgkit.graph_solver import (AXIS, INTERIOR, ORIGIN, WALL, cauchy_in_R, f0_on_mesh,
                                 linearized_mean_curvature, node_kinds, polar_mesh,
                                 sandwich_check, solve_dirichlet)
from bdgkit.profile import HALF, QUARTER


def test_mesh_and_kinds():
    m = polar_mesh(10.0, 11, 7)
    assert m.r[0] == 0.0 and m.r[-1] == 10.0
    assert np.all(np.diff(m.r) > 0)
    k = node_kinds(m)
    assert k[0, 0] == ORIGIN
    assert np.all(k[1:-1, 0] == WALL)
    assert np.all(k[1:-1, -1] == AXIS)
    assert k[5, 3] == INTERIOR
    with pytest.raises(ValueError):
        polar_mesh(10.0, 2, 7)


def test_solution_properties(field20):
    assert field20.iterations <= 15
    assert field20.history[-1] <= 1e-9 or field20.roundoff_floor
    # boundary data
    assert np.allclose(field20.F[-1], field20.F0[-1])
    assert np.all(field20.F[:, 0] == 0.0)
    rep = sandwich_check(field20, 0.2)
    assert rep.verdict
    assert rep.C < 10


def test_linearization_matches_difference(field20):
    m = field20.mesh
    x = m.r[:, None] / m.R
    y = (m.theta[None, :] - QUARTER) / (HALF - QUARTER)
    phi = np.sin(np.pi * x) * np.sin(3 * y) * m.R ** 2
    from bdgkit.graph_solver import discrete_mean_curvature
    eps = 1e-6
    F = field20.F
    fd = (discrete_mean_curvature(F + eps * phi, field20.mesh)
          - discrete_mean_curvature(F - eps * phi, field20.mesh)) / (2 * eps)
    lin = linearized_mean_curvature(F, phi, field20.mesh)
    inner = field20.kinds == INTERIOR
    assert np.allclose(fd[inner], lin[inner], rtol=1e-6, atol=1e-8 * np.max(np.abs(lin[inner])))


def test_spline_curvature_small(field20):
    spl = field20.surface()
    r, th = np.array([5.0, 10.0]), np.array([1.0, 1.3])
    sp = curvature_spectrum(spl, r * np.cos(th), r * np.sin(th))
    assert np.all(np.abs(sp.H) < 1e-3 * np.sqrt(sp.A_sq))


def test_spline_reproduces_nodes(field20):
    spl = field20.surface()
    m = field20.mesh
    i, j = 40, 50
    u, v = m.r[i] * np.cos(m.theta[j]), m.r[i] * np.sin(m.theta[j])
    assert spl.derivs(np.array([u]), np.array([v])).val[0] == pytest.approx(field20.F[i, j], abs=1e-8)


def test_cauchy_in_R(profile):
    fields = [solve_dirichlet(R, profile, nr=60, ntheta=40) for R in (15.0, 30.0)]
    d = cauchy_in_R(fields)
    assert len(d) == 1 and np.isfinite(d[0])


def test_newton_budget(profile):
    with pytest.raises(NewtonDiverged):
        solve_dirichlet(20.0, profile, nr=40, ntheta=30, max_iter=0)


def test_bad_arguments(profile):
    with pytest.raises(ValueError):
        solve_dirichlet(-1.0, profile)
    with pytest.raises(ValueError):
        solve_dirichlet(10.0, profile, nr=20, ntheta=20, correction="bogus")


def test_f0_on_mesh(profile):
    m = polar_mesh(5.0, 6, 5)
    F0 = f0_on_mesh(m, profile)
    assert np.all(F0[:, 0] == 0)
    assert F0[-1, -1] == pytest.approx(125.0)
    assert QUARTER < HALF
