import numpy as np
import pytest

from bdgkit.chart import PolarPoint
from bdgkit.curvature import Perturbation
from bdgkit.jacobi import (OuterProblem, j0_apply, j0_apply_fd, jacobi_apply,
                           jacobi_supersolution_check, kernel_convergence, kernel_field, solve_outer)


def test_j0_routes_agree(profile):
    pert = Perturbation("power", -0.5, 0.5)
    p = PolarPoint(np.array([25.0, 80.0, 300.0]), np.array([1.0, 1.2, 1.45]))
    a, b = j0_apply(pert, p, profile), j0_apply_fd(pert, p, profile)
    assert np.allclose(a, b, rtol=1e-3)


@pytest.mark.parametrize("variant", ["graded", "radial"])
def test_supersolution_lemma(profile, variant):
    rep = jacobi_supersolution_check(profile, -0.5, 0.5, 20.0, 500.0, variant=variant)
    assert rep.verdict
    assert rep.extra["C_fit"] > 0


def test_checker_detects_sign_flip(profile):
    rep = jacobi_supersolution_check(profile, -0.5, 0.5, 20.0, 500.0, negate=True)
    assert not rep.verdict


def test_bad_variant(profile):
    with pytest.raises(ValueError):
        jacobi_supersolution_check(profile, -0.5, 0.5, variant="bogus")


def test_kernel_field_refines(profile):
    study = kernel_convergence(profile, 10.0, sizes=(100, 200))
    assert study.errors[1] < study.errors[0] / 3
    assert study.order > 1.8


def test_kernel_field_shape(field20):
    k = kernel_field(field20)
    assert k.shape == field20.F.shape
    assert np.all((k > 0) & (k <= 1))
    out = jacobi_apply(k, field20, "linearized")
    assert out.shape == k.shape


def test_outer_manufactured(profile):
    sol = solve_outer(profile, "manufactured", R=50.0, points_per_decade=30, ntheta=40)
    assert sol.extra["manufactured_error"] < 1e-6


def test_outer_zero_rhs(profile):
    sol = solve_outer(profile, "zero", R=50.0, points_per_decade=30, ntheta=40)
    assert np.max(np.abs(sol.h)) == 0.0
    assert sol.norm_ratio == 0.0


def test_outer_decay_certificate(profile):
    sol = solve_outer(profile, "decay", R=100.0, points_per_decade=30, ntheta=40)
    assert sol.certificate
    assert sol.residual < 1e-8
    assert np.isfinite(sol.norm_ratio) and sol.norm_ratio > 0


def test_outer_apply_matches_matrix(profile):
    prob = OuterProblem(profile, 2.0, 40.0, 20, 12)
    rng = np.random.default_rng(5)
    h = np.zeros(prob.mesh.shape)
    h[prob.unknown] = rng.standard_normal(int(prob.unknown.sum()))
    direct = prob.apply(h)[prob.unknown]
    via = prob.matrix @ h[prob.unknown]
    assert np.allclose(direct, via, rtol=1e-6, atol=1e-8 * np.max(np.abs(direct)))
