import numpy as np
import pytest

from bdgkit.chart import PolarPoint
from bdgkit.curvature import (Perturbation, a_expansion, appendix_h2_h3, check_supersolution,
                              expansion_factor, fit_a0, h0_axis, h0_closed_form,
                              mean_curvature_closed, mean_curvature_f0, mean_curvature_uv,
                              sector_grid, threshold_radius)
from bdgkit.geometry import BlockSymmetric, ProfileSurface
from bdgkit.profile import HALF


def test_h0_axis_value(profile):
    r = np.array([1.0, 2.0, 5.0])
    val = h0_closed_form(PolarPoint(r, np.full(3, HALF)), profile)
    assert np.allclose(val, 2 / 27 * r ** -7, rtol=1e-10)
    assert np.allclose(h0_axis(r), val, rtol=1e-10)


def test_f0_is_minimal(profile):
    R, TH = sector_grid(5.0, 200.0, 40, 16)
    H = mean_curvature_closed(PolarPoint(R, TH), profile)
    assert np.min(H) >= -1e-8
    # the cone is minimal only asymptotically: H = O(r⁻⁵)
    peak = np.max(np.abs(H) * R ** 5, axis=1)
    assert peak[-1] < 2 * peak[len(peak) // 2]


def test_axis_regular_route(profile):
    r = np.array([5.0, 20.0])
    H = mean_curvature_f0(PolarPoint(r, np.full(2, HALF)), profile)
    assert np.all(np.isfinite(H))


def test_expansion_matches_closed_form(profile):
    p = PolarPoint(np.array([4.0, 10.0, 30.0]), np.array([1.0, 1.2, 1.45]))
    pert = Perturbation("tilde_F0", 0.2)
    ex = a_expansion(p, profile, pert)
    for A in (0.05, 0.3):
        direct = mean_curvature_closed(p, profile, pert, A)
        assert np.allclose(expansion_factor(p, profile, pert, A) * ex.total(A), direct, rtol=1e-7)


def test_closed_form_matches_divergence_fd(profile):
    surf = BlockSymmetric(ProfileSurface(profile))
    r, th = np.array([3.0, 8.0]), np.array([1.0, 1.3])
    u, v = r * np.cos(th), r * np.sin(th)
    pert = Perturbation("const", 0.2)
    surf_p = BlockSymmetric(ProfileSurface(profile, pert, 0.5))
    F = lambda a, b: surf_p.derivs(a, b).val  # noqa: E731
    H = mean_curvature_closed(PolarPoint(r, th), profile, pert, 0.5)
    e1 = np.abs(mean_curvature_uv(F, u, v, 2e-2) - H)
    e2 = np.abs(mean_curvature_uv(F, u, v, 1e-2) - H)
    assert np.all(np.log2(e1 / e2) > 1.8)
    assert surf.derivs(u, v).val.shape == u.shape


def test_appendix_against_cubic_fit(profile):
    # cubic fit in A of the exact mean curvature is the oracle
    p = PolarPoint(np.array([3.0, 20.0]), np.array([1.2, 1.4]))
    pert = Perturbation("tilde_F0", 0.2)
    amps = np.array([-0.2, -0.1, 0.0, 0.1, 0.2])
    vals = np.array([mean_curvature_closed(p, profile, pert, a) / expansion_factor(p, profile, pert, a)
                     for a in amps])
    coef = np.linalg.lstsq(np.vander(amps, 4, increasing=True), vals, rcond=None)[0]
    h2, h3 = appendix_h2_h3(p, profile, 0.2)
    assert np.allclose(h2, coef[2], rtol=1e-6)
    assert np.allclose(h3, coef[3], rtol=1e-6)


@pytest.mark.parametrize("kind", ["tilde_F0", "const", "tanh"])
def test_supersolutions(profile, kind):
    a0 = fit_a0(profile, kind, 0.2, 10.0, 500.0)
    rep = check_supersolution(profile, kind, 0.2, 10.0, threshold_radius(kind, a0, 10.0, 0.2), 500.0)
    assert rep.verdict
    assert rep.routes_agree


def test_tanh_fails_below_threshold(profile):
    # far inside the threshold the perturbation dominates and the sign flips somewhere
    rep = check_supersolution(profile, "tanh", 0.2, 10.0, 0.05, 0.5, n_r=8, n_theta=8)
    assert rep.extra["max_value"] != rep.extra["min_value"]
