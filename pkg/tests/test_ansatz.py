import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from bdgkit import ansatz as an
from bdgkit.errors import StencilOutOfDomain
from bdgkit.geometry import Plane, Sphere

H = an.Heteroclinic


def test_heteroclinic_ode():
    z = np.linspace(-10, 10, 401)
    assert np.max(np.abs(H.ddw(z) + an.f(H.w(z)))) < 1e-14
    h = 1e-4
    assert np.max(np.abs((H.w(z + h) - H.w(z - h)) / (2 * h) - H.dw(z))) < 1e-8
    assert np.all(np.isfinite(H.dw(np.array([1e4, -1e4]))))


def test_constants_against_closed_forms():
    # independent oracle: trapezoid on a wide uniform grid in the sech form
    z = np.linspace(-40, 40, 400001)
    s4 = 0.5 / np.cosh(z / np.sqrt(2)) ** 4
    assert np.trapezoid(s4, z) == pytest.approx(an.C0_EXACT, abs=1e-10)
    assert np.trapezoid(z * z * s4, z) == pytest.approx(an.C1_EXACT, abs=1e-10)
    assert an.c0_quadrature() == pytest.approx(2 * np.sqrt(2) / 3, abs=1e-9)
    assert an.c1_quadrature() == pytest.approx(an.C1_EXACT, abs=1e-9)
    assert abs(an.solvability_integral()) < 1e-12


def test_inner_ratio_continuous_at_split():
    for s in (-4.0, 4.0):
        a = an._inner_core(np.array([s])) / H.dw(np.array([s])) ** 2
        b = an._ratio_tail(np.array([s]))
        assert a[0] == pytest.approx(b[0], rel=1e-10)


def test_inner_ratio_matches_quadrature():
    for s in (-6.0, -1.0, 0.5, 3.0, 7.0):
        I, _ = quad(lambda e: e * H.dw(e) ** 2, -60, s, epsabs=1e-13, limit=200)
        assert an.inner_ratio(np.array([s]))[0] == pytest.approx(I / H.dw(s) ** 2, rel=1e-7)


@pytest.fixture(scope="module")
def shape():
    return an.w1_shape()


def test_w1_ode(shape):
    z = np.linspace(-8, 8, 801)
    h = 1e-3
    d2 = (shape(z + h) - 2 * shape(z) + shape(z - h)) / h ** 2
    assert np.max(np.abs(d2 + an.df(H.w(z)) * shape(z) - z * H.dw(z))) < 1e-6
    assert np.allclose(shape(z, 2), d2, atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(-15, 15))
def test_w1_odd_and_bounded(shape, z):
    a = shape(np.array([z]))[0]
    assert a == pytest.approx(-shape(np.array([-z]))[0], abs=1e-12)
    assert abs(a) <= shape.decay_const * np.exp(-shape.decay_rate * abs(z)) * (1 + 1e-12)


def test_w1_orthogonal(shape):
    val, _ = quad(lambda z: shape(np.array([z]))[0] * H.dw(z), -30, 30, limit=200)
    assert abs(val) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5))
def test_cutoff(s):
    c = an.cutoff(np.array([s]))[0]
    assert 0.0 <= c <= 1.0
    if abs(s) <= 1:
        assert c == 1.0
    if abs(s) >= 2:
        assert c == 0.0
    assert c == an.cutoff(np.array([-s]))[0]


def test_params_validation():
    with pytest.raises(ValueError):
        an.AnsatzParams(alpha=1.5)
    with pytest.raises(ValueError):
        an.AnsatzParams(alpha=0.1, theta0=0.1, delta=0.05)


def test_flat_plane_is_exact(shape):
    fld = an.build_ansatz(an.AnsatzParams(alpha=0.1), Plane(), with_w1=True)
    # x₉ above the plane is the +1 phase; far from the origin the collar is wide
    x = np.array([[300.0, 400.0, 0.7], [300.0, 400.0, -2.0], [3.0, 4.0, 5.0]])
    assert np.allclose(fld(x), [np.tanh(0.7 / np.sqrt(2)), np.tanh(-2.0 / np.sqrt(2)), 1.0], atol=1e-14)
    assert abs(an.project_residual(fld, (3.0, 4.0)).value) < 1e-12
    res = an.residual_fermi(fld, np.array([3.0]), np.array([4.0]), np.linspace(-3, 3, 7))
    assert np.max(np.abs(res)) < 1e-12


def test_sphere_projection_identity(shape):
    # on a sphere the projection reduces to c₀H + c₁Σκ³ (+ cross term with w₁)
    for w1 in (False, True):
        fld = an.AnsatzField(an.AnsatzParams(alpha=0.1), Sphere(100.0), with_w1=w1, shape=shape)
        pr = an.project_residual(fld, (30.0, 40.0))
        assert pr.ratio == pytest.approx(1.0, abs=0.01)


def test_fd_and_fermi_residual_agree(shape):
    fld = an.AnsatzField(an.AnsatzParams(alpha=0.1), Sphere(100.0), with_w1=False, shape=shape)
    zb = np.linspace(-2, 2, 5)
    yu, yv = np.full(5, 300.0), np.full(5, 400.0)
    lap, val = an.laplacian_fd(fld, fld.point(yu, yv, zb))
    assert np.allclose(-lap - an.f(val), an.residual_fermi(fld, yu, yv, zb), atol=1e-8)


def test_stencil_domain(shape):
    fld = an.AnsatzField(an.AnsatzParams(alpha=0.1), Plane(), shape=shape)
    with pytest.raises(StencilOutOfDomain):
        an.laplacian_fd(fld, np.array([[0.01, 1.0, 0.0]]))


def test_scaling_slope():
    alphas = np.array([0.2, 0.1, 0.05])
    assert an.scaling_slope(alphas, 3 * alphas ** 2) == pytest.approx(2.0)
