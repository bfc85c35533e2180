import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdgkit.chart import PolarPoint, TSPoint, forward, frame_defects, inverse, inverse_bisect
from bdgkit.errors import OutOfChart
from bdgkit.profile import HALF, QUARTER

radii = st.floats(min_value=0.5, max_value=1e3)
angles = st.floats(min_value=QUARTER + 1e-4, max_value=HALF - 1e-4)


@settings(max_examples=200, deadline=None)
@given(radii, angles)
def test_roundtrip(profile, r, th):
    p = PolarPoint(np.array([r]), np.array([th]))
    back = inverse(forward(p, profile), profile)
    assert back.r[0] == pytest.approx(r, rel=1e-10)
    assert back.theta[0] == pytest.approx(th, rel=1e-10)


def test_t_is_cone(profile):
    r, th = np.array([2.0, 7.0]), np.array([1.0, 1.3])
    q = forward(PolarPoint(r, th), profile)
    assert np.allclose(q.t, r ** 3 * profile.evaluate(th).g, rtol=1e-14)


def test_bisection_agrees(profile):
    rng = np.random.default_rng(1)
    p = PolarPoint(rng.uniform(1, 50, 30), rng.uniform(QUARTER + 0.01, HALF - 0.01, 30))
    q = forward(p, profile)
    a, b = inverse(q, profile), inverse_bisect(q, profile)
    assert np.max(np.abs(a.theta - b.theta)) < 1e-10
    assert np.max(np.abs(a.r / b.r - 1)) < 1e-10


def test_orthogonal_frame(profile):
    rng = np.random.default_rng(2)
    p = PolarPoint(np.exp(rng.uniform(0, 6, 200)), rng.uniform(QUARTER + 1e-3, HALF - 1e-3, 200))
    fd = frame_defects(p, profile, 1e-4)
    assert np.max(np.abs(fd.cosine)) < 1e-5


def test_out_of_chart(profile):
    with pytest.raises(OutOfChart):
        inverse(TSPoint(np.array([-1.0]), np.array([1.0])), profile)
