import numpy as np
import pytest
from phaseless_farfield.geometry.curves import make_curve, quadrature
from phaseless_farfield.geometry.surface import SurfaceProfile, truncated_arc
from phaseless_farfield.utilities.exceptions import InvalidGeometryError
from tests.unit.geometry.sample_data import unit_kite, shifted_circle  # NOQA


def test_kite_extremes(unit_kite):  # NOQA
    """Test to confirm the kite spans x in [-1.4923, 1] and y in [-1.5, 1.5]"""
    points = unit_kite.samples(4096)
    assert abs(points[:, 0].max() - 1.0) < 1e-9
    assert abs(points[:, 0].min() + 1.4923) < 1e-3
    assert abs(points[:, 1].max() - 1.5) < 1e-6
    assert abs(points[:, 1].min() + 1.5) < 1e-6


def test_derivatives_match_finite_differences(unit_kite):  # NOQA
    """Test to confirm p' and p'' agree with centered differences"""
    t = np.linspace(0.1, 6.0, 17)
    step = 1e-5
    p_plus, dp_plus, _ = unit_kite.evaluate(t + step)
    p_minus, dp_minus, _ = unit_kite.evaluate(t - step)
    _, dp, ddp = unit_kite.evaluate(t)
    np.testing.assert_allclose((p_plus - p_minus) / (2 * step), dp, atol=1e-8)
    np.testing.assert_allclose((dp_plus - dp_minus) / (2 * step), ddp, atol=1e-8)


def test_circle_length_and_normals(shifted_circle):  # NOQA
    """Test to confirm the trapezoid rule integrates the circle exactly and normals point outward"""
    rule = quadrature(shifted_circle, 32)
    assert abs(np.sum(rule.weights) - np.pi) < 1e-13
    outward = rule.nodes - shifted_circle.center
    np.testing.assert_allclose(rule.normals, outward / 0.5, atol=1e-13)


def test_spectral_convergence(unit_kite):  # NOQA
    """Test to confirm the kite length converges spectrally in the node count"""
    reference = unit_kite.length(512)
    assert abs(unit_kite.length(128) - reference) < 1e-10
    assert abs(unit_kite.length(256) - reference) < 1e-10


@pytest.mark.parametrize(
    "kind, params, exception",
    [
        ("circle", {"radius": 1.0}, None),
        ("kite", {"scale": 0.5, "center": (0.2, 0.1)}, None),
        ("trig_polynomial", {"a0": 1.0, "cos": (0.2,), "sin": (0.0, 0.1)}, None),
        ("circle", {"radius": 0.0}, InvalidGeometryError),
        ("kite", {"scale": -1.0}, InvalidGeometryError),
        ("trig_polynomial", {"a0": 0.5, "cos": (0.8,)}, InvalidGeometryError),
        ("ellipse", {}, InvalidGeometryError),
    ],
)
def test_make_curve(kind, params, exception):
    """Test to confirm curve construction and rejection of degenerate curves"""
    if exception is None:
        curve = make_curve(kind, params)
        assert curve.kind == kind
    else:
        with pytest.raises(exception):
            make_curve(kind, params)


@pytest.mark.parametrize("N, exception", [(16, None), (64, None), (15, ValueError),
                                          (8, ValueError), (33, ValueError)])
def test_quadrature_node_count(unit_kite, N, exception):  # NOQA
    """Test to confirm the node count must be even and at least 16"""
    if exception is None:
        assert quadrature(unit_kite, N).N == N
    else:
        with pytest.raises(exception):
            quadrature(unit_kite, N)


def test_bump_profile_support_and_smoothness():
    """Test to confirm a bump vanishes outside its support and is positive inside"""
    profile = SurfaceProfile("bump", {"bumps": [{"amplitude": 0.3, "center": 0.0, "width": 1.0}]})
    assert profile.support() == (-1.0, 1.0)
    h, dh, _ = profile.evaluate(np.array([-1.5, -1.0, 0.0, 1.0, 1.5]))
    assert h[0] == h[1] == h[3] == h[4] == 0.0
    assert abs(h[2] - 0.3 * np.exp(-1.0)) < 1e-15
    assert dh[2] == 0.0


def test_truncated_arc_runs_right_to_left():
    """Test to confirm the arc starts at the right end and its normals point upward"""
    profile = SurfaceProfile("bump", {"bumps": [{"amplitude": 0.3, "center": 0.0, "width": 1.0}]})
    arc = truncated_arc(profile, 0.5)
    points, _, _ = arc.evaluate(np.array([0.0, np.pi, 2 * np.pi]))
    np.testing.assert_allclose(points[:, 0], [1.5, 0.0, -1.5], atol=1e-14)
    rule = quadrature(arc, 64, offset=0.5)
    assert np.all(rule.normals[:, 1] > 0)


def test_flat_profile_has_no_arc():
    """Test to confirm truncating a flat profile is rejected"""
    with pytest.raises(InvalidGeometryError):
        truncated_arc(SurfaceProfile(), 1.0)
