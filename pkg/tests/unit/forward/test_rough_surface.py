import numpy as np
import pytest
from phaseless_farfield.forward.incident import (
    IncidentField,
    direction,
    lower_aperture_angles,
    upper_aperture_angles,
)
from phaseless_farfield.forward.rough_surface import (
    far_field_rough,
    half_plane_green,
    multistatic_rough,
    reflected_wave,
    solve_rough,
)
from phaseless_farfield.geometry.scenes import builtin_scene


def test_half_plane_green_vanishes_on_the_line():
    """Test to confirm the image Green's function is zero on x2 = 0 and symmetric"""
    x, y = np.array([0.3, 0.0]), np.array([-0.2, 0.7])
    assert half_plane_green(x, y, 5.0) == 0
    z = np.array([1.1, 0.4])
    assert abs(half_plane_green(z, y, 5.0) - half_plane_green(y, z, 5.0)) < 1e-14


def test_reflected_wave_cancels_on_the_line():
    """Test to confirm incident plus reflected plane wave vanishes on the flat line"""
    incident = IncidentField.plane_wave(direction(lower_aperture_angles(5)[1]), 5.0)
    reflected = reflected_wave(incident)
    points = np.stack([np.linspace(-3, 3, 11), np.zeros(11)], axis=-1)
    assert np.max(np.abs(incident.value(points) + reflected.value(points))) < 1e-14


@pytest.mark.parametrize(
    "d, boundary_condition, exception",
    [
        ((0.0, -1.0), "dirichlet", None),
        ((0.0, 1.0), "dirichlet", ValueError),
        ((0.0, -1.0), "neumann", ValueError),
    ],
)
def test_reflected_wave_arguments(d, boundary_condition, exception):
    """Test to confirm only downward incidence on sound-soft surfaces is reflected"""
    incident = IncidentField.plane_wave(d, 5.0)
    if exception is None:
        assert reflected_wave(incident, boundary_condition).incident is incident
    else:
        with pytest.raises(exception):
            reflected_wave(incident, boundary_condition)


def test_single_solve_matches_multistatic():
    """Test to confirm one rough-surface solve reproduces a column of the far-field matrix"""
    scene = builtin_scene("bump_ball")
    obs, inc = upper_aperture_angles(8), lower_aperture_angles(6)
    F = multistatic_rough(scene, 5.0, obs, inc, 128)
    density = solve_rough(scene, IncidentField.plane_wave(direction(inc[2]), 5.0), 128)
    column = far_field_rough(density, obs)
    assert np.max(np.abs(column - F.values[:, 2])) < 1e-10 * np.max(np.abs(F.values))
    with pytest.raises(ValueError):
        far_field_rough(density, lower_aperture_angles(4))
