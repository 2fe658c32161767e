import pytest
from phaseless_farfield.forward.incident import full_aperture_angles
from phaseless_farfield.forward.obstacle import multistatic
from phaseless_farfield.geometry.scenes import builtin_scene


@pytest.fixture
def angles_16():
    return full_aperture_angles(16)


@pytest.fixture(scope="module")
def kite_ball_far_field():
    """32 x 32 far field of the golden kite scene at k = 5"""
    angles = full_aperture_angles(32)
    return multistatic(builtin_scene("kite_ball"), 5.0, angles, angles, 128)
