import pytest
import numpy as np
from phaseless_farfield.data_container.far_field import far_field_matrix
from phaseless_farfield.forward.analytic import sound_soft_disk_far_field
from phaseless_farfield.forward.incident import (
    full_aperture_angles,
    lower_aperture_angles,
    upper_aperture_angles,
)


DISK_CENTER = (0.3, -0.2)


@pytest.fixture
def small_disk():
    """Disk of radius 0.5 centered at DISK_CENTER, k = 3, 32 x 32"""
    angles = full_aperture_angles(32)
    values = sound_soft_disk_far_field(3.0, 0.5, angles, angles, DISK_CENTER)
    return far_field_matrix(values, angles, angles, 3.0)


@pytest.fixture
def off_center_disk():
    """Disk of radius 0.3 centered at (2.2, 1.3), k = 3, 32 x 32"""
    angles = full_aperture_angles(32)
    values = sound_soft_disk_far_field(3.0, 0.3, angles, angles, (2.2, 1.3))
    return far_field_matrix(values, angles, angles, 3.0)


@pytest.fixture
def random_half_aperture():
    generator = np.random.default_rng(3)
    values = generator.normal(size=(8, 8)) + 1j * generator.normal(size=(8, 8))
    return far_field_matrix(values, upper_aperture_angles(8), lower_aperture_angles(8), 5.0,
                            "half")
