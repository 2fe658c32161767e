import pytest
import numpy as np
from phaseless_farfield.data_container.far_field import far_field_matrix
from phaseless_farfield.forward.analytic import sound_soft_disk_far_field
from phaseless_farfield.forward.incident import (
    full_aperture_angles,
    lower_aperture_angles,
    upper_aperture_angles,
)


@pytest.fixture
def shifted_disk_far_field():
    """16 x 16 far field of a disk of radius 0.5 centered at (0.3, -0.2), k = 3"""
    angles = full_aperture_angles(16)
    values = sound_soft_disk_far_field(3.0, 0.5, angles, angles, (0.3, -0.2))
    return far_field_matrix(values, angles, angles, 3.0)


@pytest.fixture
def half_aperture_far_field():
    """Random 6 x 6 values on the mirrored midpoint grids"""
    generator = np.random.default_rng(7)
    values = generator.normal(size=(6, 6)) + 1j * generator.normal(size=(6, 6))
    return far_field_matrix(
        values, upper_aperture_angles(6), lower_aperture_angles(6), 5.0, "half"
    )
