import numpy as np
import pytest
from phaseless_farfield.data_container.far_field import (
    far_field_matrix,
    grid_index,
    pairing_indices,
    reciprocal,
    reciprocity_gap,
    with_values,
)
from phaseless_farfield.forward.incident import full_aperture_angles, upper_aperture_angles
from phaseless_farfield.utilities.exceptions import GridMisalignmentError
from tests.unit.data_container.sample_data import (  # NOQA
    shifted_disk_far_field,
    half_aperture_far_field,
)


@pytest.mark.parametrize(
    "values, obs, inc, aperture, exception",
    [
        (np.ones((4, 4)), full_aperture_angles(4), full_aperture_angles(4), "full", None),
        (np.ones((4, 3)), full_aperture_angles(4), full_aperture_angles(4), "full", ValueError),
        (np.ones((2, 2)), [1.0, 0.5], [0.0, 1.0], "full", ValueError),
        (np.full((2, 2), np.nan), [0.0, 1.0], [0.0, 1.0], "full", ValueError),
        (np.ones((2, 2)), [0.0, 1.0], [0.0, 1.0], "quarter", ValueError),
    ],
)
def test_far_field_matrix_validation(values, obs, inc, aperture, exception):
    """Test to confirm shapes, ordering, finiteness and aperture are checked"""
    if exception is None:
        F = far_field_matrix(values, obs, inc, 2.0, aperture)
        assert F.dtype == complex
        assert F.attrs == {"k": 2.0, "aperture": "full"}
    else:
        with pytest.raises(exception):
            far_field_matrix(values, obs, inc, 2.0, aperture)


def test_full_pairing_maps_to_opposite_directions():
    """Test to confirm the full-aperture pairing sends each angle to its opposite"""
    angles = full_aperture_angles(8)
    pm, pn = pairing_indices(angles, angles, "full")
    np.testing.assert_array_equal(pm, [4, 5, 6, 7, 0, 1, 2, 3])
    np.testing.assert_array_equal(pn[pm], np.arange(8))


def test_half_pairing_is_identity(half_aperture_far_field):  # NOQA
    """Test to confirm -d of a downward midpoint direction is the upward one of the same index"""
    pm, pn = pairing_indices(*[half_aperture_far_field[d].values
                               for d in ("observation", "incidence")], "half")
    np.testing.assert_array_equal(pm, np.arange(6))
    np.testing.assert_array_equal(pn, np.arange(6))


@pytest.mark.parametrize(
    "obs, inc, aperture",
    [
        (full_aperture_angles(8), full_aperture_angles(6), "full"),
        (full_aperture_angles(7), full_aperture_angles(7), "full"),
        (full_aperture_angles(8) + 0.1, full_aperture_angles(8) + 0.1, "full"),
        (upper_aperture_angles(4), upper_aperture_angles(4), "half"),
    ],
)
def test_pairing_needs_aligned_grids(obs, inc, aperture):
    """Test to confirm grids without a reciprocity partner are rejected"""
    with pytest.raises(GridMisalignmentError):
        pairing_indices(obs, inc, aperture)


def test_analytic_disk_is_reciprocal(shifted_disk_far_field):  # NOQA
    """Test to confirm the shifted disk series satisfies reciprocity"""
    assert reciprocity_gap(shifted_disk_far_field) < 1e-12


def test_reciprocal_is_an_involution(half_aperture_far_field):  # NOQA
    """Test to confirm pairing twice gives the matrix back"""
    once = with_values(half_aperture_far_field, reciprocal(half_aperture_far_field))
    np.testing.assert_array_equal(reciprocal(once), half_aperture_far_field.values)
    assert reciprocity_gap(half_aperture_far_field) > 0.1


@pytest.mark.parametrize(
    "angle, expected, exception",
    [(0.0, 0, None), (np.pi, 4, None), (2 * np.pi, 0, None), (-np.pi / 4, 7, None),
     (0.1, None, GridMisalignmentError)],
)
def test_grid_index(angle, expected, exception):
    """Test to confirm angles are located on the grid modulo 2pi"""
    angles = full_aperture_angles(8)
    if exception is None:
        assert grid_index(angles, angle) == expected
    else:
        with pytest.raises(exception):
            grid_index(angles, angle)
