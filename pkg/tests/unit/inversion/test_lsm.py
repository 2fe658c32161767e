import numpy as np
import pytest
from phaseless_farfield.data_container.far_field import with_values
from phaseless_farfield.inversion.lsm import (
    LSMOperator,
    indicator_map,
    lsm_solve,
    probe_ratio,
    superlevel_contains,
)
from phaseless_farfield.utilities.exceptions import DegenerateOperatorError
from tests.unit.inversion.sample_data import (  # NOQA
    DISK_CENTER,
    small_disk,
    off_center_disk,
    random_half_aperture,
)


@pytest.mark.parametrize("noise_level", [0.0, 0.01])
def test_unimodular_gauge_does_not_change_the_indicator(small_disk, noise_level):  # NOQA
    """Test to confirm ||g_z|| is invariant under F -> exp(i theta) F"""
    rotated = with_values(small_disk, small_disk.values * np.exp(0.7j))
    norm, _, _ = lsm_solve(small_disk, (0.1, 0.2), noise_level)
    rotated_norm, _, _ = lsm_solve(rotated, (0.1, 0.2), noise_level)
    assert abs(norm - rotated_norm) / norm < 1e-10


def test_ball_is_localized_at_its_center(off_center_disk):  # NOQA
    """Test to confirm the probe ratio favours the true center of a lone disk"""
    assert probe_ratio(off_center_disk, (2.2, 1.3)) > 2.0


def test_exact_data_keep_the_support_small(off_center_disk):  # NOQA
    """Test to confirm ||g_z|| stays small on the disk and large off it for exact data"""
    inside, alpha, _ = lsm_solve(off_center_disk, (2.2, 1.3), 0.0)
    outside, _, _ = lsm_solve(off_center_disk, (-2.2, -1.3), 0.0)
    assert 2 * inside < outside
    floored, floored_alpha, _ = lsm_solve(off_center_disk, (2.2, 1.3), 1e-8)
    assert floored == inside and floored_alpha == alpha


@pytest.mark.parametrize("field", ["off_center_disk", "small_disk", "random_half_aperture"])
def test_conjugation_inverts_the_probe_ratio(request, field):
    """Test to confirm conjugating F exchanges the indicator at b and -b"""
    F = request.getfixturevalue(field)
    conjugate = with_values(F, np.conj(F.values))
    b = (2.2, 1.3)
    assert abs(probe_ratio(F, b) * probe_ratio(conjugate, b) - 1) < 1e-8


def test_origin_probe_is_rejected(small_disk):  # NOQA
    """Test to confirm b = 0 cannot be compared with its reflection"""
    with pytest.raises(ValueError):
        probe_ratio(small_disk, (0.0, 0.0))


def test_zero_far_field_is_degenerate(small_disk):  # NOQA
    """Test to confirm a vanishing far-field operator is refused"""
    with pytest.raises(DegenerateOperatorError):
        lsm_solve(with_values(small_disk, np.zeros((32, 32))), (0.1, 0.1))


def test_regularization_grows_with_noise(small_disk):  # NOQA
    """Test to confirm the discrepancy principle picks larger parameters for noisier data"""
    _, low, _ = lsm_solve(small_disk, (0.1, 0.2), 0.01)
    _, high, _ = lsm_solve(small_disk, (0.1, 0.2), 0.1)
    assert high >= low > 0


def test_indicator_map_layout(small_disk):  # NOQA
    """Test to confirm the indicator raster, its attributes and thread independence"""
    single = indicator_map(small_disk, (-2, 2), (-1, 1), (9, 5))
    threaded = indicator_map(small_disk, (-2, 2), (-1, 1), (9, 5), threads=3)
    assert single["indicator"].dims == ("y", "x")
    assert single["indicator"].shape == (5, 9)
    assert single.attrs == {"k": 3.0, "aperture": "full", "noise_level": 0.0}
    np.testing.assert_allclose(single["indicator"].values, threaded["indicator"].values, rtol=1e-10)
    assert np.all(single["discrepancy"].values >= 0)


def test_indicator_peaks_on_the_disk(small_disk):  # NOQA
    """Test to confirm the superlevel set contains the disk center and not a far corner"""
    indicator = indicator_map(small_disk, (-2, 2), (-2, 2), (21, 21))
    assert superlevel_contains(indicator, DISK_CENTER)
    assert not superlevel_contains(indicator, (1.8, 1.8))


def test_half_aperture_test_function_vanishes_on_the_line(random_half_aperture):  # NOQA
    """Test to confirm the mirrored test far field is zero for probes on x2 = 0"""
    operator = LSMOperator.from_far_field(random_half_aperture)
    values = operator.test_far_fields(np.array([[0.7, 0.0], [0.7, 0.4]]))
    assert np.max(np.abs(values[:, 0])) < 1e-15
    assert np.max(np.abs(values[:, 1])) > 1e-3
