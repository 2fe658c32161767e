import numpy as np
import pytest
from phaseless_farfield.data_container.phaseless import (
    dataset_gap,
    invariance_gap,
    synthesize_dataset,
    translate_farfield,
    triangle_violation,
)
from tests.unit.data_container.sample_data import shifted_disk_far_field  # NOQA


def test_dataset_layout(shifted_disk_far_field):  # NOQA
    """Test to confirm the three moduli and their attributes"""
    d0 = float(shifted_disk_far_field["incidence"][3])
    dataset = synthesize_dataset(shifted_disk_far_field, d0)
    values = shifted_disk_far_field.values
    np.testing.assert_array_equal(dataset["mod_single"].values, np.abs(values))
    np.testing.assert_array_equal(dataset["mod_ref"].values, np.abs(values[:, 3]))
    np.testing.assert_allclose(dataset["mod_super"].values[:, 3], 2 * np.abs(values[:, 3]))
    assert dataset.attrs["d0_index"] == 3
    assert dataset.attrs["aperture"] == "full"
    assert dataset.attrs["seed"] == -1


def test_triangle_inequalities_hold(shifted_disk_far_field):  # NOQA
    """Test to confirm exact data satisfy both triangle inequalities"""
    dataset = synthesize_dataset(shifted_disk_far_field, 0.0)
    assert triangle_violation(dataset) < 1e-12


def test_noise_is_seeded_and_bounded(shifted_disk_far_field):  # NOQA
    """Test to confirm noise is reproducible and stays within 1 +- eps"""
    first = synthesize_dataset(shifted_disk_far_field, 0.0, 0.05, seed=11)
    second = synthesize_dataset(shifted_disk_far_field, 0.0, 0.05, seed=11)
    exact = synthesize_dataset(shifted_disk_far_field, 0.0)
    assert dataset_gap(first, second) == 0.0
    ratio = first["mod_single"].values / exact["mod_single"].values
    assert np.all(np.abs(ratio - 1) <= 0.05 + 1e-15)
    assert dataset_gap(first, exact) > 0


@pytest.mark.parametrize("noise_level", [-0.1, 1.0, 2.0])
def test_noise_level_range(shifted_disk_far_field, noise_level):  # NOQA
    """Test to confirm noise levels outside [0, 1) are rejected"""
    with pytest.raises(ValueError):
        synthesize_dataset(shifted_disk_far_field, 0.0, noise_level)


def test_single_moduli_ignore_translation(shifted_disk_far_field):  # NOQA
    """Test to confirm translating the scene leaves |F| unchanged"""
    assert invariance_gap(shifted_disk_far_field, (0.4, 0.1), 0.0, superposition=False) < 1e-13


def test_superposition_moduli_see_translation(shifted_disk_far_field):  # NOQA
    """Test to confirm superposition data distinguish translated scenes"""
    assert invariance_gap(shifted_disk_far_field, (0.4, 0.1), 0.0) > 1e-2


def test_translation_composes(shifted_disk_far_field):  # NOQA
    """Test to confirm shifting by z and then -z restores the far field"""
    back = translate_farfield(translate_farfield(shifted_disk_far_field, (0.4, 0.1)), (-0.4, -0.1))
    np.testing.assert_allclose(back.values, shifted_disk_far_field.values, atol=1e-14)
