import numpy as np
import pytest
from phaseless_farfield.forward.solver_factory import (
    ConcreteMediumFactory,
    ConcreteObstacleFactory,
    ConcreteRoughSurfaceFactory,
    scattering_factory,
)
from phaseless_farfield.geometry.scenes import builtin_scene


@pytest.mark.parametrize(
    "variant, factory_type, aperture, exception",
    [
        ("obstacle", ConcreteObstacleFactory, "full", None),
        ("medium", ConcreteMediumFactory, "full", None),
        ("rough_surface", ConcreteRoughSurfaceFactory, "half", None),
        ("waveguide", None, None, KeyError),
    ],
)
def test_factory_registry(variant, factory_type, aperture, exception):
    """Test to confirm each scene variant resolves to its registered solver"""
    if exception is None:
        factory = scattering_factory(variant)
        assert isinstance(factory, factory_type)
        assert factory.aperture == aperture
    else:
        with pytest.raises(exception):
            scattering_factory(variant)


def test_grids_with_separate_counts():
    """Test to confirm observation and incidence counts can differ"""
    obs, inc = scattering_factory("rough_surface").create_grids(8, 4)
    assert len(obs) == 8 and len(inc) == 4
    assert np.all(obs < np.pi) and np.all(inc > np.pi)
    obs, inc = scattering_factory("obstacle").create_grids(8)
    np.testing.assert_array_equal(obs, inc)


def test_far_field_through_factory():
    """Test to confirm the factory labels the far field with its grids and aperture"""
    F = scattering_factory("rough_surface").create_far_field(
        builtin_scene("bump_ball"), 5.0, 8, 6, resolution=128
    )
    assert F.shape == (8, 6)
    assert F.attrs["aperture"] == "half"
    assert F.attrs["k"] == 5.0
