"""Factories that bind a scene variant to its forward solver and grids"""
import logging
from abc import abstractmethod
from typing import Optional, Tuple

import numpy as np
import xarray as xr

from ..geometry.scene import Scene
from ..utilities.general_utilities import AbstractFactory, register_factory
from .incident import full_aperture_angles, lower_aperture_angles, upper_aperture_angles
from .medium import DEFAULT_CELLS_PER_WAVELENGTH, multistatic_medium
from .obstacle import DEFAULT_NODES, multistatic
from .rough_surface import DEFAULT_SURFACE_NODES, multistatic_rough

logger = logging.getLogger(__name__)


class ScatteringFactory(AbstractFactory):
    """
    Abstract factory to generate the forward model per scene variant
    """

    aperture = "full"
    default_resolution = None

    @staticmethod
    @abstractmethod
    def create_grids(
        obs_count: int, inc_count: Optional[int] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Observation and incident angles on which the variant is measured,
        inc_count defaults to obs_count
        """
        pass

    @abstractmethod
    def create_far_field(
        self, scene: Scene, k: float, obs_count: int, inc_count: Optional[int] = None,
        resolution=None, threads: int = 1,
    ) -> xr.DataArray:
        """
        Far-field matrix of the scene on the variant's grids
        """
        pass


@register_factory("scattering")
class ConcreteObstacleFactory(ScatteringFactory):
    """Boundary integral solver for impenetrable obstacles"""

    default_resolution = DEFAULT_NODES

    @staticmethod
    def create_grids(obs_count, inc_count=None):
        return full_aperture_angles(obs_count), full_aperture_angles(inc_count or obs_count)

    def create_far_field(self, scene, k, obs_count, inc_count=None, resolution=None, threads=1):
        obs, inc = self.create_grids(obs_count, inc_count)
        return multistatic(
            scene, k, obs, inc, resolution or self.default_resolution, threads
        )


@register_factory("scattering")
class ConcreteMediumFactory(ScatteringFactory):
    """Lippmann-Schwinger solver, resolution in cells per wavelength"""

    default_resolution = DEFAULT_CELLS_PER_WAVELENGTH

    @staticmethod
    def create_grids(obs_count, inc_count=None):
        return full_aperture_angles(obs_count), full_aperture_angles(inc_count or obs_count)

    def create_far_field(self, scene, k, obs_count, inc_count=None, resolution=None, threads=1):
        obs, inc = self.create_grids(obs_count, inc_count)
        return multistatic_medium(
            scene, k, obs, inc, resolution or self.default_resolution, threads
        )


@register_factory("scattering")
class ConcreteRoughSurfaceFactory(ScatteringFactory):
    """Half-plane boundary integral solver, upward observation and downward incidence"""

    aperture = "half"
    default_resolution = DEFAULT_SURFACE_NODES

    @staticmethod
    def create_grids(obs_count, inc_count=None):
        return upper_aperture_angles(obs_count), lower_aperture_angles(inc_count or obs_count)

    def create_far_field(self, scene, k, obs_count, inc_count=None, resolution=None, threads=1):
        obs, inc = self.create_grids(obs_count, inc_count)
        return multistatic_rough(
            scene, k, obs, inc, resolution or self.default_resolution, threads=threads
        )


def scattering_factory(variant: str) -> ScatteringFactory:
    """The registered factory for a scene variant"""
    builders = AbstractFactory.get_builders()["scattering"]
    try:
        return builders[variant]()
    except KeyError:
        raise KeyError(
            f"No forward solver registered for {variant}, choose one of {sorted(builders)}"
        )
