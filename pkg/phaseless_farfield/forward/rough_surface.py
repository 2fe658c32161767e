"""
Sound-soft locally rough surfaces x2 = h(x1), h >= 0 with compact support,
with the reference ball above. The Dirichlet half-plane Green's function
G(x, y) = Phi(x, y) - Phi(x, y') takes care of the flat part, so only the
perturbed part of the surface plus a flat margin carries unknowns.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import xarray as xr

from ..data_container.far_field import far_field_matrix
from ..geometry.curves import quadrature
from ..geometry.scene import Scene, validate_scene
from ..geometry.surface import truncated_arc
from ..special_functions.specfun import as_wavenumber, fundamental_solution_2d
from ..utilities.exceptions import InvalidGeometryError
from .incident import IncidentField, directions
from .kernels import FLAT_TOLERANCE, MIRROR, BoundaryIntegralSystem, DiscreteComponent
from .obstacle import BoundaryDensity

logger = logging.getLogger(__name__)

DEFAULT_SURFACE_NODES = 256


def _check_downward(incident: IncidentField):
    if incident.kind == "point_source":
        raise ValueError("Rough-surface incidence must be made of plane waves")
    for d in incident.directions:
        if d[1] >= 0:
            raise ValueError(f"Incident direction {d} does not point downward")


@dataclass(frozen=True, eq=False)
class ReflectedWave:
    """u^r(x, d) = -exp(ik x.d') with d' the vertical flip of d"""

    incident: IncidentField

    def __post_init__(self):
        _check_downward(self.incident)

    def value(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        k = self.incident.k
        return -sum(np.exp(1j * k * points @ (d * MIRROR)) for d in self.incident.directions)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        k = self.incident.k
        return -sum(
            1j * k * np.exp(1j * k * points @ (d * MIRROR))[:, None] * (d * MIRROR)
            for d in self.incident.directions
        )


@dataclass(frozen=True, eq=False)
class HalfPlaneIncidence:
    """Incident plus reflected wave, which vanishes on the flat line"""

    incident: IncidentField

    def __post_init__(self):
        object.__setattr__(self, "reflected", ReflectedWave(self.incident))

    @property
    def k(self) -> float:
        return self.incident.k

    def value(self, points: np.ndarray) -> np.ndarray:
        return self.incident.value(points) + self.reflected.value(points)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        return self.incident.gradient(points) + self.reflected.gradient(points)

    def normal_derivative(self, points: np.ndarray, normals: np.ndarray) -> np.ndarray:
        return np.sum(self.gradient(points) * normals, axis=-1)


def reflected_wave(incident: IncidentField, boundary_condition: str = "dirichlet") -> ReflectedWave:
    """Wave reflected by the flat line x2 = 0"""
    if boundary_condition != "dirichlet":
        raise ValueError("Only sound-soft surfaces are supported")
    return ReflectedWave(incident)


def half_plane_green(x, y, k) -> complex:
    """G(x, y) = Phi(x, y) - Phi(x, y')"""
    y = np.asarray(y, dtype=float)
    return fundamental_solution_2d(x, y, k) - fundamental_solution_2d(x, y * MIRROR, k)


def rough_surface_system(
    scene: Scene,
    k: float,
    N: int = DEFAULT_SURFACE_NODES,
    margin: Optional[float] = None,
) -> BoundaryIntegralSystem:
    """
    Discretizes the truncated surface and the ball with half-plane kernels

    Args:
        scene(Scene): rough-surface scene
        k(float): wave number
        N(int): nodes on the truncated surface, the ball gets N // 2
        margin(float): flat margin on each side, one wavelength by default

    Returns:
        BoundaryIntegralSystem: the unfactorized system
    """
    if scene.variant != "rough_surface":
        raise InvalidGeometryError(
            f"The rough-surface solver needs a rough_surface scene, got {scene.variant}"
        )
    validate_scene(scene, k).raise_for_errors()
    if margin is None:
        margin = 2 * np.pi / k
    components = []
    if scene.surface is not None and not scene.surface.is_flat:
        arc = truncated_arc(scene.surface, margin)
        rule = quadrature(arc, N, offset=0.5)
        flat = rule.nodes[:, 1] <= FLAT_TOLERANCE
        components.append(
            DiscreteComponent(rule, "dirichlet", coupling=k, evaluator=arc, flat=flat)
        )
    if scene.ball is not None:
        components.append(
            DiscreteComponent(
                quadrature(scene.ball.curve(), max(N // 2, 64)), "dirichlet", coupling=k,
                evaluator=scene.ball.curve(),
            )
        )
    logger.debug(
        f"Rough-surface system with {len(components)} components, margin {margin:.3f}"
    )
    return BoundaryIntegralSystem(k, components, half_plane=True)


def solve_rough(
    scene: Scene,
    incident: IncidentField,
    N: int = DEFAULT_SURFACE_NODES,
    margin: Optional[float] = None,
) -> BoundaryDensity:
    """
    Density on the truncated surface and the ball for a downward incidence

    Args:
        scene(Scene): rough-surface scene
        incident(IncidentField): downward plane wave or superposition
        N(int): surface nodes
        margin(float): flat margin of the truncated surface

    Returns:
        BoundaryDensity: densities, background u^i + u^r
    """
    _check_downward(incident)
    system = rough_surface_system(scene, incident.k, N, margin)
    background = HalfPlaneIncidence(incident)
    values = system.solve(system.right_hand_side([background])[:, 0])
    return BoundaryDensity(values, incident.k, scene, system, background.value)


def far_field_rough(density: BoundaryDensity, obs_angles) -> np.ndarray:
    """Far field on upward observation directions"""
    obs = directions(obs_angles)
    if np.any(obs[:, 1] <= 0):
        raise ValueError("Rough-surface far fields are observed on upward directions only")
    return density.system.far_field_operator(obs) @ density.values


def multistatic_rough(
    scene: Scene,
    k,
    obs_angles,
    inc_angles,
    N: int = DEFAULT_SURFACE_NODES,
    margin: Optional[float] = None,
    threads: int = 1,
) -> xr.DataArray:
    """
    Far-field matrix on the half apertures, observation upward and
    incidence downward

    Args:
        scene(Scene): rough-surface scene
        k: wave number
        obs_angles: observation angles in (0, pi)
        inc_angles: incident angles in (pi, 2pi)
        N(int): surface nodes
        margin(float): flat margin of the truncated surface
        threads(int): worker threads for the back substitutions

    Returns:
        xr.DataArray: far-field matrix with aperture "half"
    """
    k = as_wavenumber(k)
    obs_angles = np.asarray(obs_angles, dtype=float)
    inc_angles = np.asarray(inc_angles, dtype=float)
    obs = directions(obs_angles)
    if np.any(obs[:, 1] <= 0):
        raise ValueError("Observation directions must point upward")
    system = rough_surface_system(scene, k, N, margin)
    incidents = [
        HalfPlaneIncidence(IncidentField.plane_wave(d, k)) for d in directions(inc_angles)
    ]
    densities = system.solve(system.right_hand_side(incidents), threads=threads)
    values = system.far_field_operator(obs) @ densities
    logger.info(
        f"Rough-surface far field of scene {scene.name or scene.variant} on "
        f"{len(obs_angles)}x{len(inc_angles)} directions at k={k}"
    )
    return far_field_matrix(values, obs_angles, inc_angles, k, "half")
