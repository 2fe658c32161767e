"""Exterior Dirichlet/impedance scattering by obstacle scenes"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import xarray as xr

from ..data_container.far_field import far_field_matrix, grid_index, grids
from ..geometry.curves import quadrature
from ..geometry.scene import Scene, validate_scene
from ..special_functions.specfun import as_wavenumber
from ..utilities.exceptions import InvalidGeometryError
from .incident import IncidentField, directions
from .kernels import FLAT_TOLERANCE, BoundaryIntegralSystem, DiscreteComponent

logger = logging.getLogger(__name__)

DEFAULT_NODES = 128


@dataclass(frozen=True, eq=False)
class BoundaryDensity:
    """
    Nodal densities of all components, stacked in scene order. values is a
    vector for one incident field or a (size, columns) matrix.
    """

    values: np.ndarray
    k: float
    scene: Scene
    system: BoundaryIntegralSystem
    background: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        if self.values.shape[0] != self.system.size:
            raise ValueError(
                f"Density of length {self.values.shape[0]} does not match "
                f"{self.system.size} nodes"
            )

    def component(self, index: int) -> np.ndarray:
        return self.values[self.system.block(index)]


def obstacle_system(scene: Scene, k: float, N: int = DEFAULT_NODES) -> BoundaryIntegralSystem:
    """
    Discretizes obstacle scene components, ball included

    Args:
        scene(Scene): obstacle scene
        k(float): wave number
        N(int): nodes per component

    Returns:
        BoundaryIntegralSystem: the unfactorized system
    """
    if scene.variant != "obstacle":
        raise InvalidGeometryError(
            f"The obstacle solver needs an obstacle scene, got {scene.variant}"
        )
    validate_scene(scene, k).raise_for_errors()
    components = []
    for component in scene.components():
        rule = quadrature(component.curve, N)
        if component.boundary_condition == "impedance":
            components.append(
                DiscreteComponent(
                    rule, "impedance", impedance=component.impedance_at(N),
                    evaluator=component.curve,
                )
            )
        else:
            components.append(
                DiscreteComponent(rule, "dirichlet", coupling=k, evaluator=component.curve)
            )
    return BoundaryIntegralSystem(k, components)


def solve_direct(
    scene: Scene,
    incident: IncidentField,
    N: int = DEFAULT_NODES,
    system: Optional[BoundaryIntegralSystem] = None,
) -> BoundaryDensity:
    """
    Solves the boundary integral equation for one incident field

    Args:
        scene(Scene): obstacle scene
        incident(IncidentField): plane wave, superposition or point source
        N(int): nodes per component
        system(BoundaryIntegralSystem): reuse an already factorized system

    Returns:
        BoundaryDensity: densities on all components
    """
    k = incident.k
    if system is None:
        system = obstacle_system(scene, k, N)
    rhs = system.right_hand_side([incident])[:, 0]
    values = system.solve(rhs)
    return BoundaryDensity(values, k, scene, system, incident.value)


def far_field(density: BoundaryDensity, obs_angles) -> np.ndarray:
    """Far field samples at the observation angles"""
    operator = density.system.far_field_operator(directions(obs_angles))
    return operator @ density.values


def scattered_field(density: BoundaryDensity, points: np.ndarray) -> np.ndarray:
    """u^s at points away from every boundary"""
    operator = density.system.field_operator(np.atleast_2d(points))
    return operator @ density.values


def boundary_residual(density: BoundaryDensity) -> float:
    """
    max |u^b + u^s| over off-node points of the Dirichlet components, u^b
    the background field (incident, plus reflected wave over a half-plane)
    """
    residual = 0.0
    for index, component in enumerate(density.system.components):
        if component.condition != "dirichlet":
            continue
        points, operator = density.system.boundary_trace_operator(index)
        keep = points[:, 1] > FLAT_TOLERANCE if density.system.half_plane else \
            np.ones(len(points), dtype=bool)
        if not np.any(keep):
            continue
        total = density.background(points[keep]) + operator[keep] @ density.values
        residual = max(residual, float(np.max(np.abs(total))))
    logger.debug(f"Boundary residual {residual:.3e}")
    return residual


def multistatic(
    scene: Scene,
    k,
    obs_angles,
    inc_angles,
    N: int = DEFAULT_NODES,
    threads: int = 1,
) -> xr.DataArray:
    """
    Far-field matrix F[m, n] = u^inf(x_m, d_n) over full-aperture grids,
    one factorization shared by all incident directions

    Args:
        scene(Scene): obstacle scene
        k: wave number
        obs_angles: observation angles on [0, 2pi)
        inc_angles: incident angles on [0, 2pi)
        N(int): nodes per component
        threads(int): worker threads for the back substitutions

    Returns:
        xr.DataArray: the far-field matrix
    """
    k = as_wavenumber(k)
    obs_angles = np.asarray(obs_angles, dtype=float)
    inc_angles = np.asarray(inc_angles, dtype=float)
    system = obstacle_system(scene, k, N)
    incidents = [IncidentField.plane_wave(d, k) for d in directions(inc_angles)]
    densities = system.solve(system.right_hand_side(incidents), threads=threads)
    values = system.far_field_operator(directions(obs_angles)) @ densities
    logger.info(
        f"Far field of scene {scene.name or scene.variant} on "
        f"{len(obs_angles)}x{len(inc_angles)} directions at k={k}, "
        f"condition estimate {system.condition_estimate:.2e}"
    )
    return far_field_matrix(values, obs_angles, inc_angles, k, "full")


def optical_theorem_gap(F: xr.DataArray) -> np.ndarray:
    """
    Per incident direction, the energy balance
    int |u^inf(., d)|^2 + sqrt(8 pi / k) Re(exp(i pi/4) u^inf(d, d)),
    relative to the largest forward term. Zero for non-absorbing
    boundaries, negative when the boundary absorbs.

    Args:
        F(xr.DataArray): far-field matrix with a uniform full observation \
            grid containing every incident angle

    Returns:
        np.ndarray: relative gap per incident direction
    """
    obs, inc = grids(F)
    k = F.attrs["k"]
    values = F.values
    scattered_energy = 2 * np.pi / len(obs) * np.sum(np.abs(values) ** 2, axis=0)
    forward = np.array(
        [values[grid_index(obs, angle), n] for n, angle in enumerate(inc)]
    )
    extinction = -np.sqrt(8 * np.pi / k) * np.real(np.exp(1j * np.pi / 4) * forward)
    scale = max(float(np.max(np.abs(extinction))), np.finfo(float).tiny)
    return (scattered_energy - extinction) / scale
