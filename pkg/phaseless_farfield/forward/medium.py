"""
Lippmann-Schwinger solver for the inhomogeneous medium problem

    u(x) = u^i(x) + k^2 int Phi(x, y) m(y) u(y) dy,    m = n - 1

collocated at the cell centers of a uniform grid covering the unknown
medium and the reference ball. Off-diagonal cells use the midpoint rule,
the self cell the exact integral of Phi over the disk of equal area. The
block Toeplitz operator is applied by FFT convolution on the doubled grid
and inverted with restarted GMRES.

Cells cut by an interface average the contrast over a finer sub-grid.
Far-field matrices are Richardson-extrapolated between h and h/2, which
cancels the h^2 term of the midpoint rule.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import xarray as xr
from scipy import ndimage, special
from scipy.sparse.linalg import LinearOperator, gmres

from ..data_container.far_field import far_field_matrix
from ..geometry.scene import Scene, validate_scene
from ..special_functions.specfun import as_wavenumber, far_field_constant
from ..utilities.exceptions import InvalidGeometryError, NonConvergenceError
from ..utilities.general_utilities import map_in_threads
from .incident import IncidentField, directions

logger = logging.getLogger(__name__)

DEFAULT_CELLS_PER_WAVELENGTH = 64
SUPERSAMPLING = 8
INTERFACE_SUPERSAMPLING = 48
INTERFACE_CHUNK = 256
GMRES_TOLERANCE = 1e-10
GMRES_RESTART = 50
GMRES_MAX_ITERATIONS = 200


@dataclass(frozen=True, eq=False)
class MediumGrid:
    """
    Uniform grid of square cells, cell (i, j) centered at
    origin + h (i + 1/2, j + 1/2), carrying the cell-averaged contrast
    """

    origin: Tuple[float, float]
    h: float
    contrast: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.contrast.shape

    def axes(self) -> Tuple[np.ndarray, np.ndarray]:
        nx, ny = self.shape
        return (
            self.origin[0] + self.h * (np.arange(nx) + 0.5),
            self.origin[1] + self.h * (np.arange(ny) + 0.5),
        )

    def centers(self) -> np.ndarray:
        """(nx, ny, 2) cell centers"""
        x, y = self.axes()
        return np.stack(np.meshgrid(x, y, indexing="ij"), axis=-1)

    @property
    def is_empty(self) -> bool:
        return not np.any(self.contrast)

    def to_dataarray(self) -> xr.DataArray:
        x, y = self.axes()
        return xr.DataArray(
            self.contrast, dims=("x", "y"), coords={"x": x, "y": y},
            attrs={"h": self.h}, name="contrast",
        )


def _refractive_index(scene: Scene, points: np.ndarray) -> np.ndarray:
    index = np.ones(points.shape[:-1], dtype=complex)
    if scene.medium is not None:
        index = scene.medium.index_at(points)
    if scene.ball is not None:
        index = np.where(scene.ball.contains(points), complex(scene.ball.index), index)
    return index


def _interface_contrast(scene: Scene, origin, h: float, cells: np.ndarray) -> np.ndarray:
    """Contrast of the listed cells averaged over INTERFACE_SUPERSAMPLING^2 points"""
    offsets = h * (np.arange(INTERFACE_SUPERSAMPLING) + 0.5) / INTERFACE_SUPERSAMPLING
    local = np.stack(np.meshgrid(offsets, offsets, indexing="ij"), axis=-1).reshape(-1, 2)
    averages = []
    for start in range(0, len(cells), INTERFACE_CHUNK):
        corners = np.asarray(origin) + h * cells[start:start + INTERFACE_CHUNK]
        points = corners[:, None, :] + local[None, :, :]
        averages.append((_refractive_index(scene, points) - 1).mean(axis=1))
    return np.concatenate(averages)


def medium_grid(
    scene: Scene,
    k: float,
    cells_per_wavelength: int = DEFAULT_CELLS_PER_WAVELENGTH,
) -> MediumGrid:
    """
    Grid over [-R, R]^2 and the ball's bounding box, with the contrast
    averaged over SUPERSAMPLING^2 points per cell and over
    INTERFACE_SUPERSAMPLING^2 points in cells next to an interface

    Args:
        scene(Scene): medium scene
        k(float): wave number
        cells_per_wavelength(int): resolution

    Returns:
        MediumGrid: the discretized contrast
    """
    h = 2 * np.pi / k / cells_per_wavelength
    lower = np.array([-scene.R, -scene.R])
    upper = np.array([scene.R, scene.R])
    if scene.ball is not None:
        center = np.asarray(scene.ball.center)
        lower = np.minimum(lower, center - scene.ball.radius)
        upper = np.maximum(upper, center + scene.ball.radius)
    counts = np.ceil((upper - lower) / h).astype(int)
    # center the cells on the box
    origin = 0.5 * (lower + upper) - 0.5 * h * counts
    offsets = (np.arange(SUPERSAMPLING) + 0.5) / SUPERSAMPLING
    sub_x = origin[0] + h * (np.arange(counts[0])[:, None] + offsets[None, :]).ravel()
    sub_y = origin[1] + h * (np.arange(counts[1])[:, None] + offsets[None, :]).ravel()
    points = np.stack(np.meshgrid(sub_x, sub_y, indexing="ij"), axis=-1)
    samples = (_refractive_index(scene, points) - 1).reshape(
        counts[0], SUPERSAMPLING, counts[1], SUPERSAMPLING
    )
    contrast = samples.mean(axis=(1, 3))
    mixed = np.any(samples != samples[:, :1, :, :1], axis=(1, 3))
    # a corner clipped between sub-samples shows up in a neighbour
    interface = ndimage.binary_dilation(mixed, structure=np.ones((3, 3), bool))
    if np.any(interface):
        contrast[interface] = _interface_contrast(scene, origin, h, np.argwhere(interface))
    logger.debug(
        f"Medium grid {tuple(counts)} cells of size {h:.4f}, "
        f"{int(np.sum(interface))} interface cells refined"
    )
    return MediumGrid(tuple(origin), float(h), contrast)


def self_cell_integral(k: float, h: float) -> complex:
    """Integral of Phi(0, y) over the disk of area h^2"""
    a = h / math.sqrt(math.pi)
    return 0.5j * math.pi * a / k * complex(special.hankel1(1, k * a)) - 1 / k ** 2


def extended_green(k: float, grid: MediumGrid) -> np.ndarray:
    """FFT of k^2 times the cell-integrated Green's function on the doubled grid"""
    nx, ny = grid.shape
    ix = np.arange(2 * nx)
    iy = np.arange(2 * ny)
    x = grid.h * np.where(ix < nx, ix, ix - 2 * nx)
    y = grid.h * np.where(iy < ny, iy, iy - 2 * ny)
    distance = np.hypot(x[:, None], y[None, :])
    distance[0, 0] = 1.0
    kernel = 0.25j * special.hankel1(0, k * distance) * grid.h ** 2
    kernel[0, 0] = self_cell_integral(k, grid.h)
    return np.fft.fft2(k ** 2 * kernel)


def apply_green(values: np.ndarray, green_transform: np.ndarray) -> np.ndarray:
    extended = np.fft.ifft2(green_transform * np.fft.fft2(values, s=green_transform.shape))
    return extended[: values.shape[0], : values.shape[1]]


@dataclass(frozen=True, eq=False)
class MediumSolution:
    """Total field on the grid for one incident field"""

    grid: MediumGrid
    values: np.ndarray
    k: float
    residual_history: List[float] = field(default_factory=list)


def _solve_grid(
    grid: MediumGrid,
    green_transform: Optional[np.ndarray],
    incident: np.ndarray,
    max_iterations: int,
) -> Tuple[np.ndarray, List[float]]:
    if grid.is_empty:
        return incident.copy(), [0.0]
    shape = grid.shape
    contrast = grid.contrast

    def matvec(vector):
        values = vector.reshape(shape)
        return (values - apply_green(contrast * values, green_transform)).ravel()

    size = contrast.size
    operator = LinearOperator((size, size), matvec=matvec, dtype=complex)
    history = []
    solution, info = gmres(
        operator,
        incident.ravel(),
        rtol=GMRES_TOLERANCE,
        atol=0.0,
        restart=GMRES_RESTART,
        maxiter=max_iterations,
        callback=history.append,
        callback_type="pr_norm",
    )
    if info != 0:
        raise NonConvergenceError(
            f"GMRES stopped after {len(history)} iterations without reaching "
            f"the relative residual {GMRES_TOLERANCE}",
            history,
        )
    logger.debug(f"GMRES converged in {len(history)} iterations")
    return solution.reshape(shape), history


def _check_scene(scene: Scene, k: float):
    if scene.variant != "medium":
        raise InvalidGeometryError(
            f"The Lippmann-Schwinger solver needs a medium scene, got {scene.variant}"
        )
    validate_scene(scene, k).raise_for_errors()


def solve_ls(
    scene: Scene,
    incident: IncidentField,
    cells_per_wavelength: int = DEFAULT_CELLS_PER_WAVELENGTH,
    max_iterations: int = GMRES_MAX_ITERATIONS,
) -> MediumSolution:
    """
    Total field of a medium scene on its grid

    Args:
        scene(Scene): medium scene
        incident(IncidentField): incident field
        cells_per_wavelength(int): grid resolution
        max_iterations(int): cap on GMRES restart cycles

    Returns:
        MediumSolution: total field and residual history
    """
    k = incident.k
    _check_scene(scene, k)
    grid = medium_grid(scene, k, cells_per_wavelength)
    green_transform = None if grid.is_empty else extended_green(k, grid)
    incident_values = incident.value(grid.centers().reshape(-1, 2)).reshape(grid.shape)
    values, history = _solve_grid(grid, green_transform, incident_values, max_iterations)
    return MediumSolution(grid, values, k, history)


def _far_field_operator(grid: MediumGrid, k: float, obs_angles) -> np.ndarray:
    points = grid.centers().reshape(-1, 2)
    phase = np.exp(-1j * k * directions(obs_angles) @ points.T)
    return k ** 2 * far_field_constant(k) * grid.h ** 2 * phase * grid.contrast.ravel()


def far_field_medium(solution: MediumSolution, obs_angles) -> np.ndarray:
    """u^inf(x) = k^2 gamma_2 int exp(-ik x.y) m(y) u(y) dy"""
    operator = _far_field_operator(solution.grid, solution.k, obs_angles)
    return operator @ solution.values.ravel()


def born_far_field(scene: Scene, k, obs_angles, inc_angles,
                   cells_per_wavelength: int = DEFAULT_CELLS_PER_WAVELENGTH) -> np.ndarray:
    """First Born approximation, u replaced by u^i in the far field integral"""
    k = as_wavenumber(k)
    grid = medium_grid(scene, k, cells_per_wavelength)
    points = grid.centers().reshape(-1, 2)
    incident = np.exp(1j * k * points @ directions(inc_angles).T)
    return _far_field_operator(grid, k, obs_angles) @ incident


def _grid_far_field(scene: Scene, k: float, obs_angles, inc_angles,
                    cells_per_wavelength: int, threads: int, max_iterations: int):
    grid = medium_grid(scene, k, cells_per_wavelength)
    green_transform = None if grid.is_empty else extended_green(k, grid)
    points = grid.centers().reshape(-1, 2)

    def column(d):
        incident = np.exp(1j * k * points @ d).reshape(grid.shape)
        values, _ = _solve_grid(grid, green_transform, incident, max_iterations)
        return values.ravel()

    fields = map_in_threads(column, directions(inc_angles), threads)
    return _far_field_operator(grid, k, obs_angles) @ np.stack(fields, axis=1), grid.shape


def multistatic_medium(
    scene: Scene,
    k,
    obs_angles,
    inc_angles,
    cells_per_wavelength: int = DEFAULT_CELLS_PER_WAVELENGTH,
    threads: int = 1,
    max_iterations: int = GMRES_MAX_ITERATIONS,
    extrapolate: bool = True,
) -> xr.DataArray:
    """
    Far-field matrix of a medium scene, one GMRES solve per incident
    direction, directions solved concurrently on `threads` workers.
    With `extrapolate` the scene is solved again at twice the resolution
    and the result is (4 F_{h/2} - F_h) / 3.

    Args:
        scene(Scene): medium scene
        k: wave number
        obs_angles: observation angles on [0, 2pi)
        inc_angles: incident angles on [0, 2pi)
        cells_per_wavelength(int): grid resolution of the coarse solve
        threads(int): worker threads
        max_iterations(int): cap on GMRES restart cycles
        extrapolate(bool): Richardson extrapolation between h and h/2

    Returns:
        xr.DataArray: the far-field matrix
    """
    k = as_wavenumber(k)
    _check_scene(scene, k)
    obs_angles = np.asarray(obs_angles, dtype=float)
    inc_angles = np.asarray(inc_angles, dtype=float)
    values, shape = _grid_far_field(scene, k, obs_angles, inc_angles,
                                    cells_per_wavelength, threads, max_iterations)
    if extrapolate:
        fine, shape = _grid_far_field(scene, k, obs_angles, inc_angles,
                                      2 * cells_per_wavelength, threads, max_iterations)
        values = (4 * fine - values) / 3
    logger.info(
        f"Far field of medium scene {scene.name or scene.variant} on "
        f"{len(obs_angles)}x{len(inc_angles)} directions at k={k}, grid {shape}"
        + (", extrapolated" if extrapolate else "")
    )
    return far_field_matrix(values, obs_angles, inc_angles, k, "full")
