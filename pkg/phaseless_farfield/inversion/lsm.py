"""
Linear sampling method. For a probe point z the far-field equation

    int F(x, d) g(d) ds(d) = Phi^inf(x, z) = gamma_2 exp(-ik x.z)

is solved by Tikhonov regularization from one SVD of the discretized
operator A = F dtheta, and 1/||g_z|| indicates the scatterer support.
Half-aperture data use the image-subtracted test function
gamma_2 (exp(-ik x.z) - exp(-ik x.z')).

The regularization parameter follows the generalized discrepancy principle
||A g - f|| = delta ||g|| with delta relative to the largest singular value.
Exact data use the floor delta = 1e-8, so the parameter depends on the
singular values and on |U^H f| alone and a unimodular gauge leaves it
unchanged.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import xarray as xr
from scipy import linalg

from ..data_container.far_field import grids
from ..forward.incident import directions
from ..forward.kernels import MIRROR
from ..special_functions.specfun import far_field_constant
from ..utilities.exceptions import DegenerateOperatorError
from ..utilities.general_utilities import map_in_threads, split_in_chunks

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-14
DISCREPANCY_FLOOR = 1e-8
BISECTION_STEPS = 80


@dataclass(frozen=True, eq=False)
class LSMOperator:
    """SVD of the discretized far-field operator"""

    U: np.ndarray
    s: np.ndarray
    Vh: np.ndarray
    obs: np.ndarray
    k: float
    aperture: str

    @classmethod
    def from_far_field(cls, F: xr.DataArray) -> "LSMOperator":
        obs_angles, inc_angles = grids(F)
        aperture = F.attrs["aperture"]
        step = (2 * np.pi if aperture == "full" else np.pi) / len(inc_angles)
        U, s, Vh = linalg.svd(F.values * step, full_matrices=False)
        if s.size == 0 or s[0] < RANK_TOLERANCE:
            raise DegenerateOperatorError(
                "Far-field operator is numerically zero, no probe can be resolved"
            )
        logger.debug(
            f"Far-field operator singular values {s[0]:.3e} .. {s[-1]:.3e}"
        )
        return cls(U, s, Vh, directions(obs_angles), F.attrs["k"], aperture)

    def test_far_fields(self, points: np.ndarray) -> np.ndarray:
        """(len(obs), P) right-hand sides for probe points"""
        points = np.atleast_2d(points)
        gamma = far_field_constant(self.k)
        values = gamma * np.exp(-1j * self.k * self.obs @ points.T)
        if self.aperture == "half":
            values -= gamma * np.exp(-1j * self.k * self.obs @ (points * MIRROR).T)
        return values


def _norms(s, rho, alpha):
    """||g||^2 and ||A g - f||^2 (range part) for Tikhonov parameters alpha"""
    denominator = s ** 2 + alpha[..., None]
    g_squared = np.sum((s * rho / denominator) ** 2, axis=-1)
    residual_squared = np.sum((alpha[..., None] * rho / denominator) ** 2, axis=-1)
    return g_squared, residual_squared


def _morozov(s, rho, outside, delta):
    """Bisection in log(alpha) on ||A g - f||^2 - delta^2 ||g||^2, vectorized over probes"""
    low = np.full(rho.shape[0], np.log((DISCREPANCY_FLOOR ** 2 * s[0]) ** 2))
    high = np.full(rho.shape[0], np.log(s[0] ** 2))
    for _ in range(BISECTION_STEPS):
        middle = 0.5 * (low + high)
        g_squared, residual_squared = _norms(s, rho, np.exp(middle))
        too_large = residual_squared + outside - delta ** 2 * g_squared > 0
        high = np.where(too_large, middle, high)
        low = np.where(too_large, low, middle)
    return np.exp(0.5 * (low + high))


def lsm_solve_points(
    operator: LSMOperator, points: np.ndarray, noise_level: float = 0.0
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Tikhonov solutions of the far-field equation for many probes

    Args:
        operator(LSMOperator): decomposed far-field operator
        points(np.ndarray): (P, 2) probe points
        noise_level(float): relative noise level delta of the operator, \
            values below 1e-8 use the floor

    Returns:
        Tuple: ||g_z||, regularization parameters and relative discrepancies \
            ||A g - f|| / ||f||, each of length P
    """
    f = operator.test_far_fields(points)
    coefficients = operator.U.conj().T @ f
    rho = np.abs(coefficients).T
    f_squared = np.sum(np.abs(f) ** 2, axis=0)
    if operator.U.shape[0] == operator.U.shape[1]:
        # U spans the whole data space
        outside = np.zeros(len(f_squared))
    else:
        outside = np.maximum(f_squared - np.sum(rho ** 2, axis=1), 0.0)
    s = operator.s
    delta = max(noise_level, DISCREPANCY_FLOOR) * s[0]
    alpha = _morozov(s, rho, outside, delta)
    g_squared, residual_squared = _norms(s, rho, alpha)
    discrepancy = np.sqrt((residual_squared + outside) / f_squared)
    return np.sqrt(g_squared), alpha, discrepancy


def lsm_solve(F: xr.DataArray, z, noise_level: float = 0.0) -> Tuple[float, float, float]:
    """
    ||g_z||, regularization parameter and relative discrepancy at one probe point
    """
    norm, alpha, discrepancy = lsm_solve_points(
        LSMOperator.from_far_field(F), np.asarray(z, dtype=float)[None, :], noise_level
    )
    return float(norm[0]), float(alpha[0]), float(discrepancy[0])


def indicator_map(
    F: xr.DataArray,
    x_range: Tuple[float, float],
    y_range: Tuple[float, float],
    shape: Tuple[int, int] = (41, 41),
    noise_level: float = 0.0,
    threads: int = 1,
) -> xr.Dataset:
    """
    Indicator 1/||g_z|| on a rectangular grid of probes

    Args:
        F(xr.DataArray): far-field matrix
        x_range(Tuple): first coordinate range
        y_range(Tuple): second coordinate range
        shape(Tuple): number of probes along x and y
        noise_level(float): relative noise level for the discrepancy principle
        threads(int): worker threads over chunks of probes

    Returns:
        xr.Dataset: indicator, regularization and discrepancy on dims (y, x)
    """
    operator = LSMOperator.from_far_field(F)
    x = np.linspace(x_range[0], x_range[1], shape[0])
    y = np.linspace(y_range[0], y_range[1], shape[1])
    points = np.stack(np.meshgrid(x, y, indexing="xy"), axis=-1).reshape(-1, 2)
    chunks = split_in_chunks(len(points), max(threads, 1) * 4)
    solved = map_in_threads(
        lambda chunk: lsm_solve_points(operator, points[chunk], noise_level),
        chunks, threads,
    )
    norm = np.concatenate([part[0] for part in solved])
    alpha = np.concatenate([part[1] for part in solved])
    discrepancy = np.concatenate([part[2] for part in solved])
    grid_shape = (len(y), len(x))
    logger.info(f"Indicator map on {len(x)}x{len(y)} probes")
    return xr.Dataset(
        {
            "indicator": (("y", "x"), (1 / norm).reshape(grid_shape)),
            "regularization": (("y", "x"), alpha.reshape(grid_shape)),
            "discrepancy": (("y", "x"), discrepancy.reshape(grid_shape)),
        },
        coords={"x": x, "y": y},
        attrs={"k": F.attrs["k"], "aperture": F.attrs["aperture"],
               "noise_level": float(noise_level)},
    )


def probe_ratio(F: xr.DataArray, b, noise_level: float = 0.0) -> float:
    """indicator(b) / indicator(-b)"""
    b = np.asarray(b, dtype=float)
    if np.linalg.norm(b) < 1e-12:
        raise ValueError("Probe point b = 0 coincides with its reflection")
    norm, _, _ = lsm_solve_points(
        LSMOperator.from_far_field(F), np.stack([b, -b]), noise_level
    )
    return float(norm[1] / norm[0])


def superlevel_contains(indicator: xr.Dataset, point, level: float = 0.4) -> bool:
    """True if the min-max normalized indicator at the nearest probe is >= level"""
    values = indicator["indicator"]
    normalized = (values - values.min()) / (values.max() - values.min())
    return bool(normalized.sel(x=point[0], y=point[1], method="nearest") >= level)
