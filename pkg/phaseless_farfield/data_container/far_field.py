"""
Far-field matrices as labelled xarray containers.

A far-field matrix is an xr.DataArray with dims ("observation", "incidence"),
angle coordinates in radians, and attrs k and aperture ("full" for grids on
[0, 2pi), "half" for the rough-surface grids, observation on (0, pi) and
incidence on (pi, 2pi)).
"""
import logging
from typing import Tuple

import numpy as np
import xarray as xr

from ..utilities.exceptions import GridMisalignmentError

logger = logging.getLogger(__name__)

APERTURES = ("full", "half")
DIMS = ("observation", "incidence")
GRID_TOLERANCE = 1e-12


def far_field_matrix(
    values: np.ndarray,
    obs_angles: np.ndarray,
    inc_angles: np.ndarray,
    k: float,
    aperture: str = "full",
    name: str = "far_field",
) -> xr.DataArray:
    """
    Wraps far-field values with their grids

    Args:
        values(np.ndarray): (M_obs, N_inc) complex values
        obs_angles(np.ndarray): observation angles, strictly increasing
        inc_angles(np.ndarray): incident angles, strictly increasing
        k(float): wave number
        aperture(str): "full" or "half"
        name(str): variable name

    Returns:
        xr.DataArray: the far-field matrix
    """
    if aperture not in APERTURES:
        raise ValueError(f"Unknown aperture {aperture}")
    obs_angles = np.asarray(obs_angles, dtype=float)
    inc_angles = np.asarray(inc_angles, dtype=float)
    values = np.asarray(values, dtype=complex)
    if values.shape != (len(obs_angles), len(inc_angles)):
        raise ValueError(
            f"Values of shape {values.shape} do not match the grids "
            f"({len(obs_angles)}, {len(inc_angles)})"
        )
    for label, angles in (("observation", obs_angles), ("incidence", inc_angles)):
        if np.any(np.diff(angles) <= 0):
            raise ValueError(f"{label} grid must be strictly increasing")
    if not np.all(np.isfinite(values)):
        raise ValueError("Far-field values must be finite")
    return xr.DataArray(
        values,
        dims=DIMS,
        coords={"observation": obs_angles, "incidence": inc_angles},
        attrs={"k": float(k), "aperture": aperture},
        name=name,
    )


def grids(F: xr.DataArray) -> Tuple[np.ndarray, np.ndarray]:
    return F["observation"].values, F["incidence"].values


def with_values(F: xr.DataArray, values: np.ndarray, name: str = None) -> xr.DataArray:
    """Same grids and attrs, new values"""
    obs, inc = grids(F)
    return far_field_matrix(
        values, obs, inc, F.attrs["k"], F.attrs["aperture"], name or F.name
    )


def is_uniform_full(angles: np.ndarray) -> bool:
    count = len(angles)
    expected = 2 * np.pi * np.arange(count) / count
    return count > 0 and np.allclose(angles, expected, atol=GRID_TOLERANCE, rtol=0)


def is_uniform_half(obs_angles: np.ndarray, inc_angles: np.ndarray) -> bool:
    count = len(obs_angles)
    expected = np.pi * (np.arange(count) + 0.5) / count
    return (
        len(inc_angles) == count
        and np.allclose(obs_angles, expected, atol=GRID_TOLERANCE, rtol=0)
        and np.allclose(inc_angles, expected + np.pi, atol=GRID_TOLERANCE, rtol=0)
    )


def pairing_indices(
    obs: np.ndarray, inc: np.ndarray, aperture: str
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Index maps (pm, pn) with F[m, n] = F[pm[n], pn[m]] by reciprocity
    u(x, d) = u(-d, -x). In both apertures pn is the inverse of pm.

    Args:
        obs(np.ndarray): observation angles
        inc(np.ndarray): incident angles
        aperture(str): "full" or "half"

    Returns:
        Tuple: pm maps an incidence index to the observation index of its \
            opposite direction, pn maps an observation index to the \
            incidence index of its opposite direction
    """
    if aperture == "full":
        if len(obs) != len(inc) or not (is_uniform_full(obs) and is_uniform_full(inc)):
            raise GridMisalignmentError(
                "Reciprocity pairing needs identical uniform grids on [0, 2pi)"
            )
        count = len(obs)
        if count % 2:
            raise GridMisalignmentError("Reciprocity pairing needs an even grid size")
        shifted = (np.arange(count) + count // 2) % count
        return shifted, shifted
    if not is_uniform_half(obs, inc):
        raise GridMisalignmentError(
            "Reciprocity pairing needs mirrored midpoint grids on the half apertures"
        )
    identity = np.arange(len(obs))
    return identity, identity


def reciprocity_pairing(F: xr.DataArray) -> Tuple[np.ndarray, np.ndarray]:
    obs, inc = grids(F)
    return pairing_indices(obs, inc, F.attrs["aperture"])


def reciprocal(F: xr.DataArray) -> np.ndarray:
    """Values G[m, n] = F[pm[n], pn[m]]"""
    pm, pn = reciprocity_pairing(F)
    values = F.values
    return values[pm[None, :], pn[:, None]]


def reciprocity_gap(F: xr.DataArray, relative: bool = True) -> float:
    """max |F(x, d) - F(-d, -x)|, relative to max |F| unless relative=False"""
    gap = float(np.max(np.abs(F.values - reciprocal(F))))
    if relative:
        scale = float(np.max(np.abs(F.values)))
        return gap / scale if scale > 0 else gap
    return gap


def grid_index(angles: np.ndarray, angle: float) -> int:
    """Index of `angle` on a grid, modulo 2pi"""
    difference = np.angle(np.exp(1j * (np.asarray(angles) - angle)))
    index = int(np.argmin(np.abs(difference)))
    if abs(difference[index]) > 1e-9:
        raise GridMisalignmentError(f"Angle {angle!r} is not on the grid")
    return index
