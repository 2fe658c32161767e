"""
Phaseless measurements: moduli of far fields for single plane waves and
for superpositions with a fixed plane wave d0, held in an xr.Dataset with
variables mod_single(observation, incidence), mod_ref(observation) and
mod_super(observation, incidence).
"""
import logging
from typing import Optional

import numpy as np
import xarray as xr

from ..forward.analytic import translation_factor
from .far_field import DIMS, grid_index, grids, with_values

logger = logging.getLogger(__name__)


def synthesize_dataset(
    F: xr.DataArray,
    d0_angle: float,
    noise_level: float = 0.0,
    seed: Optional[int] = None,
) -> xr.Dataset:
    """
    Phaseless data of a far-field matrix

    Args:
        F(xr.DataArray): far-field matrix
        d0_angle(float): angle of the fixed incident direction, on the \
            incidence grid
        noise_level(float): multiplicative noise level eps, each modulus is \
            scaled by 1 + eps U[-1, 1]
        seed(int): seed of the noise generator

    Returns:
        xr.Dataset: the phaseless dataset
    """
    if not 0 <= noise_level < 1:
        raise ValueError(f"Noise level must lie in [0, 1), got {noise_level}")
    obs, inc = grids(F)
    d0_index = grid_index(inc, d0_angle)
    values = F.values
    mod_single = np.abs(values)
    mod_super = np.abs(values + values[:, d0_index][:, None])
    if noise_level > 0:
        generator = np.random.default_rng(seed)
        mod_single = mod_single * (1 + noise_level * generator.uniform(-1, 1, mod_single.shape))
        mod_super = mod_super * (1 + noise_level * generator.uniform(-1, 1, mod_super.shape))
        logger.info(f"Multiplicative noise of level {noise_level} applied, seed {seed}")
    mod_ref = mod_single[:, d0_index].copy()
    return xr.Dataset(
        {
            "mod_single": (DIMS, mod_single),
            "mod_ref": (("observation",), mod_ref),
            "mod_super": (DIMS, mod_super),
        },
        coords={"observation": obs, "incidence": inc},
        attrs={
            "k": F.attrs["k"],
            "aperture": F.attrs["aperture"],
            "d0": float(inc[d0_index]),
            "d0_index": int(d0_index),
            "noise_level": float(noise_level),
            "seed": -1 if seed is None else int(seed),
        },
    )


def triangle_violation(dataset: xr.Dataset) -> float:
    """
    Largest violation of |mod_super - mod_single| <= mod_ref and
    mod_super <= mod_single + mod_ref, zero for consistent data
    """
    single = dataset["mod_single"].values
    ref = dataset["mod_ref"].values[:, None]
    super_ = dataset["mod_super"].values
    lower = np.abs(super_ - single) - ref
    upper = super_ - single - ref
    return float(max(np.max(lower), np.max(upper), 0.0))


def translate_farfield(F: xr.DataArray, z) -> xr.DataArray:
    """F_z(x, d) = exp(ik(d - x).z) F(x, d), the far field of the scene shifted by z"""
    obs, inc = grids(F)
    factor = translation_factor(F.attrs["k"], obs, inc, z)
    return with_values(F, F.values * factor)


def invariance_gap(F: xr.DataArray, z, d0_angle: float, superposition: bool = True) -> float:
    """
    max | |F_z(x, d) + F_z(x, d0)| - |F(x, d) + F(x, d0)| |, or the same
    for single incidences when superposition=False

    Args:
        F(xr.DataArray): far-field matrix
        z: translation vector
        d0_angle(float): fixed incident angle, on the incidence grid
        superposition(bool): compare superposition or single moduli

    Returns:
        float: the gap
    """
    shifted = translate_farfield(F, z)
    if not superposition:
        return float(np.max(np.abs(np.abs(shifted.values) - np.abs(F.values))))
    _, inc = grids(F)
    d0_index = grid_index(inc, d0_angle)

    def super_moduli(values):
        return np.abs(values + values[:, d0_index][:, None])

    return float(np.max(np.abs(super_moduli(shifted.values) - super_moduli(F.values))))


def dataset_gap(first: xr.Dataset, second: xr.Dataset) -> float:
    """Largest entrywise difference between two phaseless datasets on the same grids"""
    return float(max(
        np.max(np.abs(first[name].values - second[name].values))
        for name in ("mod_single", "mod_ref", "mod_super")
    ))
