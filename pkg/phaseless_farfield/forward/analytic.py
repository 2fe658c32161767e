"""
Separation-of-variables fields of a disk of radius a centered at z, for
plane-wave incidence exp(ik x.d). The scattered field is

    u^s(x) = sum_n i^n a_n H_n^(1)(k|x - z|) exp(in(theta - theta_d))

and its far field is exp(-i pi/4) sqrt(2/(pi k)) sum_n a_n exp(in(theta_x - theta_d))
times the translation factor exp(ik(d - x_hat).z).
"""
import math

import numpy as np
from scipy import special

from ..special_functions.specfun import as_wavenumber

MAX_SERIES_ORDER = 60


def series_order(k: float, radius: float) -> int:
    return min(int(math.ceil(k * radius + 20)), MAX_SERIES_ORDER)


def sound_soft_coefficients(k: float, radius: float, order: int) -> np.ndarray:
    """a_n = -J_n(ka) / H_n(ka) for n = -order..order"""
    n = np.arange(-order, order + 1)
    return -special.jv(n, k * radius) / special.hankel1(n, k * radius)


def penetrable_coefficients(
    k: float, radius: float, index: complex, order: int
) -> np.ndarray:
    """Transmission coefficients of a disk with constant refractive index"""
    n = np.arange(-order, order + 1)
    k_inside = k * np.sqrt(complex(index))
    ka, kia = k * radius, k_inside * radius
    j_out, dj_out = special.jv(n, ka), special.jvp(n, ka)
    h_out, dh_out = special.hankel1(n, ka), special.h1vp(n, ka)
    j_in, dj_in = special.jv(n, kia), special.jvp(n, kia)
    numerator = k_inside * dj_in * j_out - k * dj_out * j_in
    denominator = k * dh_out * j_in - k_inside * dj_in * h_out
    return numerator / denominator


def _far_field_from_coefficients(k, coefficients, obs_angles, inc_angles, center):
    order = (len(coefficients) - 1) // 2
    n = np.arange(-order, order + 1)
    obs_angles = np.asarray(obs_angles, dtype=float)
    inc_angles = np.asarray(inc_angles, dtype=float)
    difference = obs_angles[:, None] - inc_angles[None, :]
    series = np.exp(1j * n[None, None, :] * difference[:, :, None]) @ coefficients
    values = np.exp(-1j * np.pi / 4) * np.sqrt(2 / (np.pi * k)) * series
    center = np.asarray(center, dtype=float)
    if np.any(center):
        values = values * translation_factor(k, obs_angles, inc_angles, center)
    return values


def translation_factor(k, obs_angles, inc_angles, shift) -> np.ndarray:
    """exp(ik(d - x_hat).z) on the (observation, incidence) grid"""
    obs = np.stack([np.cos(obs_angles), np.sin(obs_angles)], axis=-1)
    inc = np.stack([np.cos(inc_angles), np.sin(inc_angles)], axis=-1)
    shift = np.asarray(shift, dtype=float)
    return np.exp(1j * k * ((inc @ shift)[None, :] - (obs @ shift)[:, None]))


def sound_soft_disk_far_field(
    k, radius: float, obs_angles, inc_angles, center=(0.0, 0.0)
) -> np.ndarray:
    """
    Far field matrix of a sound-soft disk

    Args:
        k: wave number
        radius(float): disk radius
        obs_angles: observation angles
        inc_angles: incident angles
        center: disk center

    Returns:
        np.ndarray: (len(obs_angles), len(inc_angles)) far field values
    """
    k = as_wavenumber(k)
    coefficients = sound_soft_coefficients(k, radius, series_order(k, radius))
    return _far_field_from_coefficients(k, coefficients, obs_angles, inc_angles, center)


def penetrable_disk_far_field(
    k, radius: float, index: complex, obs_angles, inc_angles, center=(0.0, 0.0)
) -> np.ndarray:
    """Far field matrix of a disk of constant refractive index"""
    k = as_wavenumber(k)
    order = series_order(k * abs(np.sqrt(complex(index))), radius)
    coefficients = penetrable_coefficients(k, radius, index, order)
    return _far_field_from_coefficients(k, coefficients, obs_angles, inc_angles, center)


def sound_soft_disk_scattered_field(
    k, radius: float, points: np.ndarray, inc_angle: float, center=(0.0, 0.0)
) -> np.ndarray:
    """Scattered field of a centered-at-`center` sound-soft disk at points outside it"""
    k = as_wavenumber(k)
    order = series_order(k, radius)
    n = np.arange(-order, order + 1)
    coefficients = sound_soft_coefficients(k, radius, order)
    offset = np.atleast_2d(points) - np.asarray(center, dtype=float)
    r = np.hypot(offset[:, 0], offset[:, 1])
    theta = np.arctan2(offset[:, 1], offset[:, 0])
    terms = (
        (1j ** n * coefficients)[None, :]
        * special.hankel1(n[None, :], k * r[:, None])
        * np.exp(1j * n[None, :] * (theta[:, None] - inc_angle))
    )
    # a plane wave incident on a shifted disk carries the phase exp(ik z.d)
    phase = np.exp(1j * k * np.dot(np.asarray(center, dtype=float),
                                   [np.cos(inc_angle), np.sin(inc_angle)]))
    return phase * terms.sum(axis=1)
