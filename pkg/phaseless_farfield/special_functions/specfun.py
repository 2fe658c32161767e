"""
Bessel, Neumann and Hankel functions of integer order and the 2D
fundamental solution of the Helmholtz equation

    Phi(x, y) = (i/4) H_0^(1)(k |x - y|)

The evaluations are delegated to scipy.special (AMOS/Cephes), wrapped with
the domain checks the solvers rely on. All functions are pure and accept
scalars or numpy arrays for the argument.
"""
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from ..utilities.exceptions import SingularityError, SpecialFunctionDomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SINGULARITY_CUTOFF = 1e-14
MAX_ORDER = 60
#: first positive zero of J_0
J0_FIRST_ZERO = float(special.jn_zeros(0, 1)[0])
EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True)
class Wavenumber:
    """Positive real wave number k = omega / c"""

    k: float

    def __post_init__(self):
        if not np.isfinite(self.k) or self.k <= 0:
            raise ValueError(f"Wavenumber must be positive and finite, got {self.k}")

    def __float__(self):
        return float(self.k)

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k


def as_wavenumber(k: Union[float, Wavenumber]) -> float:
    """Validates k and returns it as a float"""
    if isinstance(k, Wavenumber):
        return k.k
    return Wavenumber(float(k)).k


def check_complex(value: complex) -> complex:
    """Rejects NaN or infinite components at API boundaries"""
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"Complex value must have finite components, got {value}")
    return value


def _check_order(n: int):
    if int(n) != n or n < 0:
        raise SpecialFunctionDomainError(
            f"Order must be a nonnegative integer, got {n}"
        )
    if n > MAX_ORDER:
        logger.warning(f"Bessel order {n} exceeds the supported order {MAX_ORDER}")


def _as_argument(x: ArrayLike, strictly_positive: bool, name: str):
    x_array = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_array)):
        raise SpecialFunctionDomainError(f"{name} requires finite arguments")
    if strictly_positive and np.any(x_array <= 0):
        raise SpecialFunctionDomainError(
            f"{name} is singular at the origin and undefined for x <= 0"
        )
    if not strictly_positive and np.any(x_array < 0):
        raise SpecialFunctionDomainError(f"{name} requires x >= 0")
    return x_array


def _scalar_or_array(value: np.ndarray, like: ArrayLike):
    if np.ndim(like) == 0:
        return value.item()
    return value


def bessel_j(n: int, x: ArrayLike) -> ArrayLike:
    """
    Bessel function of the first kind J_n(x)

    Args:
        n(int): nonnegative integer order
        x(float/np.ndarray): nonnegative argument

    Returns:
        float or np.ndarray: J_n(x)
    """
    _check_order(n)
    x_array = _as_argument(x, strictly_positive=False, name="bessel_j")
    return _scalar_or_array(special.jv(n, x_array), x)


def bessel_y(n: int, x: ArrayLike) -> ArrayLike:
    """
    Bessel function of the second kind Y_n(x)

    Args:
        n(int): nonnegative integer order
        x(float/np.ndarray): positive argument

    Returns:
        float or np.ndarray: Y_n(x)
    """
    _check_order(n)
    x_array = _as_argument(x, strictly_positive=True, name="bessel_y")
    return _scalar_or_array(special.yv(n, x_array), x)


def hankel1(n: int, x: ArrayLike) -> ArrayLike:
    """Hankel function of the first kind, H_n^(1)(x) = J_n(x) + i Y_n(x)"""
    _check_order(n)
    x_array = _as_argument(x, strictly_positive=True, name="hankel1")
    value = special.jv(n, x_array) + 1j * special.yv(n, x_array)
    return _scalar_or_array(value, x)


def bessel_j_derivative(n: int, x: ArrayLike) -> ArrayLike:
    """Derivative J_n'(x)"""
    _check_order(n)
    x_array = _as_argument(x, strictly_positive=False, name="bessel_j_derivative")
    return _scalar_or_array(special.jvp(n, x_array), x)


def hankel1_derivative(n: int, x: ArrayLike) -> ArrayLike:
    """Derivative H_n^(1)'(x)"""
    _check_order(n)
    x_array = _as_argument(x, strictly_positive=True, name="hankel1_derivative")
    value = special.jvp(n, x_array) + 1j * special.yvp(n, x_array)
    return _scalar_or_array(value, x)


def far_field_constant(k: Union[float, Wavenumber]) -> complex:
    """gamma_2 = exp(i pi/4) / sqrt(8 pi k), so that
    u^s(x) = exp(ik|x|)/sqrt(|x|) (u^inf(x_hat) + O(1/|x|))"""
    k = as_wavenumber(k)
    return np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * k)


def fundamental_solution_2d(x, y, k: Union[float, Wavenumber]) -> complex:
    """
    Phi(x, y) = (i/4) H_0^(1)(k |x - y|)

    Args:
        x: point (2,)
        y: point (2,)
        k(float/Wavenumber): wave number

    Returns:
        complex: value of the fundamental solution
    """
    k = as_wavenumber(k)
    distance = math.hypot(x[0] - y[0], x[1] - y[1])
    if distance < SINGULARITY_CUTOFF:
        raise SingularityError(
            f"Fundamental solution evaluated at coincident points "
            f"(|x - y| = {distance:.3e})"
        )
    return 0.25j * complex(special.hankel1(0, k * distance))


def fundamental_solution_distance(distance: np.ndarray, k: float) -> np.ndarray:
    """Vectorized Phi as a function of |x - y|, used by the kernels"""
    if np.any(distance < SINGULARITY_CUTOFF):
        raise SingularityError(
            "Fundamental solution evaluated at coincident points "
            f"(min |x - y| = {np.min(distance):.3e})"
        )
    return 0.25j * special.hankel1(0, k * distance)
