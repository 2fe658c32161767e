"""Incident fields and direction grids"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from ..special_functions.specfun import as_wavenumber

logger = logging.getLogger(__name__)

INCIDENT_KINDS = ("plane_wave", "superposition", "point_source")


def direction(angle: float) -> np.ndarray:
    return np.array([np.cos(angle), np.sin(angle)])


def directions(angles: Sequence[float]) -> np.ndarray:
    """(len(angles), 2) unit vectors"""
    angles = np.asarray(angles, dtype=float)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def full_aperture_angles(count: int) -> np.ndarray:
    """Uniform grid 2pi j / count on [0, 2pi)"""
    return 2 * np.pi * np.arange(count) / count


def upper_aperture_angles(count: int) -> np.ndarray:
    """Midpoint grid on (0, pi): upward directions"""
    return np.pi * (np.arange(count) + 0.5) / count


def lower_aperture_angles(count: int) -> np.ndarray:
    """Midpoint grid on (pi, 2pi): downward directions"""
    return np.pi + upper_aperture_angles(count)


def _unit(vector, name: str) -> np.ndarray:
    vector = np.asarray(vector, dtype=float)
    norm = np.linalg.norm(vector)
    if abs(norm - 1) > 1e-14:
        raise ValueError(f"{name} must be a unit vector, |{name}| = {norm!r}")
    return vector


@dataclass(frozen=True, eq=False)
class IncidentField:
    """
    Plane wave exp(ik x.d), the superposition of two plane waves, or the
    point source Phi(x, z).
    """

    kind: str
    k: float
    directions: Tuple[np.ndarray, ...] = ()
    source: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "k", as_wavenumber(self.k))
        if self.kind not in INCIDENT_KINDS:
            raise ValueError(f"Unknown incident field {self.kind}")
        expected = {"plane_wave": 1, "superposition": 2, "point_source": 0}[self.kind]
        if len(self.directions) != expected:
            raise ValueError(f"{self.kind} needs {expected} directions")
        object.__setattr__(
            self, "directions",
            tuple(_unit(d, "d") for d in self.directions),
        )
        if self.kind == "point_source":
            if self.source is None:
                raise ValueError("point_source needs a source point")
            object.__setattr__(self, "source", np.asarray(self.source, dtype=float))

    @classmethod
    def plane_wave(cls, d, k) -> "IncidentField":
        return cls("plane_wave", k, (d,))

    @classmethod
    def superposition(cls, d1, d2, k) -> "IncidentField":
        return cls("superposition", k, (d1, d2))

    @classmethod
    def point_source(cls, z, k) -> "IncidentField":
        return cls("point_source", k, source=z)

    def plane_waves(self):
        """Incident fields this one is the sum of"""
        if self.kind == "superposition":
            return [IncidentField.plane_wave(d, self.k) for d in self.directions]
        return [self]

    def value(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if self.kind == "point_source":
            distance = np.linalg.norm(points - self.source, axis=-1)
            return 0.25j * special.hankel1(0, self.k * distance)
        return sum(np.exp(1j * self.k * points @ d) for d in self.directions)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """(P, 2) gradient of the field at points"""
        points = np.atleast_2d(points)
        if self.kind == "point_source":
            offset = points - self.source
            distance = np.linalg.norm(offset, axis=-1)
            radial = -0.25j * self.k * special.hankel1(1, self.k * distance) / distance
            return radial[:, None] * offset
        return sum(
            1j * self.k * np.exp(1j * self.k * points @ d)[:, None] * d
            for d in self.directions
        )

    def normal_derivative(self, points: np.ndarray, normals: np.ndarray) -> np.ndarray:
        return np.sum(self.gradient(points) * normals, axis=-1)
